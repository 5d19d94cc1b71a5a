import { createMovieCard, type CardActions } from './movieCard';
import { createSlider } from './slider';
import type { ViewModel } from './state';
import type { BroadPage } from './types';

export interface DetailCallbacks extends CardActions {
  loadPage(page: number): Promise<BroadPage>;
  setLevel(level: number): Promise<BroadPage>;
  onBack(): void;
}

function renderSlots(grid: HTMLElement, page: BroadPage, actions: CardActions): void {
  grid.textContent = '';
  grid.dataset.pageIndex = String(page.page_index);
  for (const slot of page.slots) {
    grid.appendChild(createMovieCard(slot, actions));
  }
}

/**
 * Broad-recommendations detail page: a 24-movie grid with a 3-page pager.
 * Slider-arm sessions also get the five-detent slider; clicking Set refreshes
 * the grid with page 1 at the new level and syncs the badge to the level the
 * server echoed back.
 */
export function renderDetail(
  root: HTMLElement,
  vm: ViewModel,
  firstPage: BroadPage,
  callbacks: DetailCallbacks,
): void {
  root.textContent = '';

  const back = document.createElement('button');
  back.type = 'button';
  back.className = 'back-button';
  back.textContent = 'Home';
  back.addEventListener('click', () => callbacks.onBack());

  const heading = document.createElement('h2');
  heading.textContent = 'Broad Recommendations';

  const grid = document.createElement('div');
  grid.className = 'broad-grid';

  root.append(back, heading);

  if (vm.hasSlider) {
    const slider = createSlider(vm.level, async (level) => {
      const page = await callbacks.setLevel(level);
      vm.confirmLevel(page.level);
      renderSlots(grid, page, callbacks);
      return vm.level;
    });
    root.appendChild(slider.element);
  }

  const pager = document.createElement('nav');
  pager.className = 'pager';
  for (const pageNumber of [1, 2, 3]) {
    const button = document.createElement('button');
    button.type = 'button';
    button.textContent = `Page ${pageNumber}`;
    button.addEventListener('click', () => {
      void callbacks.loadPage(pageNumber).then((page) => {
        vm.confirmLevel(page.level);
        renderSlots(grid, page, callbacks);
      });
    });
    pager.appendChild(button);
  }

  root.append(pager, grid);
  renderSlots(grid, firstPage, callbacks);
}
