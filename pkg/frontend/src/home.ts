import { createMovieCard, type CardActions } from './movieCard';
import type { ViewModel } from './state';
import type { HomePayload } from './types';

export interface HomeCallbacks extends CardActions {
  onOpenBroadPage(): void;
}

function carousel(
  heading: HTMLElement,
  movies: Parameters<typeof createMovieCard>[0][],
  actions: CardActions,
  className: string,
): HTMLElement {
  const section = document.createElement('section');
  section.className = className;
  const row = document.createElement('div');
  row.className = 'carousel-row';
  for (const movie of movies) {
    row.appendChild(createMovieCard(movie, actions));
  }
  section.append(heading, row);
  return section;
}

/**
 * Home page: the top-picks carousel for everyone; the broad-recommendations
 * carousel only for the two treatment interfaces, with the adjust affordance
 * and level badge only for the slider interface.
 */
export function renderHome(
  root: HTMLElement,
  vm: ViewModel,
  payload: HomePayload,
  callbacks: HomeCallbacks,
): void {
  root.textContent = '';
  vm.confirmLevel(payload.level);

  if (vm.hasBroadSurface && payload.broad) {
    const heading = document.createElement('h2');
    const headerLink = document.createElement('a');
    headerLink.href = '#';
    headerLink.className = 'broad-header';
    headerLink.textContent = 'Broad Recommendations';
    headerLink.addEventListener('click', (event) => {
      event.preventDefault();
      callbacks.onOpenBroadPage();
    });
    heading.appendChild(headerLink);

    if (vm.hasSlider) {
      const badge = document.createElement('span');
      badge.className = 'level-badge';
      badge.textContent = String(vm.level);
      const adjust = document.createElement('button');
      adjust.type = 'button';
      adjust.className = 'adjust-button';
      adjust.textContent = 'Adjust';
      adjust.addEventListener('click', () => callbacks.onOpenBroadPage());
      heading.append(badge, adjust);
    }

    root.appendChild(
      carousel(heading, payload.broad.slots, callbacks, 'broad-carousel'),
    );
  }

  const picksHeading = document.createElement('h2');
  picksHeading.textContent = 'Top Picks';
  root.appendChild(carousel(picksHeading, payload.top_picks, callbacks, 'top-picks'));
}
