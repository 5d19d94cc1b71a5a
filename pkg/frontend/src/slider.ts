/**
 * Discrete five-detent diversity slider with a Set button and a level badge.
 *
 * The badge only ever shows a server-confirmed level: onSet must resolve to
 * the level echoed by the server, and on rejection the slider snaps back.
 * At most one Set request is in flight; further Sets queue behind it and the
 * last requested level wins.
 */

export interface SliderHandle {
  element: HTMLElement;
  input: HTMLInputElement;
  badge: HTMLElement;
  setButton: HTMLButtonElement;
  confirmedLevel(): number;
}

export function createSlider(
  initialLevel: number,
  onSet: (level: number) => Promise<number>,
): SliderHandle {
  let confirmed = initialLevel;
  let inFlight = false;
  let queued: number | null = null;

  const root = document.createElement('div');
  root.className = 'diversity-slider';

  const label = document.createElement('label');
  label.textContent = 'diversity level';
  label.htmlFor = 'diversity-level-input';

  const input = document.createElement('input');
  input.type = 'range';
  input.id = 'diversity-level-input';
  input.min = '1';
  input.max = '5';
  input.step = '1';
  input.value = String(initialLevel);
  input.setAttribute('list', 'diversity-detents');

  const detents = document.createElement('datalist');
  detents.id = 'diversity-detents';
  for (let level = 1; level <= 5; level += 1) {
    const tick = document.createElement('option');
    tick.value = String(level);
    tick.label = String(level);
    detents.appendChild(tick);
  }

  const badge = document.createElement('span');
  badge.className = 'level-badge';
  badge.textContent = String(initialLevel);

  const setButton = document.createElement('button');
  setButton.type = 'button';
  setButton.textContent = 'Set';

  async function dispatch(level: number): Promise<void> {
    inFlight = true;
    try {
      const echoed = await onSet(level);
      confirmed = echoed;
      badge.textContent = String(echoed);
      input.value = String(echoed);
    } catch {
      // Server rejected: snap back to the last confirmed level.
      input.value = String(confirmed);
      badge.textContent = String(confirmed);
    } finally {
      inFlight = false;
      if (queued !== null) {
        const next = queued;
        queued = null;
        if (next !== confirmed) {
          void dispatch(next);
        }
      }
    }
  }

  setButton.addEventListener('click', () => {
    const requested = Number(input.value);
    if (inFlight) {
      queued = requested; // last drag wins once the current Set lands
      return;
    }
    void dispatch(requested);
  });

  root.append(label, input, detents, badge, setButton);
  return {
    element: root,
    input,
    badge,
    setButton,
    confirmedLevel: () => confirmed,
  };
}
