import { describe, expect, it, vi } from 'vitest';

import { createSlider } from '../src/slider';

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

describe('diversity slider', () => {
  it('renders five detents and initializes at the session level', () => {
    const slider = createSlider(3, async (level) => level);
    expect(slider.input.min).toBe('1');
    expect(slider.input.max).toBe('5');
    expect(slider.input.step).toBe('1');
    expect(slider.input.value).toBe('3');
    expect(slider.badge.textContent).toBe('3');
    const detents = slider.element.querySelectorAll('datalist option');
    expect(detents).toHaveLength(5);
    expect(slider.element.querySelector('label')?.textContent).toBe('diversity level');
  });

  it('updates the badge only with the server-echoed level after Set', async () => {
    const onSet = vi.fn(async (_level: number) => 5);
    const slider = createSlider(3, onSet);
    slider.input.value = '4'; // user drags to 4, server echoes 5
    slider.setButton.click();
    await flush();
    expect(onSet).toHaveBeenCalledWith(4);
    expect(slider.badge.textContent).toBe('5');
    expect(slider.input.value).toBe('5');
    expect(slider.confirmedLevel()).toBe(5);
  });

  it('snaps back to the confirmed level when the server rejects', async () => {
    const slider = createSlider(3, async () => {
      throw new Error('403');
    });
    slider.input.value = '1';
    slider.setButton.click();
    await flush();
    expect(slider.input.value).toBe('3');
    expect(slider.badge.textContent).toBe('3');
    expect(slider.confirmedLevel()).toBe(3);
  });

  it('queues a second Set behind an in-flight one; last level wins', async () => {
    const resolvers: Array<(level: number) => void> = [];
    const onSet = vi.fn(
      (level: number) =>
        new Promise<number>((resolve) => {
          resolvers.push(() => resolve(level));
        }),
    );
    const slider = createSlider(3, onSet);

    slider.input.value = '2';
    slider.setButton.click(); // in flight
    slider.input.value = '5';
    slider.setButton.click(); // queued
    slider.input.value = '4';
    slider.setButton.click(); // replaces the queued request
    expect(onSet).toHaveBeenCalledTimes(1);

    resolvers[0](2);
    await flush();
    expect(onSet).toHaveBeenCalledTimes(2);
    expect(onSet).toHaveBeenLastCalledWith(4);
    resolvers[1](4);
    await flush();
    expect(slider.badge.textContent).toBe('4');
    expect(slider.confirmedLevel()).toBe(4);
  });

  it('skips the queued Set when it matches the confirmed level', async () => {
    const resolvers: Array<() => void> = [];
    const onSet = vi.fn(
      (level: number) =>
        new Promise<number>((resolve) => {
          resolvers.push(() => resolve(level));
        }),
    );
    const slider = createSlider(3, onSet);
    slider.input.value = '5';
    slider.setButton.click();
    slider.input.value = '5';
    slider.setButton.click(); // queued, but will match the confirmed level
    resolvers[0]();
    await flush();
    expect(onSet).toHaveBeenCalledTimes(1);
    expect(slider.confirmedLevel()).toBe(5);
  });
});
