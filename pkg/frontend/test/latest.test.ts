import { describe, expect, it } from 'vitest';
import { debounce, latestDispatcher } from '../src/latest.js';

function deferred<T>() {
  let resolve!: (v: T) => void;
  let reject!: (e: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

describe('latestDispatcher', () => {
  it('applies a single settled response', async () => {
    const d = latestDispatcher<string>();
    const applied: string[] = [];
    const one = deferred<string>();
    d.dispatch(one.promise, (v) => applied.push(v));
    one.resolve('a');
    await one.promise;
    expect(applied).toEqual(['a']);
  });

  it('stale responses never overwrite newer ones', async () => {
    const d = latestDispatcher<string>();
    const applied: string[] = [];
    const slow = deferred<string>();
    const fast = deferred<string>();
    d.dispatch(slow.promise, (v) => applied.push(v));
    d.dispatch(fast.promise, (v) => applied.push(v));
    // deliver out of order: newer first, older afterwards
    fast.resolve('new');
    await fast.promise;
    slow.resolve('old');
    await slow.promise;
    await Promise.resolve();
    expect(applied).toEqual(['new']);
  });

  it('invalidate discards anything in flight', async () => {
    const d = latestDispatcher<string>();
    const applied: string[] = [];
    const pending = deferred<string>();
    d.dispatch(pending.promise, (v) => applied.push(v));
    d.invalidate();
    pending.resolve('late');
    await pending.promise;
    await Promise.resolve();
    expect(applied).toEqual([]);
  });

  it('stale rejections are swallowed', async () => {
    const d = latestDispatcher<string>();
    const errors: unknown[] = [];
    const failing = deferred<string>();
    d.dispatch(failing.promise, () => undefined, (e) => errors.push(e));
    d.invalidate();
    failing.reject(new Error('old failure'));
    await Promise.allSettled([failing.promise]);
    expect(errors).toEqual([]);
  });
});

describe('debounce', () => {
  it('keeps at most one pending call and fires the last args', () => {
    const calls: number[] = [];
    const timers: Array<{ cb: () => void; cancelled: boolean }> = [];
    const schedule = (cb: () => void) => {
      const h = { cb, cancelled: false };
      timers.push(h);
      return h as unknown as ReturnType<typeof setTimeout>;
    };
    const cancel = (h: unknown) => {
      (h as { cancelled: boolean }).cancelled = true;
    };
    const fn = debounce((n: number) => calls.push(n), 100, schedule, cancel);
    fn(1);
    fn(2);
    fn(3);
    expect(timers.filter((t) => !t.cancelled)).toHaveLength(1);
    timers.filter((t) => !t.cancelled).forEach((t) => t.cb());
    expect(calls).toEqual([3]);
  });
});
