// Latest-wins async dispatch: every request gets a monotonically
// increasing id and a settled promise only applies if no newer request
// was issued meanwhile. Stale responses can never overwrite newer ones.

export interface LatestDispatcher<T> {
  dispatch(fired: Promise<T>, apply: (value: T) => void, onError?: (err: unknown) => void): number;
  invalidate(): void;
  inFlight(): boolean;
}

export function latestDispatcher<T>(): LatestDispatcher<T> {
  let lastId = 0;
  const active = new Set<number>();

  return {
    dispatch(fired, apply, onError) {
      lastId += 1;
      const thisId = lastId;
      active.add(thisId);
      fired.then(
        (value) => {
          active.delete(thisId);
          if (thisId === lastId) {
            apply(value);
          }
        },
        (err) => {
          active.delete(thisId);
          if (thisId === lastId) {
            onError?.(err);
          }
        },
      );
      return thisId;
    },
    invalidate() {
      lastId += 1;
    },
    inFlight() {
      return active.size > 0;
    },
  };
}

// Trailing-edge debounce used for live mode; at most one timer pending.
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  schedule: (cb: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
  cancel: (h: ReturnType<typeof setTimeout>) => void = clearTimeout,
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) {
      cancel(handle);
    }
    handle = schedule(() => {
      handle = undefined;
      fn(...args);
    }, waitMs);
  };
}
