/** Quantiles by linear interpolation between order statistics, matching
 * the benchmark aggregator's convention: for sorted x_0..x_{k-1} the
 * q-quantile sits at rank h = (k-1) q, interpolated between floor and
 * ceil. Quartiles of [1,2,3,4] are 1.75 / 2.5 / 3.25. */

export function quantile(values: number[], q: number): number {
  if (values.length === 0) throw new Error("quantile of an empty sample");
  if (q < 0 || q > 1) throw new Error(`quantile fraction ${q} out of [0, 1]`);
  const xs = [...values].sort((a, b) => a - b);
  const h = (xs.length - 1) * q;
  const lo = Math.floor(h);
  const hi = Math.min(lo + 1, xs.length - 1);
  return xs[lo] + (h - lo) * (xs[hi] - xs[lo]);
}

export interface Band {
  q1: number;
  median: number;
  q3: number;
}

export function quartileBand(values: number[]): Band {
  return {
    q1: quantile(values, 0.25),
    median: quantile(values, 0.5),
    q3: quantile(values, 0.75),
  };
}
