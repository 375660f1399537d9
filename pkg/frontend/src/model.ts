/**
 * Masked-input evaluation: the server owns the construction of the model
 * input from a subset mask. Member positions take the foreground vector x,
 * everything else falls back to the baseline y, and the model sees only
 * the blended vector.
 */

export type Model = (input: number[]) => number;

export interface ServerConfig {
  n: number;
  x: number[]; // foreground input, length n
  y: number[]; // baseline, length n
  model: Model;
}

/** Blend x over y according to a '0'/'1' mask string (char j = player j+1). */
export function maskInput(mask: string, x: number[], y: number[]): number[] {
  const out = new Array<number>(mask.length);
  for (let i = 0; i < mask.length; i++) {
    out[i] = mask[i] === "1" ? x[i] : y[i];
  }
  return out;
}

/** Demo linear model: intercept 1/4 plus weight (i+1)/2 per coordinate. */
export function linearDemo(n: number): Model {
  return (input) => {
    let acc = 0.25;
    for (let i = 0; i < n; i++) {
      acc += ((i + 1) / 2) * input[i];
    }
    return acc;
  };
}

/** Demo quadratic model: the linear demo plus a squared-sum interaction. */
export function quadraticDemo(n: number): Model {
  const linear = linearDemo(n);
  return (input) => {
    let total = 0;
    for (let i = 0; i < n; i++) {
      total += input[i];
    }
    return linear(input) + 0.25 * total * total;
  };
}

export function defaultConfig(
  n: number,
  modelName: "linear" | "quadratic" = "linear",
  x?: number[],
  y?: number[]
): ServerConfig {
  const fg = x ?? new Array(n).fill(1);
  const bg = y ?? new Array(n).fill(0);
  if (fg.length !== n || bg.length !== n) {
    throw new Error(`input and baseline must have length ${n}`);
  }
  const model = modelName === "quadratic" ? quadraticDemo(n) : linearDemo(n);
  return { n, x: fg, y: bg, model };
}
