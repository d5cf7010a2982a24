/**
 * Scalar overlay colors and legend range.
 *
 * Viridis is sampled from a short anchor table with linear interpolation;
 * undefined samples (NaN) render gray so they are visibly "no data".
 */

export type RGB = [number, number, number];

const VIRIDIS: RGB[] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export const UNDEFINED_COLOR: RGB = [128, 128, 128];

/** Sample viridis at t in [0, 1] (clamped). */
export function viridis(t: number): RGB {
  if (Number.isNaN(t)) return [...UNDEFINED_COLOR];
  const s = Math.min(1, Math.max(0, t)) * (VIRIDIS.length - 1);
  const lo = Math.floor(s);
  const hi = Math.min(lo + 1, VIRIDIS.length - 1);
  const f = s - lo;
  return [0, 1, 2].map((c) =>
    Math.round(VIRIDIS[lo][c] + f * (VIRIDIS[hi][c] - VIRIDIS[lo][c])),
  ) as RGB;
}

export interface LegendRange {
  min: number;
  max: number;
}

/** Min/max over the defined (non-NaN) samples; null when nothing is defined. */
export function legendRange(values: ArrayLike<number>): LegendRange | null {
  let min = Infinity;
  let max = -Infinity;
  for (let i = 0; i < values.length; i++) {
    const v = values[i];
    if (Number.isNaN(v)) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  return min <= max ? { min, max } : null;
}

/** Map scalars to interleaved rgb bytes using the given legend range. */
export function colorize(
  values: ArrayLike<number>,
  range: LegendRange,
): Uint8Array {
  const out = new Uint8Array(values.length * 3);
  const span = range.max - range.min;
  for (let i = 0; i < values.length; i++) {
    const v = values[i];
    const rgb = Number.isNaN(v)
      ? UNDEFINED_COLOR
      : viridis(span === 0 ? 0.5 : (v - range.min) / span);
    out[3 * i] = rgb[0];
    out[3 * i + 1] = rgb[1];
    out[3 * i + 2] = rgb[2];
  }
  return out;
}
