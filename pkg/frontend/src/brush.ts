/**
 * Screen-space circular brush over projected points.
 *
 * A point is selected when its pixel lies inside the brush circle and,
 * if occlusion is enabled, when it is not hidden behind nearer geometry:
 * only points within `depthTolerance` of the closest point under the
 * brush are kept, so painting the front of an object never leaks labels
 * onto its back side.
 */

import type { ScreenPoints } from "./camera.js";

export interface BrushOptions {
  /** keep only points within this depth of the nearest hit; omit to select through */
  depthTolerance?: number;
}

export function brushSelect(
  screen: ScreenPoints,
  centerX: number,
  centerY: number,
  radius: number,
  options: BrushOptions = {},
): number[] {
  const r2 = radius * radius;
  const hits: number[] = [];
  let nearest = Infinity;
  for (let i = 0; i < screen.x.length; i++) {
    const dx = screen.x[i] - centerX;
    const dy = screen.y[i] - centerY;
    if (dx * dx + dy * dy <= r2) {
      hits.push(i);
      if (screen.depth[i] < nearest) nearest = screen.depth[i];
    }
  }
  const tol = options.depthTolerance;
  if (tol === undefined || hits.length === 0) return hits;
  return hits.filter((i) => screen.depth[i] <= nearest + tol);
}

/** Accumulate brush strokes into one deduplicated, sorted selection. */
export class Selection {
  private picked = new Set<number>();

  add(indices: number[]): void {
    for (const i of indices) this.picked.add(i);
  }

  remove(indices: number[]): void {
    for (const i of indices) this.picked.delete(i);
  }

  clear(): void {
    this.picked.clear();
  }

  get size(): number {
    return this.picked.size;
  }

  indices(): number[] {
    return [...this.picked].sort((a, b) => a - b);
  }
}
