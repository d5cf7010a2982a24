/**
 * Orthographic camera: world points -> screen pixels plus a view-space
 * depth used for occlusion tests.
 */

export type Vec3 = [number, number, number];

export interface Viewport {
  width: number;
  height: number;
}

export interface ScreenPoints {
  /** pixel x per point */
  x: Float64Array;
  /** pixel y per point (y grows downward, as on a canvas) */
  y: Float64Array;
  /** distance along the view direction; smaller = closer to the camera */
  depth: Float64Array;
}

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function normalize(a: Vec3): Vec3 {
  const n = Math.hypot(a[0], a[1], a[2]);
  if (n === 0) throw new Error("cannot normalize a zero vector");
  return [a[0] / n, a[1] / n, a[2] / n];
}

export class OrthoCamera {
  readonly forward: Vec3;
  readonly right: Vec3;
  readonly up: Vec3;

  constructor(
    readonly eye: Vec3,
    target: Vec3,
    up: Vec3,
    /** pixels per world unit */
    readonly zoom: number,
    readonly viewport: Viewport,
  ) {
    this.forward = normalize(sub(target, eye));
    this.right = normalize(cross(this.forward, up));
    this.up = cross(this.right, this.forward);
  }

  /** Project an interleaved xyz array (n points) to screen space. */
  project(positions: ArrayLike<number>): ScreenPoints {
    const n = Math.floor(positions.length / 3);
    const x = new Float64Array(n);
    const y = new Float64Array(n);
    const depth = new Float64Array(n);
    const cx = this.viewport.width / 2;
    const cy = this.viewport.height / 2;
    for (let i = 0; i < n; i++) {
      const dx = positions[3 * i] - this.eye[0];
      const dy = positions[3 * i + 1] - this.eye[1];
      const dz = positions[3 * i + 2] - this.eye[2];
      const u = dx * this.right[0] + dy * this.right[1] + dz * this.right[2];
      const v = dx * this.up[0] + dy * this.up[1] + dz * this.up[2];
      const w = dx * this.forward[0] + dy * this.forward[1] + dz * this.forward[2];
      x[i] = cx + u * this.zoom;
      y[i] = cy - v * this.zoom;
      depth[i] = w;
    }
    return { x, y, depth };
  }
}
