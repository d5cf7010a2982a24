/**
 * Browser annotator: load a PLY into a service session, paint region
 * labels with a circular brush, solve a fixture, and view the scalar
 * overlay with a legend.
 */

import { FixtureClient } from "./api.js";
import { brushSelect, Selection } from "./brush.js";
import { OrthoCamera, type Vec3 } from "./camera.js";
import { colorize, legendRange, viridis, type LegendRange } from "./colormap.js";

const REGION_COLORS: [number, number, number][] = [
  [170, 170, 170], // 0: unannotated
  [214, 69, 65], // 1
  [65, 131, 215], // 2
  [38, 166, 91], // 3
  [244, 179, 80], // 4
  [155, 89, 182], // 5
];

interface AppState {
  sessionId: string | null;
  version: number;
  pos: Float32Array | null;
  label: Int32Array | null;
  overlay: Uint8Array | null;
  legend: LegendRange | null;
  fixtureId: string | null;
  selection: Selection;
  region: number;
  brushRadius: number;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function startApp(baseUrl: string): void {
  const client = new FixtureClient(baseUrl);
  const canvas = el<HTMLCanvasElement>("view");
  const ctx = canvas.getContext("2d")!;
  const status = el<HTMLElement>("status");
  const legendBox = el<HTMLElement>("legend");

  const state: AppState = {
    sessionId: null,
    version: 0,
    pos: null,
    label: null,
    overlay: null,
    legend: null,
    fixtureId: null,
    selection: new Selection(),
    region: 1,
    brushRadius: 14,
  };

  function camera(): OrthoCamera {
    // top-down fit of the cloud's xy bounding box
    const pos = state.pos!;
    let [minX, maxX, minY, maxY] = [Infinity, -Infinity, Infinity, -Infinity];
    for (let i = 0; i < pos.length; i += 3) {
      minX = Math.min(minX, pos[i]);
      maxX = Math.max(maxX, pos[i]);
      minY = Math.min(minY, pos[i + 1]);
      maxY = Math.max(maxY, pos[i + 1]);
    }
    const cx = (minX + maxX) / 2;
    const cy = (minY + maxY) / 2;
    const span = Math.max(maxX - minX, maxY - minY) || 1;
    const zoom = (0.9 * Math.min(canvas.width, canvas.height)) / span;
    const eye: Vec3 = [cx, cy, 10 * span];
    return new OrthoCamera(eye, [cx, cy, 0], [0, 1, 0], zoom, {
      width: canvas.width,
      height: canvas.height,
    });
  }

  function draw(): void {
    ctx.fillStyle = "#111";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (!state.pos || !state.label) return;
    const screen = camera().project(state.pos);
    const selected = new Set(state.selection.indices());
    for (let i = 0; i < screen.x.length; i++) {
      let rgb: [number, number, number];
      if (state.overlay) {
        rgb = [state.overlay[3 * i], state.overlay[3 * i + 1], state.overlay[3 * i + 2]];
      } else {
        rgb = REGION_COLORS[state.label[i] % REGION_COLORS.length];
      }
      ctx.fillStyle = selected.has(i)
        ? "#fff"
        : `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
      ctx.fillRect(screen.x[i] - 1.5, screen.y[i] - 1.5, 3, 3);
    }
    drawLegend();
  }

  function drawLegend(): void {
    if (!state.legend) {
      legendBox.textContent = "";
      return;
    }
    const steps = 24;
    const swatches: string[] = [];
    for (let i = 0; i < steps; i++) {
      const [r, g, b] = viridis(i / (steps - 1));
      swatches.push(
        `<span style="background:rgb(${r},${g},${b});width:8px;height:14px;display:inline-block"></span>`,
      );
    }
    legendBox.innerHTML =
      `<span id="legend-min">${state.legend.min.toPrecision(4)}</span> ` +
      swatches.join("") +
      ` <span id="legend-max">${state.legend.max.toPrecision(4)}</span>`;
  }

  canvas.addEventListener("pointermove", (ev) => {
    if (!(ev.buttons & 1) || !state.pos) return;
    const rect = canvas.getBoundingClientRect();
    const picked = brushSelect(
      camera().project(state.pos),
      ev.clientX - rect.left,
      ev.clientY - rect.top,
      state.brushRadius,
      { depthTolerance: 0.05 },
    );
    if (ev.shiftKey) state.selection.remove(picked);
    else state.selection.add(picked);
    draw();
  });

  el<HTMLInputElement>("file").addEventListener("change", async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (!file) return;
    const info = await client.createSession(new Uint8Array(await file.arrayBuffer()));
    state.sessionId = info.sessionId;
    const data = await client.getPoints(info.sessionId, ["pos", "label"]);
    state.pos = data.pos!;
    state.label = data.label!;
    state.version = data.version;
    state.overlay = null;
    state.legend = null;
    status.textContent = `${info.nPoints} points, h=${info.h.toPrecision(3)}`;
    draw();
  });

  el<HTMLInputElement>("region").addEventListener("change", (ev) => {
    state.region = Number((ev.target as HTMLInputElement).value);
  });

  el<HTMLButtonElement>("assign").addEventListener("click", async () => {
    if (!state.sessionId || state.selection.size === 0) return;
    state.version = await client.patchLabels(
      state.sessionId,
      state.selection.indices(),
      state.region,
      state.version,
    );
    const data = await client.getPoints(state.sessionId, ["label"]);
    state.label = data.label!;
    state.selection.clear();
    state.overlay = null;
    state.legend = null;
    status.textContent = `labels v${state.version}`;
    draw();
  });

  el<HTMLButtonElement>("solve").addEventListener("click", async () => {
    if (!state.sessionId) return;
    const spec = JSON.parse(el<HTMLTextAreaElement>("spec").value);
    const result = await client.solve(state.sessionId, spec);
    state.fixtureId = result.fixtureId;
    const scalar = await client.getScalar(state.sessionId, result.fixtureId);
    state.legend = legendRange(scalar);
    state.overlay = state.legend ? colorize(scalar, state.legend) : null;
    status.textContent =
      `fixture ${result.fixtureId.slice(0, 8)}… ` +
      `(${result.cached ? "cached" : result.solveMs.toFixed(0) + " ms"}, ` +
      `${result.undefinedCount} undefined)`;
    draw();
  });

  draw();
}
