/** Spatio-temporal heatmaps: time on the horizontal axis, site on the
 * vertical axis, with a labelled colour bar (the journal-style layout). */

import { Grid, WavefrontCrossing } from "./csv.js";
import { ColorMap, makeColorMap } from "./color.js";
import { document, el, fmt, text } from "./svg.js";

export interface HeatmapOptions {
  kind: "diverging" | "sequential";
  colorRange: [number, number];
  title?: string;
  colorLabel?: string;
  wavefronts?: WavefrontCrossing[];
}

const MARGIN = { left: 58, right: 86, top: 34, bottom: 44 };
const CELL_W = 14;
const CELL_H = 18;

export function checkRangeCoversData(grid: Grid, [lo, hi]: [number, number]): void {
  for (const row of grid.values) {
    for (const v of row) {
      if (!Number.isNaN(v) && (v < lo - 1e-12 || v > hi + 1e-12)) {
        throw new Error(`colour range [${lo}, ${hi}] does not cover value ${v}`);
      }
    }
  }
}

function colorBar(x: number, y: number, height: number, map: ColorMap,
                  [lo, hi]: [number, number], label: string): string[] {
  const steps = 48;
  const parts: string[] = [];
  for (let k = 0; k < steps; k += 1) {
    const value = hi - ((k + 0.5) / steps) * (hi - lo);
    parts.push(
      el("rect", {
        x, y: y + (k * height) / steps, width: 12, height: height / steps + 0.5,
        fill: map(value),
      }),
    );
  }
  parts.push(text(x + 16, y + 10, fmt(hi)));
  parts.push(text(x + 16, y + height, fmt(lo)));
  parts.push(text(x + 16, y + height / 2 + 4, label));
  return parts;
}

export function renderHeatmap(grid: Grid, options: HeatmapOptions): string {
  checkRangeCoversData(grid, options.colorRange);
  const map = makeColorMap(options.kind, options.colorRange[0], options.colorRange[1]);
  const nt = grid.times.length;
  const ns = grid.sites.length;
  const width = MARGIN.left + nt * CELL_W + MARGIN.right;
  const height = MARGIN.top + ns * CELL_H + MARGIN.bottom;
  const body: string[] = [];

  for (let ti = 0; ti < nt; ti += 1) {
    for (let si = 0; si < ns; si += 1) {
      body.push(
        el("rect", {
          x: MARGIN.left + ti * CELL_W,
          y: MARGIN.top + si * CELL_H,
          width: CELL_W,
          height: CELL_H,
          "data-cell": `${ti}:${si}`,
          fill: map(grid.values[ti][si]),
        }),
      );
    }
  }

  if (options.wavefronts && options.wavefronts.length > 0) {
    body.push(...wavefrontOverlay(grid, options.wavefronts));
  }

  // axes
  for (let si = 0; si < ns; si += 1) {
    body.push(text(8, MARGIN.top + si * CELL_H + CELL_H / 2 + 4, `q${grid.sites[si]}`));
  }
  const tickCount = Math.min(6, nt);
  for (let k = 0; k < tickCount; k += 1) {
    const ti = Math.round((k * (nt - 1)) / Math.max(1, tickCount - 1));
    body.push(
      text(MARGIN.left + ti * CELL_W + CELL_W / 2 - 8, height - MARGIN.bottom + 16,
           grid.times[ti].toFixed(2)),
    );
  }
  body.push(text(MARGIN.left + (nt * CELL_W) / 2 - 24, height - 10, "time (us)"));
  if (options.title) body.push(text(MARGIN.left, 18, options.title, { "font-size": "13" }));
  body.push(
    ...colorBar(MARGIN.left + nt * CELL_W + 14, MARGIN.top, ns * CELL_H, map,
                options.colorRange, options.colorLabel ?? ""),
  );
  return document(width, height, body);
}

/** Crossing-time polylines: one marker per crossing midpoint on the bond
 * boundary between rows, connected per crossing index to form the arcs. */
function wavefrontOverlay(grid: Grid, crossings: WavefrontCrossing[]): string[] {
  const tMin = grid.times[0];
  const tMax = grid.times[grid.times.length - 1];
  const tSpan = tMax - tMin || 1;
  const plotW = grid.times.length * CELL_W;
  const xOf = (t: number) => MARGIN.left + ((t - tMin) / tSpan) * plotW;
  const yOf = (bond: number) => MARGIN.top + (bond + 1) * CELL_H;

  const byBond = new Map<number, number[]>();
  for (const c of crossings) {
    const mid = (c.tStart + c.tEnd) / 2;
    if (!byBond.has(c.bond)) byBond.set(c.bond, []);
    byBond.get(c.bond)!.push(mid);
  }
  const maxArc = Math.max(0, ...[...byBond.values()].map((list) => list.length));
  const parts: string[] = [];
  for (let arc = 0; arc < maxArc; arc += 1) {
    const points: string[] = [];
    for (const [bond, list] of [...byBond.entries()].sort((a, b) => a[0] - b[0])) {
      if (arc < list.length) points.push(`${fmt(xOf(list[arc]))},${fmt(yOf(bond))}`);
    }
    if (points.length >= 2) {
      parts.push(
        el("polyline", {
          points: points.join(" "),
          fill: "none",
          stroke: "#d62728",
          "stroke-width": "1.5",
          "stroke-dasharray": "4 2",
        }),
      );
    }
  }
  return parts;
}
