/** Figure specs and the dispatch from input CSVs to rendered SVG. */

import { readFileSync } from "node:fs";

import { parseGrid, parseSeries, parseSummary, parseWavefronts, SchemaError } from "./csv.js";
import { renderHeatmap } from "./heatmap.js";
import { renderGridLines, renderSeriesLines } from "./lines.js";
import { document as svgDocument, el, fmt, text } from "./svg.js";

export type FigureKind = "heatmap" | "lines" | "wavefront_overlay" | "sweep_panel";

export interface FigureSpec {
  /** primary CSV, plus optional companions (stderr grid, wavefront table) */
  inputs: string[];
  kind: FigureKind;
  palette?: "diverging" | "sequential";
  colorRange?: [number, number];
  title?: string;
  colorLabel?: string;
  yLabel?: string;
  output: string;
}

function dataRange(values: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of values) {
    for (const v of row) {
      if (!Number.isNaN(v)) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  return lo < hi ? [lo, hi] : [lo - 0.5, hi + 0.5];
}

function read(path: string): string {
  try {
    return readFileSync(path, "utf-8");
  } catch (error) {
    throw new SchemaError(`cannot read input ${path}: ${(error as Error).message}`);
  }
}

/** Render one figure spec to SVG text (the caller writes the file). */
export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "heatmap":
    case "wavefront_overlay": {
      const grid = parseGrid(read(spec.inputs[0]));
      const wavefronts =
        spec.kind === "wavefront_overlay" && spec.inputs[1]
          ? parseWavefronts(read(spec.inputs[1]))
          : undefined;
      return renderHeatmap(grid, {
        kind: spec.palette ?? "sequential",
        colorRange: spec.colorRange ?? dataRange(grid.values),
        title: spec.title,
        colorLabel: spec.colorLabel,
        wavefronts,
      });
    }
    case "lines": {
      const main = read(spec.inputs[0]);
      try {
        const grid = parseGrid(main);
        const stderr = spec.inputs[1] ? parseGrid(read(spec.inputs[1])) : undefined;
        return renderGridLines(grid, stderr, { title: spec.title, yLabel: spec.yLabel });
      } catch (error) {
        if (!(error instanceof SchemaError)) throw error;
        return renderSeriesLines(parseSeries(main), { title: spec.title, yLabel: spec.yLabel });
      }
    }
    case "sweep_panel": {
      return renderSweepPanel(read(spec.inputs[0]), spec.title);
    }
    default:
      throw new SchemaError(`unknown figure kind ${(spec as FigureSpec).kind}`);
  }
}

/** Summary metrics versus the swept value, one marker series per metric. */
function renderSweepPanel(summaryText: string, title?: string): string {
  const { metricNames, rows } = parseSummary(summaryText);
  const margin = { left: 56, right: 130, top: 26, bottom: 40 };
  const plotW = 320;
  const plotH = 220;
  const xs = rows.map((r) => r[0]);
  const xLo = Math.min(...xs);
  const xSpan = Math.max(...xs) - xLo || 1;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const row of rows) {
    for (const v of row.slice(1)) {
      yLo = Math.min(yLo, v);
      yHi = Math.max(yHi, v);
    }
  }
  if (!(yHi > yLo)) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const xOf = (x: number) => margin.left + ((x - xLo) / xSpan) * plotW;
  const yOf = (y: number) => margin.top + (1 - (y - yLo) / (yHi - yLo)) * plotH;
  const palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
  const body: string[] = [
    el("rect", { x: margin.left, y: margin.top, width: plotW, height: plotH,
                 fill: "none", stroke: "#888", "stroke-width": "1" }),
  ];
  metricNames.forEach((name, mi) => {
    const color = palette[mi % palette.length];
    const points = rows.map((row) => `${fmt(xOf(row[0]))},${fmt(yOf(row[mi + 1]))}`);
    body.push(el("polyline", { points: points.join(" "), fill: "none", stroke: color,
                               "stroke-width": "1.5", "data-metric": name }));
    for (const row of rows) {
      body.push(el("circle", { cx: xOf(row[0]), cy: yOf(row[mi + 1]), r: 3, fill: color }));
    }
    body.push(text(margin.left + plotW + 10, margin.top + 14 + mi * 14, name, { fill: color }));
  });
  for (const row of rows) {
    body.push(text(xOf(row[0]) - 8, margin.top + plotH + 16, String(row[0])));
  }
  body.push(text(8, yOf(yLo) + 4, fmt(yLo)));
  body.push(text(8, yOf(yHi) + 4, fmt(yHi)));
  body.push(text(margin.left + plotW / 2 - 30, margin.top + plotH + 32, "axis value"));
  if (title) body.push(text(margin.left, 16, title, { "font-size": "13" }));
  return svgDocument(margin.left + plotW + margin.right, margin.top + plotH + margin.bottom, body);
}
