/** Per-qubit line plots with optional shaded standard-error bands. */

import { Grid, Series } from "./csv.js";
import { document, el, fmt, text } from "./svg.js";

const MARGIN = { left: 52, right: 110, top: 26, bottom: 40 };
const PLOT_W = 460;
const PLOT_H = 240;

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

export interface LinesOptions {
  title?: string;
  yLabel?: string;
  yRange?: [number, number];
}

interface Trace {
  name: string;
  values: number[];
  stderr?: number[];
}

function renderTraces(times: number[], traces: Trace[], options: LinesOptions): string {
  let lo = options.yRange ? options.yRange[0] : Infinity;
  let hi = options.yRange ? options.yRange[1] : -Infinity;
  if (!options.yRange) {
    for (const trace of traces) {
      for (let k = 0; k < trace.values.length; k += 1) {
        const err = trace.stderr ? trace.stderr[k] : 0;
        lo = Math.min(lo, trace.values[k] - err);
        hi = Math.max(hi, trace.values[k] + err);
      }
    }
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const tMin = times[0];
  const tSpan = times[times.length - 1] - tMin || 1;
  const xOf = (t: number) => MARGIN.left + ((t - tMin) / tSpan) * PLOT_W;
  const yOf = (v: number) => MARGIN.top + (1 - (v - lo) / (hi - lo)) * PLOT_H;

  const body: string[] = [
    el("rect", {
      x: MARGIN.left, y: MARGIN.top, width: PLOT_W, height: PLOT_H,
      fill: "none", stroke: "#888", "stroke-width": "1",
    }),
  ];
  traces.forEach((trace, index) => {
    const color = PALETTE[index % PALETTE.length];
    if (trace.stderr) {
      const upper = times.map((t, k) => `${fmt(xOf(t))},${fmt(yOf(trace.values[k] + trace.stderr![k]))}`);
      const lower = times
        .map((t, k) => `${fmt(xOf(t))},${fmt(yOf(trace.values[k] - trace.stderr![k]))}`)
        .reverse();
      body.push(
        el("polygon", {
          points: [...upper, ...lower].join(" "),
          fill: color,
          "fill-opacity": "0.18",
          stroke: "none",
          "data-band": trace.name,
        }),
      );
    }
    body.push(
      el("polyline", {
        points: times.map((t, k) => `${fmt(xOf(t))},${fmt(yOf(trace.values[k]))}`).join(" "),
        fill: "none",
        stroke: color,
        "stroke-width": "1.5",
        "data-trace": trace.name,
      }),
    );
    body.push(
      text(MARGIN.left + PLOT_W + 10, MARGIN.top + 14 + index * 14, trace.name,
           { fill: color }),
    );
  });

  for (const frac of [0, 0.5, 1]) {
    const value = lo + frac * (hi - lo);
    body.push(text(8, yOf(value) + 4, fmt(value)));
    const t = tMin + frac * tSpan;
    body.push(text(xOf(t) - 10, MARGIN.top + PLOT_H + 16, t.toFixed(2)));
  }
  body.push(text(MARGIN.left + PLOT_W / 2 - 24, MARGIN.top + PLOT_H + 32, "time (us)"));
  if (options.yLabel) body.push(text(8, 16, options.yLabel));
  if (options.title) body.push(text(MARGIN.left, 16, options.title, { "font-size": "13" }));
  return document(MARGIN.left + PLOT_W + MARGIN.right, MARGIN.top + PLOT_H + MARGIN.bottom, body);
}

export function renderGridLines(grid: Grid, stderr: Grid | undefined, options: LinesOptions): string {
  const traces: Trace[] = grid.sites.map((site, si) => ({
    name: `q${site}`,
    values: grid.values.map((row) => row[si]),
    stderr: stderr ? stderr.values.map((row) => row[si]) : undefined,
  }));
  return renderTraces(grid.times, traces, options);
}

export function renderSeriesLines(series: Series, options: LinesOptions): string {
  const traces: Trace[] = Object.entries(series.columns).map(([name, values]) => ({
    name,
    values,
  }));
  return renderTraces(series.times, traces, options);
}
