/** Deterministic colour maps (pure piecewise-linear anchor interpolation). */

export type Rgb = [number, number, number];

const DIVERGING_ANCHORS: Rgb[] = [
  [5, 48, 97], // deep blue
  [67, 147, 195],
  [247, 247, 247], // white centre
  [214, 96, 77],
  [103, 0, 31], // deep red
];

const SEQUENTIAL_ANCHORS: Rgb[] = [
  [13, 8, 135], // indigo
  [126, 3, 168],
  [204, 71, 120],
  [248, 149, 64],
  [240, 249, 33], // bright yellow
];

export const MISSING_FILL = "#c8c8c8"; // invalidated (NaN) entries

function interpolate(anchors: Rgb[], fraction: number): Rgb {
  const f = Math.min(1, Math.max(0, fraction));
  const scaled = f * (anchors.length - 1);
  const lo = Math.min(anchors.length - 2, Math.floor(scaled));
  const w = scaled - lo;
  const a = anchors[lo];
  const b = anchors[lo + 1];
  return [0, 1, 2].map((k) => Math.round(a[k] + w * (b[k] - a[k]))) as Rgb;
}

export function toHex([r, g, b]: Rgb): string {
  const h = (v: number) => v.toString(16).padStart(2, "0");
  return `#${h(r)}${h(g)}${h(b)}`;
}

export type ColorMap = (value: number) => string;

/** Map [lo, hi] onto the requested palette; NaN yields the missing fill. */
export function makeColorMap(kind: "diverging" | "sequential", lo: number, hi: number): ColorMap {
  const anchors = kind === "diverging" ? DIVERGING_ANCHORS : SEQUENTIAL_ANCHORS;
  const span = hi - lo;
  return (value: number) => {
    if (Number.isNaN(value)) return MISSING_FILL;
    return toHex(interpolate(anchors, span === 0 ? 0.5 : (value - lo) / span));
  };
}
