/** Tiny deterministic SVG builder: fixed precision, no timestamps, attribute
 * order given by the caller, so identical inputs yield identical bytes. */

export function fmt(value: number): string {
  // fixed formatting keeps output byte-stable across runs
  const s = value.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function el(tag: string, attrs: Record<string, string | number>, body = ""): string {
  const rendered = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  return body === "" ? `<${tag} ${rendered}/>` : `<${tag} ${rendered}>${body}</${tag}>`;
}

export function text(x: number, y: number, body: string, attrs: Record<string, string> = {}): string {
  return el("text", { x, y, "font-family": "sans-serif", "font-size": "11", fill: "#222", ...attrs }, body);
}

export function document(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

/** Round-trip helper for tests: every rect with a data-cell marker. */
export interface CellRect {
  time: number;
  site: number;
  fill: string;
}

export function parseCellRects(svg: string): CellRect[] {
  const out: CellRect[] = [];
  const pattern = /<rect [^>]*data-cell="(\d+):(\d+)"[^>]*fill="([^"]+)"[^>]*\/>/g;
  let match: RegExpExecArray | null;
  while ((match = pattern.exec(svg)) !== null) {
    out.push({ time: Number(match[1]), site: Number(match[2]), fill: match[3] });
  }
  return out;
}
