export { parseGrid, parseSeries, parseWavefronts, parseSummary, parseManifest, SchemaError } from "./csv.js";
export type { Grid, Series, WavefrontCrossing, Manifest } from "./csv.js";
export { makeColorMap, toHex, MISSING_FILL } from "./color.js";
export { renderHeatmap, checkRangeCoversData } from "./heatmap.js";
export { renderGridLines, renderSeriesLines } from "./lines.js";
export { renderFigure } from "./figure.js";
export type { FigureSpec, FigureKind } from "./figure.js";
export { planFigures } from "./plan.js";
export { parseCellRects } from "./svg.js";
export { main } from "./cli.js";
