/** Parsers for the simulator's CSV and manifest outputs. */

export interface Grid {
  times: number[];
  sites: number[];
  /** values[t][s]; NaN marks entries invalidated upstream */
  values: number[][];
}

export interface Series {
  times: number[];
  columns: Record<string, number[]>;
}

export interface WavefrontCrossing {
  bond: number;
  tStart: number;
  tEnd: number;
}

export interface Manifest {
  tool: string;
  version: string;
  kind: string;
  outputs: { file: string; sha256: string }[];
}

export class SchemaError extends Error {}

function rows(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0)
    .map((line) => line.split(","));
}

/** Grid CSV: header "t_us,site_<i>,...", one row per time sample. */
export function parseGrid(text: string): Grid {
  const table = rows(text);
  if (table.length < 2) throw new SchemaError("grid CSV needs a header and at least one row");
  const header = table[0];
  if (header[0] !== "t_us" || header.length < 2 || header.slice(1).some((c) => !c.startsWith("site_"))) {
    throw new SchemaError(`not a grid CSV header: ${header.join(",")}`);
  }
  const sites = header.slice(1).map((c) => {
    const idx = Number(c.slice("site_".length));
    if (!Number.isInteger(idx)) throw new SchemaError(`bad site column ${c}`);
    return idx;
  });
  const times: number[] = [];
  const values: number[][] = [];
  for (const row of table.slice(1)) {
    if (row.length !== header.length) {
      throw new SchemaError(`row has ${row.length} fields, expected ${header.length}`);
    }
    times.push(Number(row[0]));
    values.push(row.slice(1).map(Number));
  }
  return { times, sites, values };
}

/** Series CSV: header "t_us,<name>,<name>,...". */
export function parseSeries(text: string): Series {
  const table = rows(text);
  if (table.length < 2 || table[0][0] !== "t_us") {
    throw new SchemaError("not a series CSV");
  }
  const names = table[0].slice(1);
  const times: number[] = [];
  const columns: Record<string, number[]> = Object.fromEntries(names.map((n) => [n, []]));
  for (const row of table.slice(1)) {
    times.push(Number(row[0]));
    names.forEach((name, k) => columns[name].push(Number(row[k + 1])));
  }
  return { times, columns };
}

/** Wavefront CSV: "bond,t_start_us,t_end_us" rows from the crossing detector. */
export function parseWavefronts(text: string): WavefrontCrossing[] {
  const table = rows(text);
  if (table.length === 0 || table[0].join(",") !== "bond,t_start_us,t_end_us") {
    throw new SchemaError("not a wavefronts CSV");
  }
  return table.slice(1).map((row) => ({
    bond: Number(row[0]),
    tStart: Number(row[1]),
    tEnd: Number(row[2]),
  }));
}

/** Sweep summary CSV: "value,<metric>,...". */
export function parseSummary(text: string): { metricNames: string[]; rows: number[][] } {
  const table = rows(text);
  if (table.length < 2 || table[0][0] !== "value") throw new SchemaError("not a summary CSV");
  return {
    metricNames: table[0].slice(1),
    rows: table.slice(1).map((row) => row.map(Number)),
  };
}

export function parseManifest(text: string): Manifest {
  const data = JSON.parse(text);
  if (!data || !Array.isArray(data.outputs)) throw new SchemaError("not a run manifest");
  return data as Manifest;
}
