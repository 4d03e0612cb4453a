#!/usr/bin/env node
/** render_figs --manifest <run>/manifest.json --out <dir>
 *
 * Reads a run manifest, plans one figure per recognised CSV output and writes
 * deterministic SVG files. Exit code 0 on success, 1 on any error.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { parseManifest } from "./csv.js";
import { renderFigure } from "./figure.js";
import { planFigures } from "./plan.js";

function parseArgs(argv: string[]): { manifest: string; out: string } {
  const args = new Map<string, string>();
  for (let k = 0; k < argv.length; k += 2) {
    if (!argv[k].startsWith("--") || argv[k + 1] === undefined) {
      throw new Error(`usage: render_figs --manifest <path> --out <dir>`);
    }
    args.set(argv[k].slice(2), argv[k + 1]);
  }
  const manifest = args.get("manifest");
  const out = args.get("out");
  if (!manifest || !out) throw new Error("both --manifest and --out are required");
  return { manifest, out };
}

export function main(argv: string[]): number {
  let options: { manifest: string; out: string };
  try {
    options = parseArgs(argv);
    const manifest = parseManifest(readFileSync(options.manifest, "utf-8"));
    const runDir = dirname(options.manifest);
    mkdirSync(options.out, { recursive: true });
    const specs = planFigures(manifest, runDir, options.out);
    for (const spec of specs) {
      writeFileSync(spec.output, renderFigure(spec));
      process.stdout.write(`${spec.output}\n`);
    }
    if (specs.length === 0) {
      process.stderr.write("no renderable outputs in manifest\n");
      return 1;
    }
    return 0;
  } catch (error) {
    process.stderr.write(`${(error as Error).message}\n`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
