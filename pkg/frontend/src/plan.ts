/** Default figure plan for a run directory: pick a spec per manifest output. */

import { existsSync } from "node:fs";
import { join } from "node:path";

import { Manifest } from "./csv.js";
import { FigureSpec } from "./figure.js";

const QUANTITY_STYLE: Record<string, Partial<FigureSpec>> = {
  otoc: { palette: "diverging", colorRange: [-1, 1], colorLabel: "F_ij(t)" },
  mitigated: { palette: "diverging", colorRange: [-1, 1], colorLabel: "F_ij(t)" },
  reference_pxp: { palette: "diverging", colorRange: [-1, 1], colorLabel: "F_ij(t)" },
  holevo: { palette: "sequential", colorRange: [0, 1], colorLabel: "X_j(t)" },
  trace_distance: { palette: "sequential", colorRange: [0, 1], colorLabel: "D_j(t)" },
  populations: { palette: "sequential", colorRange: [0, 1], colorLabel: "P_i(up)" },
};

function styleFor(stem: string): Partial<FigureSpec> | undefined {
  for (const [key, style] of Object.entries(QUANTITY_STYLE)) {
    if (stem === key || stem.endsWith(`_${key}`)) return style;
  }
  return undefined;
}

/** One spec per recognised output file; unknown files are skipped. */
export function planFigures(manifest: Manifest, runDir: string, outDir: string): FigureSpec[] {
  const specs: FigureSpec[] = [];
  const files = manifest.outputs.map((o) => o.file);
  for (const file of files) {
    if (!file.endsWith(".csv") || file.endsWith("_stderr.csv")) continue;
    const stem = file.slice(0, -4);
    const path = join(runDir, file);
    if (stem === "wavefronts") continue; // consumed as an overlay companion
    if (stem === "sweep_summary") {
      specs.push({ inputs: [path], kind: "sweep_panel", title: stem, output: join(outDir, `${stem}.svg`) });
      continue;
    }
    if (stem === "revival" || stem === "reversal_fidelity" || stem.endsWith("_reversal")) {
      specs.push({ inputs: [path], kind: "lines", title: stem, output: join(outDir, `${stem}.svg`) });
      continue;
    }
    const style = styleFor(stem);
    if (!style) continue;
    const wavefrontPath = join(runDir, "wavefronts.csv");
    const useOverlay = stem === "populations" && files.includes("wavefronts.csv") && existsSync(wavefrontPath);
    specs.push({
      inputs: useOverlay ? [path, wavefrontPath] : [path],
      kind: useOverlay ? "wavefront_overlay" : "heatmap",
      title: stem,
      output: join(outDir, `${stem}.svg`),
      ...style,
    });
    const stderrFile = `${stem}_stderr.csv`;
    if (files.includes(stderrFile)) {
      specs.push({
        inputs: [path, join(runDir, stderrFile)],
        kind: "lines",
        title: `${stem} (mean with standard error)`,
        yLabel: style.colorLabel,
        output: join(outDir, `${stem}_lines.svg`),
      });
    }
  }
  return specs;
}
