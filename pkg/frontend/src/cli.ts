#!/usr/bin/env node
/**
 * render --kind lines|heatmap|tv --in <csv> --out <svg> [--trials <csv>]
 *
 * Reads one of the simulator's CSV artifacts and writes a static SVG figure.
 * With --trials, the lines renderer recomputes mean/stderr from the
 * per-trial results file and warns when the summary disagrees beyond 1e-9.
 * Exits nonzero on a missing file, an empty table, or a schema mismatch.
 */

import { writeFileSync, mkdirSync } from "fs";
import { dirname } from "path";
import { parseArgs } from "util";

import { SchemaError, readCsv } from "./csv.js";
import { renderHeatmapGrid } from "./heatmap.js";
import { recomputeFromTrials, renderLines, summaryMismatch, summarySeries } from "./lines.js";
import { renderTvCurves } from "./tv.js";

const KINDS = ["lines", "heatmap", "tv"] as const;
type Kind = (typeof KINDS)[number];

export function render(kind: Kind, inPath: string, outPath: string,
  trialsPath?: string): string[] {
  const warnings: string[] = [];
  const table = readCsv(inPath);
  let svg: string;
  if (kind === "lines") {
    if (trialsPath) {
      const mismatch = summaryMismatch(summarySeries(table),
        recomputeFromTrials(readCsv(trialsPath)));
      if (mismatch > 1e-9) {
        warnings.push(
          `summary disagrees with per-trial recomputation by ${mismatch.toExponential(2)}`,
        );
      }
    }
    svg = renderLines(table);
  } else if (kind === "heatmap") {
    svg = renderHeatmapGrid(table);
  } else {
    svg = renderTvCurves(table);
  }
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, svg, "utf8");
  return warnings;
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
        trials: { type: "string" },
      },
    });
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  const { kind, in: inPath, out: outPath, trials } = parsed.values;
  if (!kind || !inPath || !outPath || !KINDS.includes(kind as Kind)) {
    console.error(
      "usage: render --kind lines|heatmap|tv --in <csv> --out <svg> [--trials <csv>]",
    );
    return 2;
  }
  try {
    const warnings = render(kind as Kind, inPath, outPath, trials);
    for (const warning of warnings) console.warn(`warning: ${warning}`);
    console.log(`wrote ${outPath}`);
    return 0;
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(`schema error: ${error.message}`);
    } else {
      console.error(`error: ${(error as Error).message}`);
    }
    return 1;
  }
}

const isDirectRun = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
