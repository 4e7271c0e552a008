/** The two figure kinds: overlaid complete-vs-reduced time series, and the
 * log-infidelity curve.  Pure column transforms of the CSVs: no physics is
 * recomputed here.
 */

import { readFileSync } from "node:fs";
import { parseCsv, type CsvTable } from "./csv.js";
import { renderLineChart } from "./svg.js";

export const LOG_CLIP_FLOOR = 1e-16;

function load(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export interface CompareLabels {
  title: string;
  yLabel: string;
  fullName?: string;
  reducedName?: string;
}

export function plotCompare(
  fullCsvPath: string,
  reducedCsvPath: string,
  fullColumn: string,
  reducedColumn: string,
  labels: CompareLabels,
): string {
  if (!fullColumn || !reducedColumn) {
    throw new Error("empty column selection");
  }
  const full = load(fullCsvPath);
  const reduced = load(reducedCsvPath);
  return renderLineChart({
    title: labels.title,
    xLabel: "t",
    yLabel: labels.yLabel,
    series: [
      {
        name: labels.fullName ?? "complete",
        x: full.column("t"),
        y: full.column(fullColumn),
        color: "#1f77b4",
      },
      {
        name: labels.reducedName ?? "reduced",
        x: reduced.column("t"),
        y: reduced.column(reducedColumn),
        color: "#d62728",
        dash: "6 3",
      },
    ],
  });
}

export function plotLogInfidelity(compareCsvPath: string, title = "log10(1 - F)"): string {
  const table = load(compareCsvPath);
  const t = table.column("t");
  const f = table.column("fidelity");
  const y = f.map((v) => Math.log10(Math.max(1 - v, LOG_CLIP_FLOOR)));
  return renderLineChart({
    title,
    xLabel: "t",
    yLabel: "log10(1 - F)",
    series: [{ name: "infidelity", x: t, y, color: "#2ca02c" }],
  });
}
