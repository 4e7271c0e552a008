/** Manifest listing the figures to regenerate, with paths resolved relative
 * to the manifest file. */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { plotCompare, plotLogInfidelity, type CompareLabels } from "./figures.js";

export interface CompareFigure {
  name: string;
  kind: "compare";
  full_csv: string;
  reduced_csv: string;
  full_column: string;
  reduced_column: string;
  labels: CompareLabels;
  output: string;
}

export interface LogInfidelityFigure {
  name: string;
  kind: "log_infidelity";
  compare_csv: string;
  title?: string;
  output: string;
}

export type FigureSpec = CompareFigure | LogInfidelityFigure;

export interface Manifest {
  figures: FigureSpec[];
}

export function loadManifest(path: string): { manifest: Manifest; baseDir: string } {
  const manifest = JSON.parse(readFileSync(path, "utf8")) as Manifest;
  if (!Array.isArray(manifest.figures) || manifest.figures.length === 0) {
    throw new Error(`${path}: manifest needs a non-empty "figures" array`);
  }
  for (const fig of manifest.figures) {
    if (fig.kind !== "compare" && fig.kind !== "log_infidelity") {
      throw new Error(`${path}: unknown figure kind "${(fig as { kind: string }).kind}"`);
    }
    if (!fig.output) throw new Error(`${path}: figure "${fig.name}" missing output`);
  }
  return { manifest, baseDir: dirname(resolve(path)) };
}

export function renderFigure(fig: FigureSpec, baseDir: string): string {
  const at = (p: string) => resolve(baseDir, p);
  if (fig.kind === "compare") {
    return plotCompare(
      at(fig.full_csv),
      at(fig.reduced_csv),
      fig.full_column,
      fig.reduced_column,
      fig.labels,
    );
  }
  return plotLogInfidelity(at(fig.compare_csv), fig.title);
}

export function regenerateAll(manifestPath: string): string[] {
  const { manifest, baseDir } = loadManifest(manifestPath);
  const written: string[] = [];
  for (const fig of manifest.figures) {
    const svg = renderFigure(fig, baseDir);
    const outPath = resolve(baseDir, fig.output);
    mkdirSync(dirname(outPath), { recursive: true });
    writeFileSync(outPath, svg);
    written.push(outPath);
  }
  return written;
}
