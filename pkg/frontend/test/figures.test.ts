import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { LOG_CLIP_FLOOR, plotCompare, plotLogInfidelity } from "../src/figures.js";
import { readDataTrack } from "../src/svg.js";

function writeCsv(dir: string, name: string, header: string[], rows: number[][]): string {
  const path = join(dir, name);
  const text = [header.join(","), ...rows.map((r) => r.join(","))].join("\n");
  writeFileSync(path, text);
  return path;
}

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "figtest-"));
}

describe("plotCompare", () => {
  it("overlays the two series and embeds the data track", () => {
    const dir = tempDir();
    const full = writeCsv(dir, "full.csv", ["t", "sigma_z"], [[0, 0.6], [1, 0.7], [2, 0.72]]);
    const reduced = writeCsv(dir, "reduced.csv", ["t", "sigma_z_s"], [[0, 1.0], [1, 0.74], [2, 0.73]]);
    const svg = plotCompare(full, reduced, "sigma_z", "sigma_z_s", {
      title: "test",
      yLabel: "<sigma_z>",
    });
    expect(svg).toContain("<svg");
    expect(svg).toContain("polyline");
    const track = readDataTrack(svg);
    expect(track.series.map((s) => s.name)).toEqual(["complete", "reduced"]);
    expect(track.series[0].y).toEqual([0.6, 0.7, 0.72]);
    expect(track.series[1].y).toEqual([1.0, 0.74, 0.73]);
  });

  it("rejects an empty column selection", () => {
    const dir = tempDir();
    const full = writeCsv(dir, "full.csv", ["t", "a"], [[0, 1], [1, 2]]);
    expect(() => plotCompare(full, full, "", "a", { title: "t", yLabel: "y" }))
      .toThrow(/empty column/);
  });

  it("rejects a column that is not in the CSV", () => {
    const dir = tempDir();
    const full = writeCsv(dir, "full.csv", ["t", "a"], [[0, 1], [1, 2]]);
    expect(() => plotCompare(full, full, "missing", "a", { title: "t", yLabel: "y" }))
      .toThrow(/not found/);
  });
});

describe("plotLogInfidelity", () => {
  it("draws a flat floor line for constant fidelity 1", () => {
    const dir = tempDir();
    const csv = writeCsv(dir, "cmp.csv", ["t", "fidelity"], [[0, 1], [1, 1], [2, 1]]);
    const track = readDataTrack(plotLogInfidelity(csv));
    const expected = Math.log10(LOG_CLIP_FLOOR);
    for (const y of track.series[0].y) expect(y).toBe(expected);
  });

  it("maps 1-F = 1e-4 to a horizontal line at -4", () => {
    const dir = tempDir();
    const rows = [0, 1, 2, 3].map((t) => [t, 1 - 1e-4]);
    const csv = writeCsv(dir, "cmp.csv", ["t", "fidelity"], rows);
    const track = readDataTrack(plotLogInfidelity(csv));
    for (const y of track.series[0].y) expect(y).toBeCloseTo(-4, 8);
  });

  it("only transforms the column: y = log10(max(1-F, floor)) exactly", () => {
    const dir = tempDir();
    const fs = [0.9, 0.99, 0.9999, 1.0];
    const csv = writeCsv(dir, "cmp.csv", ["t", "fidelity"], fs.map((f, i) => [i, f]));
    const track = readDataTrack(plotLogInfidelity(csv));
    const expected = fs.map((f) => Math.log10(Math.max(1 - f, LOG_CLIP_FLOOR)));
    expect(track.series[0].y).toEqual(expected);
  });
});
