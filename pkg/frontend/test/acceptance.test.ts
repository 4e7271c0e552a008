/** Figure regeneration from the shipped CSVs: four SVGs appear, and the
 * log-infidelity curve's post-transient plateau reads back within +-0.5 of
 * -4 on the log10 axis. */

import { existsSync, readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { describe, expect, it } from "vitest";
import { loadManifest, regenerateAll } from "../src/manifest.js";
import { readDataTrack } from "../src/svg.js";

const here = dirname(fileURLToPath(import.meta.url));
const manifestPath = join(here, "..", "manifest.json");

describe("figure regeneration from shipped data", () => {
  it("produces all four figures listed in the manifest", () => {
    const { manifest } = loadManifest(manifestPath);
    expect(manifest.figures).toHaveLength(4);
    const written = regenerateAll(manifestPath);
    expect(written).toHaveLength(4);
    for (const path of written) {
      expect(existsSync(path)).toBe(true);
      const svg = readFileSync(path, "utf8");
      expect(svg).toContain("<svg");
      expect(svg).toContain("data-track");
      expect(svg).toContain("polyline");
    }
  });

  it("fig2 plateau sits within half a decade of -4", () => {
    const written = regenerateAll(manifestPath);
    const fig2 = written.find((p) => p.includes("fig2"));
    expect(fig2).toBeDefined();
    const track = readDataTrack(readFileSync(fig2!, "utf8"));
    const { x, y } = track.series[0];
    const post = y.filter((_, i) => x[i] > 5.0);
    expect(post.length).toBeGreaterThan(10);
    const sorted = [...post].sort((a, b) => a - b);
    const median = sorted[Math.floor(sorted.length / 2)];
    expect(median).toBeGreaterThanOrEqual(-4.5);
    expect(median).toBeLessThanOrEqual(-3.5);
  });

  it("overlay figures carry one complete and one reduced series", () => {
    const written = regenerateAll(manifestPath);
    for (const path of written.filter((p) => !p.includes("fig2"))) {
      const track = readDataTrack(readFileSync(path, "utf8"));
      expect(track.series.map((s) => s.name)).toEqual(["complete", "reduced"]);
      expect(track.series[0].x.length).toBeGreaterThan(10);
    }
  });
});
