import { regenerateAll } from "./manifest.js";

const manifestPath = process.argv[2];
if (!manifestPath) {
  console.error("usage: node driver.js MANIFEST.json");
  process.exit(2);
}
try {
  for (const path of regenerateAll(manifestPath)) {
    console.log(`wrote ${path}`);
  }
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(2);
}
