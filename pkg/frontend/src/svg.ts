/** Minimal SVG line charts.
 *
 * Each emitted file carries a machine-readable copy of the plotted points in
 * a <metadata id="data-track"> element, so downstream checks can read the
 * figure's data back without re-parsing coordinates.
 */

export interface Series {
  name: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
}

const MARGIN = { left: 64, right: 16, top: 36, bottom: 46 };

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(hi > lo)) {
    // degenerate (constant) series: open a symmetric window around it
    const pad = Math.max(Math.abs(lo) * 0.1, 1e-3);
    return [lo - pad, hi + pad];
  }
  return [lo, hi];
}

function ticks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => span / c <= count) ?? candidates[candidates.length - 1];
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Math.round(v * 1e6) / 1e6);
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderLineChart(spec: ChartSpec): string {
  const width = spec.width ?? 640;
  const height = spec.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const allX = spec.series.flatMap((s) => s.x);
  const allY = spec.series.flatMap((s) => s.y);
  if (allX.length === 0) throw new Error("nothing to plot");
  const [x0, x1] = extent(allX);
  const [y0, y1] = extent(allY);
  const sx = (v: number) => MARGIN.left + ((v - x0) / (x1 - x0)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  const track = {
    series: spec.series.map((s) => ({ name: s.name, x: s.x, y: s.y })),
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
  };
  parts.push(`<metadata id="data-track">${esc(JSON.stringify(track))}</metadata>`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">${esc(spec.title)}</text>`,
  );

  for (const tx of ticks(x0, x1)) {
    const px = sx(tx);
    parts.push(`<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${MARGIN.top + plotH}" stroke="#ddd"/>`);
    parts.push(`<text x="${px}" y="${MARGIN.top + plotH + 16}" text-anchor="middle">${fmt(tx)}</text>`);
  }
  for (const ty of ticks(y0, y1)) {
    const py = sy(ty);
    parts.push(`<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + plotW}" y2="${py}" stroke="#ddd"/>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${py + 4}" text-anchor="end">${fmt(ty)}</text>`);
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 8}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
  );

  for (const s of spec.series) {
    if (s.x.length !== s.y.length) {
      throw new Error(`series "${s.name}": x and y lengths differ`);
    }
    const pts = s.x.map((v, i) => `${sx(v).toFixed(2)},${sy(s.y[i]).toFixed(2)}`).join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.5"${dash} data-series="${esc(s.name)}"/>`,
    );
  }

  spec.series.forEach((s, i) => {
    const lx = MARGIN.left + 10;
    const ly = MARGIN.top + 14 + 16 * i;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 24}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.5"${dash}/>`);
    parts.push(`<text x="${lx + 30}" y="${ly}">${esc(s.name)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}

/** The machine-readable points embedded by renderLineChart. */
export function readDataTrack(svg: string): {
  series: { name: string; x: number[]; y: number[] }[];
  xLabel: string;
  yLabel: string;
} {
  const m = svg.match(/<metadata id="data-track">([\s\S]*?)<\/metadata>/);
  if (!m) throw new Error("no data track in SVG");
  const unescaped = m[1].replace(/&lt;/g, "<").replace(/&gt;/g, ">").replace(/&amp;/g, "&");
  return JSON.parse(unescaped);
}
