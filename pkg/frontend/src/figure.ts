/**
 * Deterministic SVG line charts: one polyline per series, shaded
 * standard-error bands, tick marks chosen on round steps. No timestamps,
 * no randomness; identical input yields byte-identical output.
 */

import { Series } from "./csv";

export interface FigureOptions {
  title?: string;
  xLabel?: string;
  yLabel?: string;
  width?: number;
  height?: number;
}

const PALETTE = ["#c0392b", "#2c3e50", "#2980b9", "#27ae60", "#8e44ad", "#d68910"];
const MARGIN = { top: 42, right: 24, bottom: 52, left: 64 };

function fmt(v: number): string {
  // fixed-precision coordinates keep the output stable across platforms
  return v.toFixed(2).replace(/\.00$/, "");
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.5 : 1;
    lo -= pad;
    hi += pad;
  }
  const rawStep = (hi - lo) / (count - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => s >= rawStep) ?? candidates[candidates.length - 1];
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function tickLabel(v: number): string {
  const rounded = Math.round(v * 1e6) / 1e6;
  return String(rounded);
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderFigure(series: Series[], options: FigureOptions = {}): string {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error("nothing to plot: no series with points");
  }
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const los = series.flatMap((s) => s.points.map((p) => p.mean - p.stderr));
  const his = series.flatMap((s) => s.points.map((p) => p.mean + p.stderr));
  let xMin = Math.min(...xs);
  let xMax = Math.max(...xs);
  if (xMax === xMin) {
    xMin -= 1;
    xMax += 1;
  }
  let yMin = Math.min(...los);
  let yMax = Math.max(...his);
  const yPad = (yMax - yMin || 1) * 0.08;
  yMin -= yPad;
  yMax += yPad;

  const sx = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const sy = (y: number) => MARGIN.top + (1 - (y - yMin) / (yMax - yMin)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);

  // axes frame and ticks
  const xTicks = niceTicks(xMin, xMax);
  const yTicks = niceTicks(yMin, yMax);
  for (const t of yTicks) {
    const y = sy(t);
    parts.push(
      `<line x1="${fmt(MARGIN.left)}" y1="${fmt(y)}" x2="${fmt(width - MARGIN.right)}" ` +
        `y2="${fmt(y)}" stroke="#dddddd" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${fmt(MARGIN.left - 8)}" y="${fmt(y + 4)}" text-anchor="end" ` +
        `font-size="11" fill="#333333">${tickLabel(t)}</text>`
    );
  }
  for (const t of xTicks) {
    const x = sx(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(height - MARGIN.bottom)}" x2="${fmt(x)}" ` +
        `y2="${fmt(height - MARGIN.bottom + 5)}" stroke="#333333" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${fmt(x)}" y="${fmt(height - MARGIN.bottom + 18)}" text-anchor="middle" ` +
        `font-size="11" fill="#333333">${tickLabel(t)}</text>`
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333333" stroke-width="1"/>`
  );

  // error bands first so every polyline draws above them
  series.forEach((s, i) => {
    if (s.points.length < 2) return;
    const color = PALETTE[i % PALETTE.length];
    const upper = s.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean + p.stderr))}`);
    const lower = s.points
      .slice()
      .reverse()
      .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean - p.stderr))}`);
    parts.push(
      `<polygon points="${[...upper, ...lower].join(" ")}" fill="${color}" ` +
        `fill-opacity="0.15" stroke="none"/>`
    );
  });
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="2" class="series-line"/>`
    );
    for (const p of s.points) {
      parts.push(
        `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.mean))}" r="3" fill="${color}"/>`
      );
    }
  });

  // legend, top-left inside the frame
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = MARGIN.top + 14 + i * 16;
    parts.push(
      `<line x1="${MARGIN.left + 10}" y1="${fmt(y - 4)}" x2="${MARGIN.left + 34}" ` +
        `y2="${fmt(y - 4)}" stroke="${color}" stroke-width="2"/>`
    );
    parts.push(
      `<text x="${MARGIN.left + 40}" y="${fmt(y)}" font-size="12" fill="#111111">` +
        `${escapeXml(s.group)}</text>`
    );
  });

  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="24" text-anchor="middle" font-size="14" ` +
        `fill="#111111">${escapeXml(options.title)}</text>`
    );
  }
  if (options.xLabel) {
    parts.push(
      `<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" text-anchor="middle" ` +
        `font-size="12" fill="#111111">${escapeXml(options.xLabel)}</text>`
    );
  }
  if (options.yLabel) {
    const x = 18;
    const y = MARGIN.top + plotH / 2;
    parts.push(
      `<text x="${x}" y="${fmt(y)}" text-anchor="middle" font-size="12" fill="#111111" ` +
        `transform="rotate(-90 ${x} ${fmt(y)})">${escapeXml(options.yLabel)}</text>`
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
