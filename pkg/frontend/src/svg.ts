/**
 * Static SVG renderer: linear Eb/N0 axis, logarithmic error-rate axis,
 * solid marked series for measurements, dashed lines for bounds, legend,
 * and 95% binomial error bars where frame counts are available.
 */

import { CurveSet, Series } from "./model.js";

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

const W = 760;
const H = 520;
const MARGIN = { left: 80, right: 180, top: 36, bottom: 56 };

interface Extent {
  x0: number;
  x1: number;
  y0: number;
  y1: number; // decades, y plotted as log10
}

function dataExtent(set: CurveSet): Extent {
  let x0 = Infinity;
  let x1 = -Infinity;
  let y0 = 0; // log10 upper bound (1.0)
  let y1 = -1;
  for (const s of [...set.curves, ...set.bounds]) {
    for (const x of s.ebno) {
      x0 = Math.min(x0, x);
      x1 = Math.max(x1, x);
    }
    for (const line of s.lines) {
      for (const v of line.values) {
        if (v > 0) {
          y1 = Math.min(y1, Math.floor(Math.log10(v)));
        }
      }
    }
  }
  if (!Number.isFinite(x0)) {
    throw new Error("nothing to plot");
  }
  if (x0 === x1) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  y1 = Math.max(y1, -12);
  return { x0, x1, y0, y1 };
}

export function renderSvg(set: CurveSet, title = ""): string {
  if (set.curves.length + set.bounds.length === 0) {
    throw new Error("at least one series is required");
  }
  const ext = dataExtent(set);
  const plotW = W - MARGIN.left - MARGIN.right;
  const plotH = H - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) =>
    MARGIN.left + ((x - ext.x0) / (ext.x1 - ext.x0)) * plotW;
  const sy = (v: number) => {
    const ly = Math.log10(Math.max(v, Math.pow(10, ext.y1 - 1)));
    return MARGIN.top + ((ext.y0 - ly) / (ext.y0 - ext.y1)) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" ` +
      `viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  if (title) {
    parts.push(
      `<text x="${W / 2}" y="22" text-anchor="middle" font-size="15">${esc(title)}</text>`,
    );
  }

  // grid and y (log) decade ticks
  for (let d = ext.y0; d >= ext.y1; d--) {
    const y = sy(Math.pow(10, d));
    parts.push(
      `<line x1="${MARGIN.left}" x2="${W - MARGIN.right}" y1="${y}" y2="${y}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end" ` +
        `font-size="12">1e${d}</text>`,
    );
  }
  // x ticks: at most ~8 round steps
  const span = ext.x1 - ext.x0;
  const step = niceStep(span / 7);
  for (let x = Math.ceil(ext.x0 / step) * step; x <= ext.x1 + 1e-9; x += step) {
    const px = sx(x);
    parts.push(
      `<line x1="${px}" x2="${px}" y1="${H - MARGIN.bottom}" ` +
        `y2="${H - MARGIN.bottom + 5}" stroke="#333333"/>`,
    );
    parts.push(
      `<text x="${px}" y="${H - MARGIN.bottom + 20}" text-anchor="middle" ` +
        `font-size="12">${round2(x)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" ` +
      `height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${H - 12}" text-anchor="middle" ` +
      `font-size="13">Eb/N0 (dB)</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `font-size="13" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">` +
      `codeword error rate</text>`,
  );

  const legend: { label: string; color: string; dashed: boolean }[] = [];
  let ci = 0;
  for (const s of set.curves) {
    const color = PALETTE[ci++ % PALETTE.length];
    parts.push(seriesPath(s, s.lines[0].values, sx, sy, color, false));
    if (s.errorBars) {
      for (let i = 0; i < s.ebno.length; i++) {
        const v = s.lines[0].values[i];
        if (v <= 0) continue;
        const lo = Math.max(v - s.errorBars[i], Math.pow(10, ext.y1 - 1));
        const hi = Math.min(v + s.errorBars[i], 1);
        const px = sx(s.ebno[i]);
        parts.push(
          `<line class="errorbar" x1="${px}" x2="${px}" y1="${sy(lo)}" ` +
            `y2="${sy(hi)}" stroke="${color}" stroke-width="1"/>`,
        );
      }
    }
    legend.push({ label: s.label, color, dashed: false });
  }
  for (const s of set.bounds) {
    for (const line of s.lines) {
      const color = PALETTE[ci++ % PALETTE.length];
      parts.push(seriesPath(s, line.values, sx, sy, color, true));
      legend.push({ label: `${s.label} ${line.name}`, color, dashed: true });
    }
  }

  let ly = MARGIN.top + 10;
  for (const item of legend) {
    const lx = W - MARGIN.right + 12;
    parts.push(
      `<line x1="${lx}" x2="${lx + 26}" y1="${ly - 4}" y2="${ly - 4}" ` +
        `stroke="${item.color}" stroke-width="2"` +
        (item.dashed ? ` stroke-dasharray="6 4"` : "") +
        `/>`,
    );
    parts.push(
      `<text x="${lx + 32}" y="${ly}" font-size="12">${esc(item.label)}</text>`,
    );
    ly += 18;
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function seriesPath(
  s: Series,
  values: number[],
  sx: (x: number) => number,
  sy: (v: number) => number,
  color: string,
  dashed: boolean,
): string {
  const pts = s.ebno
    .map((x, i) => ({ x: sx(x), y: sy(values[i]), v: values[i] }))
    .filter((p) => p.v > 0);
  const d = pts.map((p, i) => `${i ? "L" : "M"}${p.x.toFixed(2)},${p.y.toFixed(2)}`).join(" ");
  let out =
    `<path class="series" fill="none" stroke="${color}" stroke-width="2" ` +
    (dashed ? `stroke-dasharray="6 4" ` : "") +
    `d="${d}"/>`;
  if (!dashed) {
    for (const p of pts) {
      out += `<circle cx="${p.x.toFixed(2)}" cy="${p.y.toFixed(2)}" r="3.2" fill="${color}"/>`;
    }
  }
  return out;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 2.5, 5, 10]) {
    if (raw <= mult * mag) return mult * mag;
  }
  return 10 * mag;
}

function round2(x: number): string {
  return (Math.round(x * 100) / 100).toString();
}
