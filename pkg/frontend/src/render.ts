/**
 * SVG rendering: filled contour-band images of grid fields and overlaid
 * time-series plots. Pure string assembly, no DOM.
 */

import { GridField } from "./gridFile.js";
import { EnergySeries } from "./energyFile.js";

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

/** Diverging blue-white-red map on [0, 1]. */
function divergingColor(u: number): string {
  const stops: [number, [number, number, number]][] = [
    [0.0, [33, 102, 172]],
    [0.25, [146, 197, 222]],
    [0.5, [247, 247, 247]],
    [0.75, [244, 165, 130]],
    [1.0, [178, 24, 43]],
  ];
  const t = Math.min(1, Math.max(0, u));
  for (let k = 1; k < stops.length; k++) {
    const [t1, c1] = stops[k - 1];
    const [t2, c2] = stops[k];
    if (t <= t2) {
      const w = t2 > t1 ? (t - t1) / (t2 - t1) : 0;
      const mix = c1.map((a, i) => Math.round(a + w * (c2[i] - a)));
      return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
    }
  }
  const last = stops[stops.length - 1][1];
  return `rgb(${last[0]},${last[1]},${last[2]})`;
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count) ?? candidates[3];
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(4)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Bilinear interpolation of cell values, clamped at the boundary. */
function sampleBilinear(field: GridField, fx: number, fy: number): number {
  const { nx, ny, values } = field;
  const x = Math.min(Math.max(fx - 0.5, 0), nx - 1);
  const y = Math.min(Math.max(fy - 0.5, 0), ny - 1);
  const i0 = Math.min(Math.floor(x), nx - 2 >= 0 ? nx - 2 : 0);
  const j0 = Math.min(Math.floor(y), ny - 2 >= 0 ? ny - 2 : 0);
  const tx = nx > 1 ? x - i0 : 0;
  const ty = ny > 1 ? y - j0 : 0;
  const j1 = Math.min(j0 + 1, ny - 1);
  const i1 = Math.min(i0 + 1, nx - 1);
  return (
    values[j0][i0] * (1 - tx) * (1 - ty) +
    values[j0][i1] * tx * (1 - ty) +
    values[j1][i0] * (1 - tx) * ty +
    values[j1][i1] * tx * ty
  );
}

export interface FieldPlotOptions {
  width?: number;
  /** Number of filled contour bands. */
  levels?: number;
  /** Upsampling factor for the band raster. */
  refine?: number;
  title?: string;
}

export function renderFieldSvg(field: GridField, opts: FieldPlotOptions = {}): string {
  const [xMin, xMax, yMin, yMax] = field.bounds;
  const aspect = (yMax - yMin) / (xMax - xMin);
  const plotW = opts.width ?? 320;
  const plotH = Math.round(plotW * aspect);
  const levels = opts.levels ?? 12;
  const refine = opts.refine ?? 8;
  const margin = { left: 58, right: 84, top: 34, bottom: 46 };
  const width = margin.left + plotW + margin.right;
  const height = margin.top + plotH + margin.bottom;

  let vMin = Infinity;
  let vMax = -Infinity;
  for (const row of field.values) {
    for (const v of row) {
      vMin = Math.min(vMin, v);
      vMax = Math.max(vMax, v);
    }
  }
  if (vMin === vMax) {
    vMin -= 0.5;
    vMax += 0.5;
  }
  const quantize = (v: number): number => {
    const u = (v - vMin) / (vMax - vMin);
    const band = Math.min(levels - 1, Math.max(0, Math.floor(u * levels)));
    return (band + 0.5) / levels;
  };

  const cellsX = field.nx * refine;
  const cellsY = field.ny * refine;
  const pw = plotW / cellsX;
  const ph = plotH / cellsY;
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<g transform="translate(${margin.left},${margin.top})">`);
  for (let j = 0; j < cellsY; j++) {
    for (let i = 0; i < cellsX; i++) {
      const v = sampleBilinear(field, ((i + 0.5) * field.nx) / cellsX, ((j + 0.5) * field.ny) / cellsY);
      const color = divergingColor(quantize(v));
      // SVG y axis points down; grid row 0 is the bottom of the basin
      const x = i * pw;
      const y = plotH - (j + 1) * ph;
      parts.push(`<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${(pw + 0.35).toFixed(2)}" height="${(ph + 0.35).toFixed(2)}" fill="${color}"/>`);
    }
  }
  parts.push(`<rect x="0" y="0" width="${plotW}" height="${plotH}" fill="none" stroke="black" stroke-width="1"/>`);

  for (const tx of niceTicks(xMin, xMax)) {
    const px = ((tx - xMin) / (xMax - xMin)) * plotW;
    parts.push(`<line x1="${px}" y1="${plotH}" x2="${px}" y2="${plotH + 5}" stroke="black"/>`);
    parts.push(`<text x="${px}" y="${plotH + 18}" text-anchor="middle" font-size="11" ${FONT}>${fmtTick(tx)}</text>`);
  }
  for (const ty of niceTicks(yMin, yMax)) {
    const py = plotH - ((ty - yMin) / (yMax - yMin)) * plotH;
    parts.push(`<line x1="-5" y1="${py}" x2="0" y2="${py}" stroke="black"/>`);
    parts.push(`<text x="-8" y="${py + 4}" text-anchor="end" font-size="11" ${FONT}>${fmtTick(ty)}</text>`);
  }
  parts.push(`<text x="${plotW / 2}" y="${plotH + 36}" text-anchor="middle" font-size="13" ${FONT}>x</text>`);
  parts.push(`<text x="-40" y="${plotH / 2}" text-anchor="middle" font-size="13" ${FONT} transform="rotate(-90 -40 ${plotH / 2})">y</text>`);
  parts.push(`<text x="${plotW / 2}" y="-12" text-anchor="middle" font-size="14" ${FONT}>${esc(opts.title ?? field.name)}</text>`);

  // colorbar with one swatch per band
  const barX = plotW + 18;
  const barW = 14;
  for (let b = 0; b < levels; b++) {
    const y = plotH - ((b + 1) * plotH) / levels;
    parts.push(`<rect x="${barX}" y="${y.toFixed(2)}" width="${barW}" height="${(plotH / levels + 0.4).toFixed(2)}" fill="${divergingColor((b + 0.5) / levels)}"/>`);
  }
  parts.push(`<rect x="${barX}" y="0" width="${barW}" height="${plotH}" fill="none" stroke="black" stroke-width="0.8"/>`);
  for (const frac of [0, 0.5, 1]) {
    const v = vMin + frac * (vMax - vMin);
    const y = plotH - frac * plotH;
    parts.push(`<text x="${barX + barW + 5}" y="${y + 4}" font-size="10" ${FONT}>${fmtTick(v)}</text>`);
  }
  parts.push("</g></svg>");
  return parts.join("\n");
}

export interface EnergyPlotOptions {
  width?: number;
  height?: number;
  /** Crop to [t0, t1] before plotting. */
  window?: [number, number];
  title?: string;
}

const SERIES_COLORS = ["#000000", "#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d68910"];

export function renderEnergySvg(seriesList: EnergySeries[], opts: EnergyPlotOptions = {}): string {
  if (seriesList.length === 0) {
    throw new Error("no series to plot");
  }
  const cropped = seriesList.map((s) => {
    if (!opts.window) return s;
    const [t0, t1] = opts.window;
    const times: number[] = [];
    const energies: number[] = [];
    for (let k = 0; k < s.times.length; k++) {
      if (s.times[k] >= t0 && s.times[k] <= t1) {
        times.push(s.times[k]);
        energies.push(s.energies[k]);
      }
    }
    return { ...s, times, energies };
  });
  if (cropped.every((s) => s.times.length === 0)) {
    throw new Error("time window excludes every sample");
  }

  let tMin = Infinity, tMax = -Infinity, eMin = Infinity, eMax = -Infinity;
  for (const s of cropped) {
    for (let k = 0; k < s.times.length; k++) {
      tMin = Math.min(tMin, s.times[k]);
      tMax = Math.max(tMax, s.times[k]);
      eMin = Math.min(eMin, s.energies[k]);
      eMax = Math.max(eMax, s.energies[k]);
    }
  }
  if (tMin === tMax) { tMin -= 0.5; tMax += 0.5; }
  if (eMin === eMax) { eMin -= 0.5; eMax += 0.5; }

  const plotW = opts.width ?? 520;
  const plotH = opts.height ?? 300;
  const margin = { left: 74, right: 24, top: 34, bottom: 50 };
  const legendH = 18 * cropped.length;
  const width = margin.left + plotW + margin.right;
  const height = margin.top + plotH + margin.bottom + legendH;
  const px = (t: number) => ((t - tMin) / (tMax - tMin)) * plotW;
  const py = (e: number) => plotH - ((e - eMin) / (eMax - eMin)) * plotH;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<g transform="translate(${margin.left},${margin.top})">`);
  for (const tx of niceTicks(tMin, tMax, 6)) {
    const x = px(tx);
    parts.push(`<line x1="${x}" y1="0" x2="${x}" y2="${plotH}" stroke="#dddddd"/>`);
    parts.push(`<text x="${x}" y="${plotH + 18}" text-anchor="middle" font-size="11" ${FONT}>${fmtTick(tx)}</text>`);
  }
  for (const te of niceTicks(eMin, eMax, 6)) {
    const y = py(te);
    parts.push(`<line x1="0" y1="${y}" x2="${plotW}" y2="${y}" stroke="#dddddd"/>`);
    parts.push(`<text x="-8" y="${y + 4}" text-anchor="end" font-size="11" ${FONT}>${fmtTick(te)}</text>`);
  }
  parts.push(`<rect x="0" y="0" width="${plotW}" height="${plotH}" fill="none" stroke="black"/>`);
  cropped.forEach((s, idx) => {
    if (s.times.length === 0) return;
    const pts = s.times.map((t, k) => `${px(t).toFixed(2)},${py(s.energies[k]).toFixed(2)}`).join(" ");
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
  });
  parts.push(`<text x="${plotW / 2}" y="${plotH + 38}" text-anchor="middle" font-size="13" ${FONT}>time</text>`);
  parts.push(`<text x="-52" y="${plotH / 2}" text-anchor="middle" font-size="13" ${FONT} transform="rotate(-90 -52 ${plotH / 2})">kinetic energy</text>`);
  parts.push(`<text x="${plotW / 2}" y="-12" text-anchor="middle" font-size="14" ${FONT}>${esc(opts.title ?? "kinetic energy")}</text>`);
  cropped.forEach((s, idx) => {
    const y = plotH + 52 + idx * 18;
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    parts.push(`<line x1="0" y1="${y}" x2="26" y2="${y}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="32" y="${y + 4}" font-size="11" ${FONT}>${esc(s.label)}</text>`);
  });
  parts.push("</g></svg>");
  return parts.join("\n");
}
