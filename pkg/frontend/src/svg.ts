/**
 * Hand-built SVG renderer for the three figure kinds.
 *
 * The symbol error rate is always drawn on a logarithmic axis; exact-zero
 * SER values cannot appear on a log axis and are clipped to a configurable
 * floor (default 1e-6), drawn as hollow down-triangles to mark clipping.
 * The flops kind also uses a logarithmic x axis and one marker per
 * iteration row.
 */

import { DataRow, FigureKind } from "./csv.js";
import { styleFor } from "./styles.js";

export interface RenderOptions {
  floor?: number; // log-axis floor for SER = 0 values
  title?: string;
}

const W = 720;
const H = 420;
const ML = 70;
const MR = 24;
const MT = 36;
const MB = 56;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

interface Series {
  algorithm: string;
  xs: number[];
  ys: number[]; // already floored, > 0
  stderrs: number[];
  clipped: boolean[];
}

function groupSeries(rows: DataRow[], kind: FigureKind, floor: number): Series[] {
  const order: string[] = [];
  const byAlg = new Map<string, DataRow[]>();
  for (const row of rows) {
    if (!byAlg.has(row.algorithm)) {
      byAlg.set(row.algorithm, []);
      order.push(row.algorithm);
    }
    byAlg.get(row.algorithm)!.push(row);
  }
  return order.map((algorithm) => {
    const rs = byAlg.get(algorithm)!;
    return {
      algorithm,
      xs: rs.map((r) => (kind === "flops" ? r.flopsMean : r.sweepValue)),
      ys: rs.map((r) => Math.max(r.serMean, floor)),
      stderrs: rs.map((r) => r.serStderr),
      clipped: rs.map((r) => r.serMean < floor),
    };
  });
}

function log10(x: number): number {
  return Math.log(x) / Math.LN10;
}

function decadeTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(log10(min) - 1e-9); e <= Math.floor(log10(max) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function linearTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 0.01; v += step) {
    ticks.push(v);
  }
  return ticks;
}

function markerSvg(shape: string, x: number, y: number, color: string, hollow = false): string {
  const r = 3.4;
  const fill = hollow ? "#fff" : color;
  const common = `stroke="${color}" stroke-width="1" fill="${fill}"`;
  const p = (pts: number[][]) =>
    pts.map(([a, b]) => `${(x + a).toFixed(1)},${(y + b).toFixed(1)}`).join(" ");
  switch (shape) {
    case "square":
      return `<rect x="${(x - r).toFixed(1)}" y="${(y - r).toFixed(1)}" width="${2 * r}" height="${2 * r}" ${common}/>`;
    case "diamond":
      return `<polygon points="${p([[0, -r], [r, 0], [0, r], [-r, 0]])}" ${common}/>`;
    case "triangle":
      return `<polygon points="${p([[0, -r], [r, r], [-r, r]])}" ${common}/>`;
    case "triangle-down":
      return `<polygon points="${p([[0, r], [r, -r], [-r, -r]])}" ${common}/>`;
    case "cross":
      return `<path d="M${x - r} ${y - r} L${x + r} ${y + r} M${x - r} ${y + r} L${x + r} ${y - r}" stroke="${color}" stroke-width="1.3" fill="none"/>`;
    case "plus":
      return `<path d="M${x - r} ${y} L${x + r} ${y} M${x} ${y - r} L${x} ${y + r}" stroke="${color}" stroke-width="1.3" fill="none"/>`;
    case "star":
      return `<path d="M${x - r} ${y} L${x + r} ${y} M${x} ${y - r} L${x} ${y + r} M${x - 0.7 * r} ${y - 0.7 * r} L${x + 0.7 * r} ${y + 0.7 * r} M${x - 0.7 * r} ${y + 0.7 * r} L${x + 0.7 * r} ${y - 0.7 * r}" stroke="${color}" stroke-width="1" fill="none"/>`;
    default:
      return `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="${r}" ${common}/>`;
  }
}

const X_LABEL: Record<FigureKind, string> = {
  noise: "inverse noise level 10 log10(1/sigma_n^2) [dB]",
  sparsity: "sparsity s",
  flops: "cumulative FLOPs",
};

export function buildFigure(rows: DataRow[], kind: FigureKind, opts: RenderOptions = {}): string {
  const floor = opts.floor ?? 1e-6;
  const series = groupSeries(rows, kind, floor);
  const pw = W - ML - MR;
  const ph = H - MT - MB;

  const xsAll = series.flatMap((s) => s.xs);
  const ysAll = series.flatMap((s, i) =>
    s.ys.concat(s.ys.map((y, j) => y + series[i].stderrs[j]))
  );
  const logX = kind === "flops";

  const xMinRaw = Math.min(...xsAll);
  const xMaxRaw = Math.max(...xsAll);
  const xMin = logX ? xMinRaw / 1.3 : xMinRaw - 0.5;
  const xMax = logX ? xMaxRaw * 1.3 : xMaxRaw + 0.5;
  const yMin = floor / 1.5;
  const yMax = Math.max(...ysAll, floor) * 2;

  const xOf = (v: number) =>
    ML + ((logX ? log10(v) - log10(xMin) : v - xMin) /
      (logX ? log10(xMax) - log10(xMin) : xMax - xMin)) * pw;
  const yOf = (v: number) =>
    MT + ph - ((log10(v) - log10(yMin)) / (log10(yMax) - log10(yMin))) * ph;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  if (opts.title) {
    s += `<text x="${ML}" y="${MT - 14}" font-size="12" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;
  }

  // grid + y ticks (decades)
  for (const tick of decadeTicks(yMin, yMax)) {
    const y = yOf(tick);
    s += `<line x1="${ML}" y1="${y.toFixed(1)}" x2="${ML + pw}" y2="${y.toFixed(1)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${(y + 3).toFixed(1)}" text-anchor="end" font-size="9" fill="#555">1e${Math.round(log10(tick))}</text>\n`;
  }
  // floor line marks where clipped zero-SER points sit
  const yFloor = yOf(floor);
  s += `<line x1="${ML}" y1="${yFloor.toFixed(1)}" x2="${ML + pw}" y2="${yFloor.toFixed(1)}" stroke="#bbb" stroke-width="0.8" stroke-dasharray="2,3"/>\n`;

  // x ticks
  const xTicks = logX ? decadeTicks(xMin, xMax) : linearTicks(xMin, xMax, 8);
  for (const tick of xTicks) {
    const x = xOf(tick);
    s += `<line x1="${x.toFixed(1)}" y1="${MT + ph}" x2="${x.toFixed(1)}" y2="${MT + ph + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    const label = logX ? `1e${Math.round(log10(tick))}` : `${Number(tick.toFixed(6))}`;
    s += `<text x="${x.toFixed(1)}" y="${MT + ph + 16}" text-anchor="middle" font-size="9" fill="#555">${label}</text>\n`;
  }

  // axes frame
  s += `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ML}" y1="${MT + ph}" x2="${ML + pw}" y2="${MT + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ML + pw / 2}" y="${H - 8}" text-anchor="middle" font-size="11" fill="#333">${esc(X_LABEL[kind])}</text>\n`;
  s += `<text x="16" y="${MT + ph / 2}" text-anchor="middle" font-size="11" fill="#333" transform="rotate(-90,16,${MT + ph / 2})">symbol error rate</text>\n`;

  // series
  for (const sr of series) {
    const style = styleFor(sr.algorithm);
    const pts = sr.xs.map((x, i) => `${xOf(x).toFixed(1)},${yOf(sr.ys[i]).toFixed(1)}`).join(" ");
    s += `<polyline fill="none" stroke="${style.color}" stroke-width="1.3" ${style.dash ? `stroke-dasharray="${style.dash}"` : ""} points="${pts}"/>\n`;
    for (let i = 0; i < sr.xs.length; i++) {
      const x = xOf(sr.xs[i]);
      const y = yOf(sr.ys[i]);
      if (sr.stderrs[i] > 0 && !sr.clipped[i]) {
        const hi = yOf(sr.ys[i] + sr.stderrs[i]);
        const lo = yOf(Math.max(sr.ys[i] - sr.stderrs[i], floor));
        s += `<line x1="${x.toFixed(1)}" y1="${hi.toFixed(1)}" x2="${x.toFixed(1)}" y2="${lo.toFixed(1)}" stroke="${style.color}" stroke-width="0.8"/>\n`;
      }
      // clipped zeros become hollow down-triangles on the floor line
      s += sr.clipped[i]
        ? markerSvg("triangle-down", x, y, style.color, true)
        : markerSvg(style.marker, x, y, style.color);
    }
  }

  // legend
  const lx = ML + pw - 86;
  let ly = MT + 10;
  s += `<rect x="${lx - 8}" y="${ly - 10}" width="${92}" height="${series.length * 14 + 6}" rx="3" fill="#fff" fill-opacity="0.9" stroke="#ddd" stroke-width="0.6"/>\n`;
  for (const sr of series) {
    const style = styleFor(sr.algorithm);
    s += `<line x1="${lx}" y1="${ly}" x2="${lx + 16}" y2="${ly}" stroke="${style.color}" stroke-width="1.3" ${style.dash ? `stroke-dasharray="${style.dash}"` : ""}/>\n`;
    s += markerSvg(style.marker, lx + 8, ly, style.color);
    s += `<text x="${lx + 22}" y="${ly + 3}" font-size="10" fill="#333">${esc(sr.algorithm)}</text>\n`;
    ly += 14;
  }

  s += `</svg>\n`;
  return s;
}
