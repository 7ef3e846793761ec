/**
 * Infidelity against separation: one curve per highlighted noise
 * amplitude with error bars from the tabulated standard errors, plus the
 * non-interacting baseline of matching color drawn as a square to the
 * right of the largest separation.
 */

import {
  LinScale,
  LogScale,
  SERIES_COLORS,
  fmt,
  line,
  polyline,
  rect,
  sci,
  svgDocument,
  text,
} from "./svg.js";
import {
  ResultRow,
  baselineRows,
  gateGrid,
  infidelity,
  isMasked,
  sortedUnique,
} from "./table.js";

export interface CurvesSpec {
  gate: string;
  highlightedAlphas: number[];
  width?: number;
  height?: number;
  title?: string;
}

export interface CurvesResult {
  svg: string;
  curveCount: number;
  squareCount: number;
  warnings: string[];
}

const MARGIN = { left: 80, right: 150, top: 40, bottom: 55 };

export function renderCurves(rows: ResultRow[], spec: CurvesSpec): CurvesResult {
  const warnings: string[] = [];
  const grid = gateGrid(rows, spec.gate);
  const base = baselineRows(rows, spec.gate);
  if (base.size === 0) {
    warnings.push("baseline rows absent; drawing curves only");
  }
  const ks = sortedUnique([...grid.values()].map((r) => r.k));

  const width = spec.width ?? 640;
  const height = spec.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const body: string[] = [];

  // collect plotted values to set the log range
  const values: number[] = [];
  for (const a of spec.highlightedAlphas) {
    for (const k of ks) {
      const r = grid.get(`${k}|${a}`);
      if (r && !isMasked(r) && infidelity(r) > 0) values.push(infidelity(r));
    }
    const b = base.get(a);
    if (b && !isMasked(b) && infidelity(b) > 0) values.push(infidelity(b));
  }
  const lo = values.length ? Math.min(...values) / 2 : 1e-5;
  const hi = values.length ? Math.max(...values) * 2 : 1;
  const yScale = LogScale.of(lo, hi, MARGIN.top + plotH, MARGIN.top);
  const xLo = ks.length ? Math.min(...ks) : 1;
  const xHi = ks.length ? Math.max(...ks) : 4;
  const xScale = new LinScale(xLo - 0.3, xHi + 1.0, MARGIN.left,
    MARGIN.left + plotW);

  // frame and log ticks
  body.push(line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + plotH,
    "black"));
  body.push(line(MARGIN.left, MARGIN.top + plotH, MARGIN.left + plotW,
    MARGIN.top + plotH, "black"));
  for (const tick of logTicksWithin(lo, hi)) {
    const y = yScale.map(tick);
    body.push(line(MARGIN.left - 4, y, MARGIN.left, y, "black"));
    body.push(text(MARGIN.left - 8, y + 4, sci(tick), { anchor: "end", size: 10 }));
    body.push(line(MARGIN.left, y, MARGIN.left + plotW, y, "#dddddd"));
  }
  for (const k of ks) {
    const x = xScale.map(k);
    body.push(line(x, MARGIN.top + plotH, x, MARGIN.top + plotH + 4, "black"));
    body.push(text(x, MARGIN.top + plotH + 18, `${k}`));
  }

  let curves = 0;
  let squares = 0;
  spec.highlightedAlphas.forEach((alpha, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    const pts: Array<[number, number]> = [];
    for (const k of ks) {
      const r = grid.get(`${k}|${alpha}`);
      if (!r || isMasked(r) || infidelity(r) <= 0) continue;
      const x = xScale.map(k);
      const y = yScale.map(infidelity(r));
      pts.push([x, y]);
      // error bars: half-width from the tabulated standard error
      const up = infidelity(r) + r.stdError;
      const dn = Math.max(infidelity(r) - r.stdError, lo / 2);
      body.push(line(x, yScale.map(dn), x, yScale.map(up), color));
      body.push(line(x - 3, yScale.map(up), x + 3, yScale.map(up), color));
      body.push(line(x - 3, yScale.map(dn), x + 3, yScale.map(dn), color));
    }
    if (pts.length > 0) {
      body.push(polyline(pts, color));
      curves += 1;
    }
    const b = base.get(alpha);
    if (b && !isMasked(b) && infidelity(b) > 0) {
      const x = xScale.map(xHi + 0.6);
      const y = yScale.map(infidelity(b));
      body.push(rect(x - 5, y - 5, 10, 10, color));
      squares += 1;
    }
    // legend
    const ly = MARGIN.top + 16 + idx * 18;
    body.push(rect(width - MARGIN.right + 16, ly - 9, 12, 12, color));
    body.push(text(width - MARGIN.right + 34, ly + 1,
      `alpha = ${sci(alpha)} V/m`, { anchor: "start", size: 11 }));
  });

  if (squares > 0) {
    body.push(text(xScale.map(xHi + 0.6), MARGIN.top + plotH + 18, "base"));
  }
  body.push(text(MARGIN.left + plotW / 2, height - 12,
    "separation r (units of r0)"));
  body.push(text(22, MARGIN.top + plotH / 2, "1-F (log)", { rotate: true }));
  body.push(text(MARGIN.left + plotW / 2, 24,
    spec.title ?? `parallel ${spec.gate}: infidelity vs distance`,
    { size: 14 }));

  return { svg: svgDocument(width, height, body), curveCount: curves,
           squareCount: squares, warnings };
}

function logTicksWithin(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) {
    out.push(10 ** e);
  }
  return out.length ? out : [lo];
}
