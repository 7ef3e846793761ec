/**
 * Equal-infidelity heat map: 1-F over (noise amplitude, separation).
 *
 * The x axis is log-alpha, the y axis the separation in units of the
 * pitch; dashed vertical lines mark the highlighted amplitudes picked out
 * by the companion curve figure. Failed (nan) cells render as hatched
 * grey and are counted in the returned summary.
 */

import {
  LinScale,
  LogScale,
  colormap,
  fmt,
  line,
  logTicks,
  rect,
  sci,
  svgDocument,
  text,
} from "./svg.js";
import { ResultRow, gateGrid, infidelity, isMasked, sortedUnique } from "./table.js";

export interface HeatmapSpec {
  gate: string;
  highlightedAlphas: number[];
  width?: number;
  height?: number;
  title?: string;
}

export interface RenderResult {
  svg: string;
  maskedCells: number;
  warnings: string[];
}

const MARGIN = { left: 70, right: 110, top: 40, bottom: 55 };

export function renderHeatmap(rows: ResultRow[], spec: HeatmapSpec): RenderResult {
  const warnings: string[] = [];
  const grid = gateGrid(rows, spec.gate);
  const cells = [...grid.values()];
  if (cells.length === 0) {
    warnings.push(`no interacting cells for gate ${spec.gate}`);
  }
  const alphas = sortedUnique(cells.map((r) => r.alpha));
  const ks = sortedUnique(cells.map((r) => r.k));
  const expected = alphas.length * ks.length;
  if (cells.length < expected) {
    warnings.push(`grid incomplete: ${cells.length}/${expected} cells`);
  }

  const width = spec.width ?? 640;
  const height = spec.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const body: string[] = [];

  // infidelity color range on a log scale
  const finite = cells.filter((r) => !isMasked(r)).map(infidelity)
    .filter((v) => v > 0);
  const lo = finite.length ? Math.min(...finite) : 1e-4;
  const hi = finite.length ? Math.max(...finite) : 1;
  const cLo = Math.log10(lo);
  const cHi = Math.log10(Math.max(hi, lo * 10));

  let masked = 0;
  const cellW = plotW / Math.max(alphas.length, 1);
  const cellH = plotH / Math.max(ks.length, 1);
  alphas.forEach((alpha, i) => {
    ks.forEach((k, j) => {
      const row = grid.get(`${k}|${alpha}`);
      const x = MARGIN.left + i * cellW;
      const y = MARGIN.top + plotH - (j + 1) * cellH;
      if (!row || isMasked(row)) {
        masked += row ? 1 : 0;
        body.push(rect(x, y, cellW, cellH, "#cccccc",
          ' stroke="#888" stroke-dasharray="3,2"'));
        return;
      }
      const v = Math.max(infidelity(row), 10 ** cLo);
      const t = (Math.log10(v) - cLo) / (cHi - cLo || 1);
      body.push(rect(x, y, cellW, cellH, colormap(t)));
    });
  });

  // dashed highlights at the featured amplitudes
  for (const a of spec.highlightedAlphas) {
    const i = alphas.indexOf(a);
    if (i < 0) continue;
    const x = MARGIN.left + (i + 0.5) * cellW;
    body.push(line(x, MARGIN.top, x, MARGIN.top + plotH, "white",
      { width: 1.5, dash: "6,4" }));
  }

  // axes
  alphas.forEach((a, i) => {
    const x = MARGIN.left + (i + 0.5) * cellW;
    body.push(text(x, MARGIN.top + plotH + 18, sci(a)));
  });
  ks.forEach((k, j) => {
    const y = MARGIN.top + plotH - (j + 0.5) * cellH + 4;
    body.push(text(MARGIN.left - 12, y, `${k}`, { anchor: "end" }));
  });
  body.push(text(MARGIN.left + plotW / 2, height - 12,
    "noise amplitude alpha (V/m, log)"));
  body.push(text(18, MARGIN.top + plotH / 2, "separation r (units of r0)",
    { rotate: true }));
  body.push(text(MARGIN.left + plotW / 2, 24,
    spec.title ?? `1-F of parallel ${spec.gate}`, { size: 14 }));

  // colorbar
  const cbX = width - MARGIN.right + 30;
  const steps = 24;
  for (let s = 0; s < steps; s++) {
    const y = MARGIN.top + plotH - ((s + 1) * plotH) / steps;
    body.push(rect(cbX, y, 16, plotH / steps + 0.5, colormap(s / (steps - 1))));
  }
  body.push(text(cbX + 8, MARGIN.top - 8, "1-F"));
  body.push(text(cbX + 44, MARGIN.top + plotH, sci(10 ** cLo),
    { anchor: "end", size: 10 }));
  body.push(text(cbX + 44, MARGIN.top + 10, sci(10 ** cHi),
    { anchor: "end", size: 10 }));

  return { svg: svgDocument(width, height, body), maskedCells: masked, warnings };
}
