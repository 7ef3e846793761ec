/** Minimal deterministic SVG assembly: fixed float formatting, no state. */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export class LogScale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly a: number,
    readonly b: number,
  ) {}

  static of(lo: number, hi: number, a: number, b: number): LogScale {
    return new LogScale(Math.log10(lo), Math.log10(hi), a, b);
  }

  map(x: number): number {
    const t = (Math.log10(x) - this.lo) / (this.hi - this.lo || 1);
    return this.a + t * (this.b - this.a);
  }
}

export class LinScale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly a: number,
    readonly b: number,
  ) {}

  map(x: number): number {
    const t = (x - this.lo) / (this.hi - this.lo || 1);
    return this.a + t * (this.b - this.a);
  }
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

export function text(
  x: number,
  y: number,
  content: string,
  opts: { size?: number; anchor?: string; rotate?: boolean } = {},
): string {
  const size = opts.size ?? 12;
  const anchor = opts.anchor ?? "middle";
  const transform = opts.rotate
    ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"`
    : "";
  return `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}"${transform}>${escapeXml(content)}</text>`;
}

export function line(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  stroke: string,
  opts: { width?: number; dash?: string } = {},
): string {
  const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${opts.width ?? 1}"${dash}/>`;
}

export function rect(
  x: number,
  y: number,
  w: number,
  h: number,
  fill: string,
  extra = "",
): string {
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${extra}/>`;
}

export function polyline(points: Array<[number, number]>, stroke: string): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.6"/>`;
}

export function circle(x: number, y: number, r: number, fill: string): string {
  return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`;
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

/** Viridis-like ramp evaluated at t in [0, 1]; piecewise-linear anchors. */
const RAMP: Array<[number, number, number]> = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export function colormap(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(x));
  const f = x - i;
  const c = RAMP[i].map((v, j) => Math.round(v + f * (RAMP[i + 1][j] - v)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export const SERIES_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    out.push(10 ** e);
  }
  return out;
}

export function sci(x: number): string {
  if (x >= 0.01 && x < 10000) {
    return Number.isInteger(x) ? String(x) : String(Number(x.toPrecision(3)));
  }
  const e = Math.floor(Math.log10(x));
  const m = x / 10 ** e;
  const mm = Number(m.toPrecision(2));
  return mm === 1 ? `1e${e}` : `${mm}e${e}`;
}
