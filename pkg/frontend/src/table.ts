/**
 * Results-table access.
 *
 * The simulator emits a CSV with the fixed header
 * gate,k,alpha,mean_fidelity,std_error,mean_leakage,n_realizations,wall_time_s
 * where baseline rows carry k=0 and failed cells carry nan fields. This
 * module is a read-only consumer of that file format.
 */

export interface ResultRow {
  gate: string;
  k: number;
  alpha: number;
  meanFidelity: number;
  stdError: number;
  meanLeakage: number;
  nRealizations: number;
  wallTimeS: number;
}

export const TABLE_HEADER =
  "gate,k,alpha,mean_fidelity,std_error,mean_leakage,n_realizations,wall_time_s";

export function parseTable(text: string): ResultRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() !== TABLE_HEADER) {
    throw new Error(`unexpected results header: ${lines[0] ?? "(empty)"}`);
  }
  const rows: ResultRow[] = [];
  for (const line of lines.slice(1)) {
    if (line.trim() === "") continue;
    const parts = line.split(",");
    if (parts.length !== 8) {
      throw new Error(`malformed row: ${line}`);
    }
    rows.push({
      gate: parts[0],
      k: Number(parts[1]),
      alpha: Number(parts[2]),
      meanFidelity: Number(parts[3]),
      stdError: Number(parts[4]),
      meanLeakage: Number(parts[5]),
      nRealizations: Number(parts[6]),
      wallTimeS: Number(parts[7]),
    });
  }
  return rows;
}

export function isMasked(row: ResultRow): boolean {
  return !Number.isFinite(row.meanFidelity);
}

export function infidelity(row: ResultRow): number {
  return 1 - row.meanFidelity;
}

/** Interacting cells of one gate as a (k, alpha) map; k >= 1 only. */
export function gateGrid(rows: ResultRow[], gate: string): Map<string, ResultRow> {
  const grid = new Map<string, ResultRow>();
  for (const r of rows) {
    if (r.gate === gate && r.k >= 1) grid.set(`${r.k}|${r.alpha}`, r);
  }
  return grid;
}

/** Baseline rows (k = 0) of one gate keyed by alpha. */
export function baselineRows(rows: ResultRow[], gate: string): Map<number, ResultRow> {
  const out = new Map<number, ResultRow>();
  for (const r of rows) {
    if (r.gate === gate && r.k === 0) out.set(r.alpha, r);
  }
  return out;
}

export function sortedUnique(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}
