/**
 * Batch figure rendering from an emitted results table.
 *
 *   node dist/cli.js heatmap --table results.csv --gate rz --out rz.svg
 *   node dist/cli.js curves  --table results.csv --gate rz --out rz_r.svg \
 *       --highlight 1 10 50 100
 *
 * Read-only consumer of the table; output is a deterministic SVG.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { renderCurves } from "./curves.js";
import { renderHeatmap } from "./heatmap.js";
import { parseTable } from "./table.js";

interface Args {
  kind: string;
  table: string;
  gate: string;
  out: string;
  highlight: number[];
}

function parseArgs(argv: string[]): Args {
  const [kind, ...rest] = argv;
  if (kind !== "heatmap" && kind !== "curves") {
    throw new Error("usage: cli.js heatmap|curves --table T --gate G --out F " +
      "[--highlight a1 a2 ...]");
  }
  const args: Args = { kind, table: "", gate: "", out: "",
                       highlight: [1, 10, 50, 100] };
  for (let i = 0; i < rest.length; i++) {
    switch (rest[i]) {
      case "--table":
        args.table = rest[++i];
        break;
      case "--gate":
        args.gate = rest[++i];
        break;
      case "--out":
        args.out = rest[++i];
        break;
      case "--highlight": {
        const vals: number[] = [];
        while (i + 1 < rest.length && !rest[i + 1].startsWith("--")) {
          vals.push(Number(rest[++i]));
        }
        args.highlight = vals;
        break;
      }
      default:
        throw new Error(`unknown flag ${rest[i]}`);
    }
  }
  if (!args.table || !args.gate || !args.out) {
    throw new Error("--table, --gate and --out are required");
  }
  return args;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const rows = parseTable(readFileSync(args.table, "utf-8"));
  const spec = { gate: args.gate, highlightedAlphas: args.highlight };
  const result = args.kind === "heatmap"
    ? renderHeatmap(rows, spec)
    : renderCurves(rows, spec);
  for (const w of result.warnings) {
    console.warn(`warning: ${w}`);
  }
  writeFileSync(args.out, result.svg, "utf-8");
  const extra = "maskedCells" in result
    ? `masked cells: ${result.maskedCells}`
    : `curves: ${result.curveCount}, baseline squares: ${result.squareCount}`;
  console.log(`wrote ${args.out} (${extra})`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
