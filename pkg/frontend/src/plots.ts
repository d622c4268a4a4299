#!/usr/bin/env node
/**
 * plots — render a benchmark CSV as an SVG figure.
 *
 * Usage:
 *   plots --csv <file> --kind <noise|sparsity|flops> --out <image.svg>
 *         [--export-back <file>] [--floor <ser>] [--title <text>]
 *
 * The CSV must follow the benchmark writer's contract exactly (see
 * csv.ts).  --export-back writes the consumed data series back out,
 * byte-for-byte as read, so plotted values can be diffed against the
 * input.  Schema violations and empty selections exit with code 1 and a
 * descriptive message.
 */

import { readFileSync, writeFileSync } from "fs";

import { FigureKind, SchemaError, parseTable, selectKind } from "./csv.js";
import { buildFigure } from "./svg.js";

interface CliArgs {
  csv: string;
  kind: FigureKind;
  out: string;
  exportBack?: string;
  floor?: number;
  title?: string;
}

function parseArgs(argv: string[]): CliArgs {
  const take = (flag: string): string | undefined => {
    const i = argv.indexOf(flag);
    if (i === -1) return undefined;
    if (i + 1 >= argv.length) throw new Error(`${flag} needs a value`);
    return argv[i + 1];
  };
  const csv = take("--csv");
  const kind = take("--kind");
  const out = take("--out");
  if (!csv || !kind || !out) {
    throw new Error("required: --csv <file> --kind <noise|sparsity|flops> --out <image>");
  }
  if (kind !== "noise" && kind !== "sparsity" && kind !== "flops") {
    throw new Error(`--kind must be noise, sparsity or flops (got '${kind}')`);
  }
  const floorText = take("--floor");
  const floor = floorText === undefined ? undefined : Number(floorText);
  if (floor !== undefined && !(floor > 0)) {
    throw new Error(`--floor must be a positive number (got '${floorText}')`);
  }
  return {
    csv,
    kind,
    out,
    exportBack: take("--export-back"),
    floor,
    title: take("--title"),
  };
}

export function run(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    const text = readFileSync(args.csv, "utf-8");
    const table = parseTable(text);
    const rows = selectKind(table, args.kind);
    const svg = buildFigure(rows, args.kind, { floor: args.floor, title: args.title });
    writeFileSync(args.out, svg);
    if (args.exportBack !== undefined) {
      const lines = [table.headerLine, ...rows.map((r) => r.raw)];
      writeFileSync(args.exportBack, lines.join("\n") + "\n");
    }
    console.log(`wrote ${args.out} (${rows.length} rows)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error(`error: ${(err as Error).message}`);
    }
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  new URL(`file://${process.argv[1]}`).pathname === new URL(import.meta.url).pathname;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
