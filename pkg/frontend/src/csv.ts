/**
 * Reader for the benchmark CSV contract.
 *
 * Expected header (exact, in order):
 *   algorithm,sweep_kind,sweep_value,iteration,trials,ser_mean,ser_stderr,iters_mean,flops_mean
 *
 * `iteration` is empty for the noise/sparsity kinds and the 1-based
 * iteration index for flops-trace rows.  Raw line text is retained so the
 * consumed data series can be exported back byte-for-byte.
 */

export const EXPECTED_HEADER = [
  "algorithm",
  "sweep_kind",
  "sweep_value",
  "iteration",
  "trials",
  "ser_mean",
  "ser_stderr",
  "iters_mean",
  "flops_mean",
] as const;

export type FigureKind = "noise" | "sparsity" | "flops";

/** Maps the CLI figure kind onto the sweep_kind column value. */
export function sweepKindFor(kind: FigureKind): string {
  return kind === "flops" ? "flops-trace" : kind;
}

export interface DataRow {
  algorithm: string;
  sweepKind: string;
  sweepValue: number;
  iteration: number | null;
  trials: number;
  serMean: number;
  serStderr: number;
  itersMean: number;
  flopsMean: number;
  /** Verbatim line from the input file. */
  raw: string;
}

export interface Table {
  headerLine: string;
  rows: DataRow[];
}

export class SchemaError extends Error {}

export function parseTable(text: string): Table {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop(); // trailing newline
  }
  if (lines.length === 0) {
    throw new SchemaError("empty file: no header line");
  }
  const headerLine = lines[0];
  const header = headerLine.split(",");
  for (const column of EXPECTED_HEADER) {
    if (!header.includes(column)) {
      throw new SchemaError(`missing column '${column}' in CSV header`);
    }
  }
  if (header.length !== EXPECTED_HEADER.length ||
      !EXPECTED_HEADER.every((c, i) => header[i] === c)) {
    throw new SchemaError(
      `unexpected header order: got '${headerLine}'`
    );
  }

  const rows: DataRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const raw = lines[i];
    if (raw.trim() === "") continue;
    const f = raw.split(",");
    if (f.length !== EXPECTED_HEADER.length) {
      throw new SchemaError(`line ${i + 1}: expected ${EXPECTED_HEADER.length} fields, got ${f.length}`);
    }
    const num = (name: string, v: string): number => {
      const x = Number(v);
      if (!Number.isFinite(x)) {
        throw new SchemaError(`line ${i + 1}: bad value '${v}' in column '${name}'`);
      }
      return x;
    };
    rows.push({
      algorithm: f[0],
      sweepKind: f[1],
      sweepValue: num("sweep_value", f[2]),
      iteration: f[3] === "" ? null : num("iteration", f[3]),
      trials: num("trials", f[4]),
      serMean: num("ser_mean", f[5]),
      serStderr: num("ser_stderr", f[6]),
      itersMean: num("iters_mean", f[7]),
      flopsMean: num("flops_mean", f[8]),
      raw,
    });
  }
  return { headerLine, rows };
}

/** Rows of the requested kind, in file order; fails on empty selection. */
export function selectKind(table: Table, kind: FigureKind): DataRow[] {
  const want = sweepKindFor(kind);
  const rows = table.rows.filter((r) => r.sweepKind === want);
  if (rows.length === 0) {
    throw new SchemaError(`no rows with sweep_kind '${want}' in the CSV`);
  }
  const other = table.rows.find((r) => r.sweepKind !== want);
  if (other !== undefined) {
    throw new SchemaError(
      `sweep_kind mismatch: found '${other.sweepKind}' rows but kind is '${kind}'`
    );
  }
  return rows;
}
