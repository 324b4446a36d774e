import { readFileSync } from "node:fs";
import Papa from "papaparse";
import { SchemaMismatch } from "./errors.js";

/** Columns emitted by `speclab simulate` / `speclab closed-form`. */
export const TRAJECTORY_COLUMNS = [
  "run_id",
  "algo",
  "step_or_time",
  "component",
  "alpha",
  "layer",
  "offdiag_residual",
  "grad_norm",
] as const;

/** Columns emitted into losses.csv. */
export const LOSS_COLUMNS = [
  "run_id",
  "algo",
  "step_or_time",
  "class_user_index",
  "class_spectral_index",
  "loss",
  "accuracy",
] as const;

/** Columns of the theorem-gap export from `speclab verify --suite theorems`. */
export const GAP_COLUMNS = ["theorem", "step_or_time", "gap", "bound"] as const;

export type Row = Record<string, string>;

/** Parse a CSV file and check that every required column is present. */
export function readCsv(path: string, required: readonly string[]): Row[] {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Row>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaMismatch(path, missing);
  }
  return parsed.data;
}

export function asNumber(row: Row, column: string): number {
  return Number(row[column]);
}

/** Distinct values of a column, in first-appearance order. */
export function distinct(rows: Row[], column: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const row of rows) {
    const v = row[column];
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
