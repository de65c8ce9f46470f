import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface Table {
  columns: string[];
  rows: Record<string, string | number>[];
}

export class SchemaError extends Error {}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string | number>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const columns = parsed.meta.fields ?? [];
  return { columns, rows: parsed.data };
}

/** Throw with a column diagnostic unless every expected column is present. */
export function requireColumns(table: Table, expected: string[], path: string): void {
  const missing = expected.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column(s) ${missing.join(", ")}; found ${table.columns.join(", ")}`,
    );
  }
}

export function numbers(table: Table, column: string): number[] {
  return table.rows.map((r) => Number(r[column]));
}
