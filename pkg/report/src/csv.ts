/** Minimal CSV reader for the run outputs (no quoting in these files). */

import { readFileSync } from "fs";

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class ReportInputError extends Error {}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new ReportInputError(`cannot read ${path}: ${err}`);
  }
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new ReportInputError(`${path} is empty`);
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new ReportInputError(
        `${path}:${i + 2}: expected ${columns.length} fields, got ${parts.length}`,
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((c, j) => (row[c] = parts[j]));
    return row;
  });
  if (rows.length === 0) {
    throw new ReportInputError(`${path} has a header but no data rows`);
  }
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[], path: string): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new ReportInputError(
      `${path} is missing column(s): ${missing.join(", ")}`,
    );
  }
}

export function num(row: Record<string, string>, col: string): number {
  const v = Number(row[col]);
  if (Number.isNaN(v)) {
    throw new ReportInputError(`non-numeric value '${row[col]}' in ${col}`);
  }
  return v;
}
