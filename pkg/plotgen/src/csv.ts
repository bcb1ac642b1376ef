// Strict reader for the mbdelay CSV contract: optional "# key: value" comment
// lines, a header row, then numeric rows.

import * as fs from 'fs';
import * as path from 'path';

export interface Table {
  /** source file, for error messages and legend labels */
  file: string;
  meta: Record<string, string>;
  columns: string[];
  /** column name -> values */
  data: Record<string, number[]>;
  rows: number;
}

export class CsvError extends Error {}

export function readTable(file: string): Table {
  let text: string;
  try {
    text = fs.readFileSync(file, 'utf8');
  } catch {
    throw new CsvError(`cannot read ${file}`);
  }
  const meta: Record<string, string> = {};
  let columns: string[] | null = null;
  const values: number[][] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === '') continue;
    if (line.startsWith('#')) {
      const body = line.replace(/^#\s*/, '');
      const sep = body.indexOf(': ');
      if (sep > 0) meta[body.slice(0, sep)] = body.slice(sep + 2);
      continue;
    }
    if (columns === null) {
      columns = line.split(',').map((c) => c.trim());
      continue;
    }
    const parts = line.split(',');
    if (parts.length !== columns.length) {
      throw new CsvError(`${file}:${i + 1}: expected ${columns.length} fields, got ${parts.length}`);
    }
    const row = parts.map((p, j) => {
      const v = Number(p);
      if (!Number.isFinite(v)) {
        throw new CsvError(`${file}:${i + 1}: column '${columns![j]}' is not numeric: ${p}`);
      }
      return v;
    });
    values.push(row);
  }
  if (columns === null) throw new CsvError(`${file}: no header row`);
  if (values.length === 0) throw new CsvError(`${file}: no data rows`);
  const data: Record<string, number[]> = {};
  columns.forEach((c, j) => {
    data[c] = values.map((r) => r[j]);
  });
  return { file, meta, columns, data, rows: values.length };
}

/** Require columns, raising a CsvError that names the first missing one. */
export function requireColumns(table: Table, required: string[]): void {
  for (const col of required) {
    if (!table.columns.includes(col)) {
      throw new CsvError(`${table.file}: missing column '${col}' (has: ${table.columns.join(',')})`);
    }
  }
}

/** Curve label: scenario meta when present, else the file stem. */
export function curveLabel(table: Table): string {
  return table.meta['scenario'] ?? path.basename(table.file).replace(/\.csv$/, '');
}

/** Contiguous references are drawn dashed. */
export function isReference(table: Table): boolean {
  if (table.meta['reference_of']) return true;
  const id = table.meta['scenario'];
  return id !== undefined && id.endsWith('*');
}
