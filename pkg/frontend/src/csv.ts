/**
 * Reader for the simulator's comment-prefixed CSV artifacts.
 *
 * Files start with `# key=value` comment lines (version, command, seed),
 * then a header row, then data rows. Numbers use full float precision and
 * `inf` spellings for infinities.
 */

import { readFileSync } from "fs";

export interface CsvTable {
  meta: Record<string, string>;
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): CsvTable {
  const meta: Record<string, string> = {};
  let header: string[] | null = null;
  const rows: string[][] = [];
  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      continue;
    }
    const cells = line.split(",");
    if (header === null) {
      header = cells;
    } else {
      if (cells.length !== header.length) {
        throw new SchemaError(
          `row has ${cells.length} cells, header has ${header.length}`,
        );
      }
      rows.push(cells);
    }
  }
  if (header === null) throw new SchemaError("file has no header row");
  return { meta, header, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf8"));
}

export function toNumber(cell: string): number {
  if (cell === "inf") return Infinity;
  if (cell === "-inf") return -Infinity;
  const value = Number(cell);
  if (Number.isNaN(value)) throw new SchemaError(`not a number: ${cell}`);
  return value;
}

/** Require the header to contain the named columns; returns their indices. */
export function columnIndices(table: CsvTable, names: string[]): number[] {
  return names.map((name) => {
    const index = table.header.indexOf(name);
    if (index < 0) {
      throw new SchemaError(
        `missing column '${name}' (header: ${table.header.join(",")})`,
      );
    }
    return index;
  });
}

export function requireRows(table: CsvTable): void {
  if (table.rows.length === 0) throw new SchemaError("file has no data rows");
}
