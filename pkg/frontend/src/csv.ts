/**
 * Reader for the aszeta CLI's CSV flavor: a `# config {json}` comment,
 * a header line, then plain comma-separated rows (no quoting; list
 * cells use ';' internally and never contain commas).
 */

import { readFileSync } from "node:fs";

export interface CliCsv {
  config: Record<string, unknown>;
  header: string[];
  rows: string[][];
}

export function parseCliCsv(text: string): CliCsv {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty input");
  }
  if (!lines[0].startsWith("# config ")) {
    throw new Error("schema mismatch: first line must be '# config {...}'");
  }
  const config = JSON.parse(lines[0].slice("# config ".length));
  if (lines.length < 2) {
    throw new Error("schema mismatch: missing header line");
  }
  const header = lines[1].split(",");
  const rows = lines.slice(2).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`schema mismatch: row ${i} has ${cells.length} cells, header has ${header.length}`);
    }
    return cells;
  });
  return { config, header, rows };
}

export function readCliCsv(path: string): CliCsv {
  return parseCliCsv(readFileSync(path, "utf8"));
}

export function numericColumn(csv: CliCsv, name: string): number[] {
  const idx = csv.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`schema mismatch: no column '${name}' in [${csv.header.join(", ")}]`);
  }
  return csv.rows.map((row, i) => {
    const v = Number(row[idx]);
    if (!Number.isFinite(v)) {
      throw new Error(`non-numeric value '${row[idx]}' in column '${name}', row ${i}`);
    }
    return v;
  });
}

export interface CliJson {
  config: Record<string, unknown>;
  report: Record<string, any>;
}

/** The CLI's JSON output is always {"config": ..., "report": ...}. */
export function readCliJson(path: string): CliJson {
  const obj = JSON.parse(readFileSync(path, "utf8"));
  if (typeof obj !== "object" || obj === null || !("config" in obj) || !("report" in obj)) {
    throw new Error("schema mismatch: expected {config, report}");
  }
  return obj as CliJson;
}

export function expectSubcommand(config: Record<string, unknown>, want: string): void {
  if (config["subcommand"] !== want) {
    throw new Error(`schema mismatch: subcommand '${config["subcommand"]}', expected '${want}'`);
  }
}
