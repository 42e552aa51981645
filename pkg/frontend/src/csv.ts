/**
 * Minimal strict CSV handling for the simulator's output files.
 *
 * Values are kept as their original string tokens end to end, so anything
 * re-emitted (the tidy data layer) is byte-faithful to its input. The
 * simulator never quotes fields or embeds separators, and we reject
 * anything that does not look like that dialect.
 */

export interface Table {
  columns: string[];
  /** row-major raw string tokens, rows[i].length === columns.length */
  rows: string[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string, source = "<csv>"): Table {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${source}: file is empty`);
  }
  const columns = lines[0].split(",");
  if (lines.length === 1) {
    throw new CsvError(`${source}: no data rows`);
  }
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const row = lines[i].split(",");
    if (row.length !== columns.length) {
      throw new CsvError(
        `${source}:${i + 1}: expected ${columns.length} fields, got ${row.length}`,
      );
    }
    rows.push(row);
  }
  return { columns, rows };
}

export function serializeCsv(t: Table): string {
  const out = [t.columns.join(",")];
  for (const row of t.rows) {
    out.push(row.join(","));
  }
  return out.join("\n") + "\n";
}

export function requireColumns(
  t: Table,
  wanted: string[],
  source = "<csv>",
): void {
  for (const col of wanted) {
    if (!t.columns.includes(col)) {
      throw new CsvError(`${source}: missing required column '${col}'`);
    }
  }
}

export function column(t: Table, name: string): string[] {
  const idx = t.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`missing column '${name}'`);
  }
  return t.rows.map((r) => r[idx]);
}

export function numericColumn(t: Table, name: string, source = "<csv>"): number[] {
  return column(t, name).map((tok, i) => {
    const v = Number(tok);
    if (!Number.isFinite(v)) {
      throw new CsvError(
        `${source}: column '${name}' row ${i + 1}: '${tok}' is not a number`,
      );
    }
    return v;
  });
}
