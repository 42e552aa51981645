/**
 * Tidy data layer: every input token re-emitted in long form, one row per
 * (series, source row, source column). Values are the untouched string
 * tokens of the inputs, so the layer is byte-faithful and a round-trip
 * check can compare tokens directly.
 *
 * Input tokens are comma-free by the parser's dialect; the user-supplied
 * series label is the one field that may contain commas or quotes, so it
 * alone is CSV-quoted when necessary.
 */

import { Table } from "./csv.js";
import { CurveSet } from "./model.js";

export const TIDY_COLUMNS = ["series", "kind", "row", "column", "value"];

function quoteLabel(label: string): string {
  if (/[",]/.test(label)) {
    return '"' + label.replace(/"/g, '""') + '"';
  }
  return label;
}

/** Split one tidy line into [series, rest...], honoring label quoting. */
function splitTidyLine(ln: string): string[] {
  let series: string;
  let rest: string;
  if (ln.startsWith('"')) {
    let i = 1;
    let out = "";
    while (i < ln.length) {
      if (ln[i] === '"') {
        if (ln[i + 1] === '"') {
          out += '"';
          i += 2;
          continue;
        }
        break;
      }
      out += ln[i];
      i += 1;
    }
    series = out;
    rest = ln.slice(i + 2); // skip closing quote and comma
  } else {
    const c = ln.indexOf(",");
    series = ln.slice(0, c);
    rest = ln.slice(c + 1);
  }
  return [series, ...rest.split(",")];
}

export function tidyCsv(set: CurveSet): string {
  const out: string[] = [TIDY_COLUMNS.join(",")];
  for (const s of [...set.curves, ...set.bounds]) {
    const t = s.table;
    const label = quoteLabel(s.label);
    t.rows.forEach((row, ri) => {
      t.columns.forEach((col, ci) => {
        out.push([label, s.kind, String(ri), col, row[ci]].join(","));
      });
    });
  }
  return out.join("\n") + "\n";
}

/** Reconstruct one series' table from tidy text (used by the round-trip
 * test and by downstream consumers of the data layer). */
export function extractSeries(tidy: string, label: string): Table {
  const lines = tidy.trim().split("\n");
  if (lines[0] !== TIDY_COLUMNS.join(",")) {
    throw new Error("not a tidy data-layer file");
  }
  const cells = new Map<string, string>();
  const columns: string[] = [];
  let nRows = 0;
  for (const ln of lines.slice(1)) {
    const [series, , row, column, value] = splitTidyLine(ln);
    if (series !== label) continue;
    if (!columns.includes(column)) columns.push(column);
    const r = Number(row);
    nRows = Math.max(nRows, r + 1);
    cells.set(`${r}:${column}`, value);
  }
  const rows: string[][] = [];
  for (let r = 0; r < nRows; r++) {
    rows.push(columns.map((c) => cells.get(`${r}:${c}`) ?? ""));
  }
  return { columns, rows };
}
