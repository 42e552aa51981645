/**
 * Input model: simulation curves and analytic bound overlays.
 *
 * Simulation CSV schema (from the simulator's `simulate` command):
 *   ebno_db,frames,cw_errors,cer,ber,avg_iters,decoder,seed
 * Bounds CSV schema (from the `bounds` command):
 *   ebno_db,rcb,spb
 */

import { readFileSync } from "node:fs";

import {
  CsvError,
  numericColumn,
  parseCsv,
  requireColumns,
  Table,
} from "./csv.js";

export const CURVE_COLUMNS = [
  "ebno_db",
  "frames",
  "cw_errors",
  "cer",
  "ber",
  "avg_iters",
  "decoder",
  "seed",
];

export const BOUND_COLUMNS = ["ebno_db", "rcb", "spb"];

export interface Series {
  label: string;
  kind: "curve" | "bound";
  path: string;
  table: Table;
  ebno: number[];
  /** one plottable line per value column: curves have one (cer), bound
   * files contribute one per bound column */
  lines: { name: string; values: number[] }[];
  /** binomial half-widths for error bars, curves only */
  errorBars?: number[];
}

export interface CurveSet {
  curves: Series[];
  bounds: Series[];
}

export function loadCurve(label: string, path: string): Series {
  const table = parseCsv(readFileSync(path, "utf-8"), path);
  requireColumns(table, CURVE_COLUMNS, path);
  const ebno = numericColumn(table, "ebno_db", path);
  const cer = numericColumn(table, "cer", path);
  const frames = numericColumn(table, "frames", path);
  for (const [i, v] of cer.entries()) {
    if (v < 0 || v > 1) {
      throw new CsvError(`${path}: cer out of (0,1] range in row ${i + 1}`);
    }
  }
  const errorBars = cer.map((p, i) =>
    frames[i] > 0 ? 1.96 * Math.sqrt((p * (1 - p)) / frames[i]) : 0,
  );
  return {
    label,
    kind: "curve",
    path,
    table,
    ebno,
    lines: [{ name: "cer", values: cer }],
    errorBars,
  };
}

export function loadBounds(label: string, path: string): Series {
  const table = parseCsv(readFileSync(path, "utf-8"), path);
  requireColumns(table, BOUND_COLUMNS, path);
  const ebno = numericColumn(table, "ebno_db", path);
  return {
    label,
    kind: "bound",
    path,
    table,
    ebno,
    lines: [
      { name: "rcb", values: numericColumn(table, "rcb", path) },
      { name: "spb", values: numericColumn(table, "spb", path) },
    ],
  };
}
