export { parseCsv, serializeCsv, CsvError, Table } from "./csv.js";
export {
  CurveSet,
  Series,
  loadBounds,
  loadCurve,
  CURVE_COLUMNS,
  BOUND_COLUMNS,
} from "./model.js";
export { renderSvg } from "./svg.js";
export { tidyCsv, extractSeries, TIDY_COLUMNS } from "./tidy.js";
export { run } from "./cli.js";
