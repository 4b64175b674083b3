export {
  CsvSchemaError,
  SNR_SWEEP_HEADER,
  SWEEP_HEADER,
  parseSnrSweepCsv,
  parseSweepCsv,
} from "./schema.js";
export type { SnrSweepRow, SweepRow } from "./schema.js";
export { renderFdpNdpScatter, renderNdrVsSnr } from "./figures.js";
export type { FigureOptions } from "./figures.js";
export { InputError, render } from "./render.js";
export type { FigureKind, PlotSpec } from "./render.js";
export { runCli } from "./cli.js";
export type { CliIo } from "./cli.js";
