/** File-level entry point: read CSV input(s), validate, write one SVG. */
import { readFileSync, writeFileSync } from "node:fs";
import { renderFdpNdpScatter, renderNdrVsSnr } from "./figures.js";
import type { FigureOptions } from "./figures.js";
import {
  CsvSchemaError,
  parseSnrSweepCsv,
  parseSweepCsv,
} from "./schema.js";
import type { SnrSweepRow, SweepRow } from "./schema.js";

export type FigureKind = "fdp_ndp_scatter" | "ndr_vs_snr";

/** Everything needed to turn one or more CSV files into an SVG image. */
export interface PlotSpec extends FigureOptions {
  kind: FigureKind;
  inputs: string[];
  output: string;
}

/** Raised when an input file cannot be read at all (vs. a schema violation). */
export class InputError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "InputError";
  }
}

function loadAll<T>(paths: string[], parse: (text: string) => T[]): T[] {
  const rows: T[] = [];
  for (const path of paths) {
    let text: string;
    try {
      text = readFileSync(path, "utf8");
    } catch (err) {
      const code = (err as NodeJS.ErrnoException).code;
      throw new InputError(`cannot read ${path}${code ? ` (${code})` : ""}`);
    }
    let parsedRows: T[];
    try {
      parsedRows = parse(text);
    } catch (err) {
      if (err instanceof CsvSchemaError) {
        throw new CsvSchemaError(err.line, `${path}: ${err.message}`);
      }
      throw err;
    }
    for (const r of parsedRows) rows.push(r);
  }
  return rows;
}

/** Render spec.inputs to spec.output; returns the SVG text that was written. */
export function render(spec: PlotSpec): string {
  const opts: FigureOptions = { title: spec.title, xLabel: spec.xLabel, yLabel: spec.yLabel };
  const svg =
    spec.kind === "fdp_ndp_scatter"
      ? renderFdpNdpScatter(loadAll<SweepRow>(spec.inputs, parseSweepCsv), opts)
      : renderNdrVsSnr(loadAll<SnrSweepRow>(spec.inputs, parseSnrSweepCsv), opts);
  writeFileSync(spec.output, svg);
  return svg;
}
