/**
 * Strict parsing for the two CSV layouts produced by the simulation CLI.
 *
 * Every validation failure raises CsvSchemaError carrying the 1-based line
 * number of the offending row, so callers can print actionable diagnostics.
 */
import Papa from "papaparse";
import { z } from "zod";

export const SWEEP_HEADER = [
  "method",
  "snr",
  "trial",
  "threshold",
  "fdp",
  "ndp",
  "detected",
] as const;

export const SNR_SWEEP_HEADER = [
  "method",
  "p",
  "snr",
  "calibrated_tau",
  "fdr",
  "ndr",
] as const;

export class CsvSchemaError extends Error {
  readonly line: number;

  constructor(line: number, message: string) {
    super(message);
    this.name = "CsvSchemaError";
    this.line = line;
  }
}

function fail(line: number, detail: string): never {
  throw new CsvSchemaError(line, `line ${line}: ${detail}`);
}

// Cell validators. All operate on the raw strings papaparse hands back.
function numberCell(expect: string, ok: (v: number) => boolean) {
  return z.string().transform((raw, ctx) => {
    const v = raw.trim() === "" ? NaN : Number(raw);
    if (!Number.isFinite(v) || !ok(v)) {
      ctx.addIssue({ code: z.ZodIssueCode.custom, message: `expected ${expect}, got "${raw}"` });
      return z.NEVER;
    }
    return v;
  });
}

const methodCell = z.string().transform((raw, ctx) => {
  if (raw.trim() === "") {
    ctx.addIssue({ code: z.ZodIssueCode.custom, message: "expected a non-empty method name" });
    return z.NEVER;
  }
  return raw;
});

const flagCell = z.string().transform((raw, ctx) => {
  if (raw !== "0" && raw !== "1") {
    ctx.addIssue({ code: z.ZodIssueCode.custom, message: `expected 0 or 1, got "${raw}"` });
    return z.NEVER;
  }
  return raw === "1";
});

const sweepRowSchema = z.object({
  method: methodCell,
  snr: numberCell("a number >= 0", (v) => v >= 0),
  trial: numberCell("an integer >= 0", (v) => Number.isInteger(v) && v >= 0),
  threshold: numberCell("a number > 0", (v) => v > 0),
  fdp: numberCell("a number in [0, 1]", (v) => v >= 0 && v <= 1),
  ndp: numberCell("a number in [0, 1]", (v) => v >= 0 && v <= 1),
  detected: flagCell,
});

const snrSweepRowSchema = z.object({
  method: methodCell,
  p: numberCell("an integer >= 1", (v) => Number.isInteger(v) && v >= 1),
  snr: numberCell("a number >= 0", (v) => v >= 0),
  calibrated_tau: numberCell("a number > 0", (v) => v > 0),
  fdr: numberCell("a number in [0, 1]", (v) => v >= 0 && v <= 1),
  ndr: numberCell("a number in [0, 1]", (v) => v >= 0 && v <= 1),
});

export type SweepRow = z.infer<typeof sweepRowSchema>;
export type SnrSweepRow = z.infer<typeof snrSweepRowSchema>;

function parseTable<S extends z.ZodType<object>>(
  text: string,
  header: readonly string[],
  rowSchema: S,
): z.infer<S>[] {
  if (text.trim() === "") fail(1, `empty file; expected header "${header.join(",")}"`);

  const parsed = Papa.parse<string[]>(text, { delimiter: ",", header: false });
  for (const e of parsed.errors) {
    // papaparse reports structural problems (eg unterminated quotes) with a
    // 0-based row index
    fail((e.row ?? 0) + 1, e.message);
  }

  const grid = parsed.data;
  const last = grid[grid.length - 1];
  if (last !== undefined && last.length === 1 && last[0] === "") grid.pop(); // trailing newline

  const first = grid[0];
  if (first === undefined) fail(1, `empty file; expected header "${header.join(",")}"`);
  if (first.length !== header.length || header.some((h, i) => first[i] !== h)) {
    fail(1, `bad header; expected "${header.join(",")}", got "${first.join(",")}"`);
  }

  const rows: z.infer<S>[] = [];
  for (let i = 1; i < grid.length; i++) {
    const line = i + 1;
    const cells = grid[i];
    if (cells === undefined) continue;
    if (cells.length === 1 && cells[0] === "") fail(line, "blank line");
    if (cells.length !== header.length) {
      fail(line, `expected ${header.length} fields, got ${cells.length}`);
    }
    const record: Record<string, string> = {};
    header.forEach((h, j) => {
      record[h] = cells[j] ?? "";
    });
    const res = rowSchema.safeParse(record);
    if (!res.success) {
      const issue = res.error.issues[0];
      const field = issue && issue.path.length ? String(issue.path[0]) : "row";
      fail(line, `${field}: ${issue ? issue.message : "invalid value"}`);
    }
    rows.push(res.data);
  }
  return rows;
}

/** Parse per-trial operating-point rows (method,snr,trial,threshold,fdp,ndp,detected). */
export function parseSweepCsv(text: string): SweepRow[] {
  return parseTable(text, SWEEP_HEADER, sweepRowSchema);
}

/** Parse calibrated summary rows (method,p,snr,calibrated_tau,fdr,ndr). */
export function parseSnrSweepCsv(text: string): SnrSweepRow[] {
  return parseTable(text, SNR_SWEEP_HEADER, snrSweepRowSchema);
}
