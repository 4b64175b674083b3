import { describe, expect, it } from "vitest";
import {
  CsvSchemaError,
  SNR_SWEEP_HEADER,
  SWEEP_HEADER,
  parseSnrSweepCsv,
  parseSweepCsv,
} from "../src/schema.js";

const SWEEP_HEAD = SWEEP_HEADER.join(",");
const SNR_HEAD = SNR_SWEEP_HEADER.join(",");

function sweep(...rows: string[]): string {
  return [SWEEP_HEAD, ...rows].join("\n") + "\n";
}

function snrSweep(...rows: string[]): string {
  return [SNR_HEAD, ...rows].join("\n") + "\n";
}

function errorFor(fn: () => unknown): CsvSchemaError {
  try {
    fn();
  } catch (err) {
    expect(err).toBeInstanceOf(CsvSchemaError);
    return err as CsvSchemaError;
  }
  throw new Error("expected a CsvSchemaError");
}

describe("parseSweepCsv", () => {
  it("parses typed rows from a valid file", () => {
    const rows = parseSweepCsv(
      sweep("ds,20,0,2.846324384183925,0.10000000000000001,0,1", "nonadaptive,20,0,3.1,0,1,0"),
    );
    expect(rows).toHaveLength(2);
    expect(rows[0]).toEqual({
      method: "ds",
      snr: 20,
      trial: 0,
      threshold: 2.846324384183925,
      fdp: 0.10000000000000001,
      ndp: 0,
      detected: true,
    });
    expect(rows[1]!.method).toBe("nonadaptive");
    expect(rows[1]!.detected).toBe(false);
  });

  it("accepts CRLF line endings and no trailing newline", () => {
    const text = [SWEEP_HEAD, "ds,8,0,2.5,0.5,0.25,1"].join("\r\n");
    const rows = parseSweepCsv(text);
    expect(rows).toHaveLength(1);
    expect(rows[0]!.ndp).toBe(0.25);
  });

  it("accepts quoted cells", () => {
    const rows = parseSweepCsv(sweep('"ds",8,0,2.5,0,0,1'));
    expect(rows[0]!.method).toBe("ds");
  });

  it("returns no rows for a header-only file", () => {
    expect(parseSweepCsv(SWEEP_HEAD + "\n")).toEqual([]);
  });

  it("rejects an empty file", () => {
    const err = errorFor(() => parseSweepCsv(""));
    expect(err.line).toBe(1);
    expect(err.message).toMatch(/empty file/);
  });

  it("rejects a wrong header with expected vs got", () => {
    const err = errorFor(() => parseSweepCsv("method,trial,snr\nds,0,8\n"));
    expect(err.line).toBe(1);
    expect(err.message).toMatch(/bad header/);
    expect(err.message).toContain(SWEEP_HEAD);
    expect(err.message).toContain("method,trial,snr");
  });

  it("rejects the other schema's header", () => {
    const err = errorFor(() => parseSweepCsv(snrSweep("ds,256,8,2.5,0.05,0.5")));
    expect(err.line).toBe(1);
  });

  it("reports the line number of a short row", () => {
    const err = errorFor(() =>
      parseSweepCsv(sweep("ds,8,0,2.5,0,0,1", "ds,8,1,2.5,0,0")),
    );
    expect(err.line).toBe(3);
    expect(err.message).toMatch(/line 3: expected 7 fields, got 6/);
  });

  it("reports a blank interior line", () => {
    const err = errorFor(() => parseSweepCsv(sweep("", "ds,8,0,2.5,0,0,1")));
    expect(err.line).toBe(2);
    expect(err.message).toMatch(/blank line/);
  });

  it.each([
    ["negative snr", "ds,-1,0,2.5,0,0,1", "snr"],
    ["non-numeric snr", "ds,x,0,2.5,0,0,1", "snr"],
    ["fractional trial", "ds,8,0.5,2.5,0,0,1", "trial"],
    ["zero threshold", "ds,8,0,0,0,0,1", "threshold"],
    ["fdp above one", "ds,8,0,2.5,1.5,0,1", "fdp"],
    ["negative ndp", "ds,8,0,2.5,0,-0.1,1", "ndp"],
    ["detected out of range", "ds,8,0,2.5,0,0,2", "detected"],
    ["wordy detected", "ds,8,0,2.5,0,0,yes", "detected"],
    ["empty method", ",8,0,2.5,0,0,1", "method"],
  ])("rejects %s with field and line number", (_name, row, field) => {
    const err = errorFor(() => parseSweepCsv(sweep("ds,8,0,2.5,0,0,1", row)));
    expect(err.line).toBe(3);
    expect(err.message).toContain("line 3");
    expect(err.message).toContain(field);
  });

  it("rejects non-finite numerics", () => {
    expect(errorFor(() => parseSweepCsv(sweep("ds,inf,0,2.5,0,0,1"))).message).toContain("snr");
    expect(errorFor(() => parseSweepCsv(sweep("ds,8,0,nan,0,0,1"))).message).toContain(
      "threshold",
    );
  });

  it("reports unterminated quotes with a line number", () => {
    const err = errorFor(() => parseSweepCsv(sweep('"ds,8,0,2.5,0,0,1')));
    expect(err.message).toMatch(/line \d+/);
  });
});

describe("parseSnrSweepCsv", () => {
  it("parses typed rows from a valid file", () => {
    const rows = parseSnrSweepCsv(
      snrSweep(
        "ds,16384,25,3.0249889352018243,0.050000000000000003,0.0125",
        "nonadaptive,16384,25,4.4,0.05,0.3996",
      ),
    );
    expect(rows).toHaveLength(2);
    expect(rows[0]).toEqual({
      method: "ds",
      p: 16384,
      snr: 25,
      calibrated_tau: 3.0249889352018243,
      fdr: 0.050000000000000003,
      ndr: 0.0125,
    });
  });

  it("returns no rows for a header-only file", () => {
    expect(parseSnrSweepCsv(SNR_HEAD + "\n")).toEqual([]);
  });

  it("rejects the sweep header", () => {
    const err = errorFor(() => parseSnrSweepCsv(sweep("ds,8,0,2.5,0,0,1")));
    expect(err.line).toBe(1);
    expect(err.message).toContain(SNR_HEAD);
  });

  it.each([
    ["fractional p", "ds,16384.5,25,3.0,0.05,0.4", "p"],
    ["zero p", "ds,0,25,3.0,0.05,0.4", "p"],
    ["negative snr", "ds,16384,-2,3.0,0.05,0.4", "snr"],
    ["zero calibrated_tau", "ds,16384,25,0,0.05,0.4", "calibrated_tau"],
    ["fdr above one", "ds,16384,25,3.0,1.01,0.4", "fdr"],
    ["non-numeric ndr", "ds,16384,25,3.0,0.05,none", "ndr"],
  ])("rejects %s with field and line number", (_name, row, field) => {
    const err = errorFor(() => parseSnrSweepCsv(snrSweep(row)));
    expect(err.line).toBe(2);
    expect(err.message).toContain("line 2");
    expect(err.message).toContain(field);
  });
});
