/** Command line front end for the two figure kinds. */
import { parseArgs } from "node:util";
import { InputError, render } from "./render.js";
import type { FigureKind } from "./render.js";
import { CsvSchemaError, SNR_SWEEP_HEADER, SWEEP_HEADER } from "./schema.js";

const KINDS: Record<string, FigureKind> = {
  "fdp-ndp-scatter": "fdp_ndp_scatter",
  "ndr-vs-snr": "ndr_vs_snr",
};

const USAGE = `usage: dsplot <command> --in FILE [--in FILE ...] --out FILE [options]

commands:
  fdp-ndp-scatter  scatter of per-trial (FDP, NDP) operating points, one
                   [0,1]^2 panel per SNR value found in the input
                   input schema: ${SWEEP_HEADER.join(",")}
  ndr-vs-snr       NDR against SNR, one line per (method, problem size)
                   input schema: ${SNR_SWEEP_HEADER.join(",")}

options:
  --in FILE      input CSV; repeat to concatenate several files
  --out FILE     output SVG path
  --title TEXT   figure title
  --x-label TEXT / --y-label TEXT
                 axis label overrides
  -h, --help     show this message

exit codes: 0 success, 2 bad usage or invalid input CSV, 1 runtime failure
`;

export interface CliIo {
  out: (s: string) => void;
  err: (s: string) => void;
}

const DEFAULT_IO: CliIo = {
  out: (s) => process.stdout.write(s),
  err: (s) => process.stderr.write(s),
};

export function runCli(argv: string[], io: CliIo = DEFAULT_IO): number {
  const command = argv[0];
  if (command === undefined) {
    io.err(USAGE);
    return 2;
  }
  if (command === "-h" || command === "--help") {
    io.out(USAGE);
    return 0;
  }
  const kind = KINDS[command];
  if (kind === undefined) {
    io.err(`dsplot: unknown command "${command}"\n${USAGE}`);
    return 2;
  }

  let flags;
  try {
    flags = parseArgs({
      args: argv.slice(1),
      options: {
        in: { type: "string", multiple: true },
        out: { type: "string" },
        title: { type: "string" },
        "x-label": { type: "string" },
        "y-label": { type: "string" },
        help: { type: "boolean", short: "h" },
      },
      strict: true,
      allowPositionals: false,
    }).values;
  } catch (err) {
    io.err(`dsplot: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  if (flags.help) {
    io.out(USAGE);
    return 0;
  }
  if (!flags.in?.length || !flags.out) {
    io.err(`dsplot: --in and --out are required\n${USAGE}`);
    return 2;
  }

  try {
    render({
      kind,
      inputs: flags.in,
      output: flags.out,
      title: flags.title,
      xLabel: flags["x-label"],
      yLabel: flags["y-label"],
    });
  } catch (err) {
    if (err instanceof CsvSchemaError || err instanceof InputError) {
      io.err(`dsplot: ${err.message}\n`);
      return 2;
    }
    io.err(`dsplot: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
  return 0;
}
