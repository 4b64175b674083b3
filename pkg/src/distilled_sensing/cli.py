"""Command-line front end for the simulation harness.

Every output-producing subcommand writes its CSV to the explicit ``--out``
path and an effective-configuration sidecar to ``<out>.meta.json``; the
sidecar is sufficient to re-run the command exactly. Exit codes: 0 on
success, 2 on parameter or usage errors, 1 on internal errors (and for
``validate-lemmas`` when any check fails).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import traceback

from . import harness
from ._version import __version__
from .errors import ParameterError
from .harness import ExperimentConfig

logger = logging.getLogger(__name__)

_CONFIG_FLAG_KEYS = (
    "p",
    "beta",
    "num_nonzero",
    "snr",
    "trials",
    "decay",
    "master_seed",
    "method",
    "target_fdr",
    "threshold_grid",
    "common_random_numbers",
)


def _parse_float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH", help="JSON file with flat config keys")
    sub.add_argument("--p", type=int, help="signal dimension")
    sub.add_argument("--beta", type=float, help="sparsity exponent in (0, 1)")
    sub.add_argument("--num-nonzero", type=int, help="absolute support size")
    sub.add_argument("--snr", type=float, help="squared signal amplitude")
    sub.add_argument("--trials", type=int, help="number of Monte Carlo trials")
    sub.add_argument("--decay", type=float, help="budget decay ratio in (1/2, 1]")
    sub.add_argument(
        "--master-seed", "--seed", dest="master_seed", type=int, help="64-bit master seed"
    )
    sub.add_argument(
        "--method", choices=("ds", "nonadaptive", "both"), help="which sampler(s) to run"
    )
    sub.add_argument("--target-fdr", type=float, help="false discovery rate target")
    sub.add_argument(
        "--threshold-grid",
        type=_parse_float_list,
        metavar="T1,T2,...",
        help="explicit threshold grid instead of the per-trial default",
    )
    sub.add_argument(
        "--common-random-numbers",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="share one noise stream between methods within a trial",
    )


def _add_common_flags(sub: argparse.ArgumentParser, out_required: bool = True) -> None:
    sub.add_argument("--out", metavar="PATH", required=out_required, help="output CSV path")
    sub.add_argument(
        "--workers",
        type=int,
        default=os.cpu_count() or 1,
        help="max parallel trial workers (default: machine parallelism)",
    )
    sub.add_argument("--verbose", action="store_true", help="log progress to stderr")


def _effective_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge config-file values with flag overrides (flags win)."""
    mapping: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ParameterError(f"cannot read config file {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParameterError(f"config file {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ParameterError(f"config file {args.config} must hold a flat JSON object")
        mapping.update(loaded)
    for key in _CONFIG_FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = value
    return ExperimentConfig.from_mapping(mapping)


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _effective_config(args)
    rows = harness.simulate_rows(config, workers=args.workers)
    n = harness.write_csv(args.out, harness.SWEEP_HEADER, rows)
    harness.write_metadata(
        args.out, "simulate", config.to_mapping(), {"rows": n, "workers": args.workers}
    )
    logger.info("wrote %d rows to %s", n, args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _effective_config(args)
    result = harness.sweep_thresholds(config, workers=args.workers)
    n = harness.write_csv(args.out, harness.SWEEP_HEADER, result.rows)
    harness.write_metadata(
        args.out, "sweep", config.to_mapping(), {"rows": n, "workers": args.workers}
    )
    logger.info("wrote %d rows to %s", n, args.out)
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    config = _effective_config(args)
    target = args.target_fdr if args.target_fdr is not None else 0.05
    rows = []
    details: dict = {}
    for method in config.methods:
        cal = harness.calibrate_threshold_for_fdr(
            config, method, target_fdr=target, pilot_trials=args.pilot_trials,
            workers=args.workers,
        )
        if cal.flagged:
            print(
                f"warning: {method} target FDR {target} unreachable; "
                f"closest below is {cal.achieved_fdr:.6g} at tau={cal.tau:.6g}",
                file=sys.stderr,
            )
        agg = harness.aggregate(
            harness.evaluate_at_threshold(config, method, cal.tau, workers=args.workers)
        )
        rows.append((method, config.p, config.snr, cal.tau, agg.fdr, agg.ndr))
        details[method] = {
            "tau": cal.tau,
            "pilot_fdr": cal.achieved_fdr,
            "flagged": cal.flagged,
        }
    n = harness.write_csv(args.out, harness.SNR_SWEEP_HEADER, rows)
    harness.write_metadata(
        args.out,
        "calibrate",
        config.to_mapping(),
        {
            "rows": n,
            "workers": args.workers,
            "target_fdr": target,
            "pilot_trials": args.pilot_trials,
            "calibrations": details,
        },
    )
    return 0


def _cmd_snr_sweep(args: argparse.Namespace) -> int:
    config = _effective_config(args)
    target = args.target_fdr if args.target_fdr is not None else 0.05
    rows = harness.snr_sweep(
        config,
        args.snr_list,
        target_fdr=target,
        pilot_trials=args.pilot_trials,
        workers=args.workers,
    )
    n = harness.write_csv(args.out, harness.SNR_SWEEP_HEADER, rows)
    harness.write_metadata(
        args.out,
        "snr-sweep",
        config.to_mapping(),
        {
            "rows": n,
            "workers": args.workers,
            "target_fdr": target,
            "pilot_trials": args.pilot_trials,
            "snr_list": list(args.snr_list),
        },
    )
    return 0


def _cmd_phase_transition(args: argparse.Namespace) -> int:
    result = harness.validate_phase_transition(
        p=args.p,
        beta=args.beta,
        r_list=args.r_list,
        trials=args.trials,
        master_seed=args.master_seed,
        workers=args.workers,
    )
    n = harness.write_csv(args.out, harness.PHASE_HEADER, result.rows)
    harness.write_metadata(
        args.out,
        "phase-transition",
        {
            "p": args.p,
            "beta": args.beta,
            "r_list": list(args.r_list),
            "trials": args.trials,
            "master_seed": args.master_seed,
        },
        {"rows": n, "workers": args.workers},
    )
    return 0


def _cmd_boundary(args: argparse.Namespace) -> int:
    rows = harness.boundary_rows(points=args.points)
    n = harness.write_csv(args.out, harness.BOUNDARY_HEADER, rows)
    harness.write_metadata(args.out, "boundary", {"points": args.points}, {"rows": n})
    return 0


def _cmd_validate_lemmas(args: argparse.Namespace) -> int:
    checks = harness.validate_lemmas(master_seed=args.master_seed)
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"{status} {check.lemma} bound={check.bound:.6g} "
            f"empirical={check.empirical:.6g} ({check.params})"
        )
    if args.out:
        n = harness.write_csv(args.out, harness.LEMMA_HEADER, checks)
        harness.write_metadata(
            args.out, "validate-lemmas", {"master_seed": args.master_seed}, {"rows": n}
        )
    return 0 if all(c.passed for c in checks) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsense",
        description="Monte Carlo experiments for adaptive sparse-signal sampling",
    )
    parser.add_argument("--version", action="version", version=f"dsense {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("simulate", help="per-trial metrics at default thresholds")
    _add_config_flags(sub)
    _add_common_flags(sub)
    sub.set_defaults(handler=_cmd_simulate)

    sub = subs.add_parser("sweep", help="FDP/NDP operating points over a threshold grid")
    _add_config_flags(sub)
    _add_common_flags(sub)
    sub.set_defaults(handler=_cmd_sweep)

    sub = subs.add_parser("calibrate", help="calibrate a threshold to a target FDR")
    _add_config_flags(sub)
    _add_common_flags(sub)
    sub.add_argument("--pilot-trials", type=int, default=500, help="calibration trials")
    sub.set_defaults(handler=_cmd_calibrate)

    sub = subs.add_parser("snr-sweep", help="calibrated FDR/NDR across SNR values")
    _add_config_flags(sub)
    _add_common_flags(sub)
    sub.add_argument(
        "--snr-list", type=_parse_float_list, required=True, metavar="S1,S2,...",
        help="SNR values to sweep",
    )
    sub.add_argument("--pilot-trials", type=int, default=500, help="calibration trials")
    sub.set_defaults(handler=_cmd_snr_sweep)

    sub = subs.add_parser(
        "phase-transition", help="single-pass errors on both sides of r = beta"
    )
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--beta", type=float, required=True)
    sub.add_argument(
        "--r-list", type=_parse_float_list, required=True, metavar="R1,R2,...",
        help="amplitude exponents to test (r = beta excluded)",
    )
    sub.add_argument("--trials", type=int, default=200)
    sub.add_argument("--master-seed", "--seed", dest="master_seed", type=int, default=0)
    _add_common_flags(sub)
    sub.set_defaults(handler=_cmd_phase_transition)

    sub = subs.add_parser("boundary", help="detection boundary curve over a beta grid")
    sub.add_argument(
        "--points", type=int, default=100, help="grid density: betas i/points, 0 < i < points"
    )
    _add_common_flags(sub)
    sub.set_defaults(handler=_cmd_boundary)

    sub = subs.add_parser("validate-lemmas", help="run every bound-validation check")
    sub.add_argument("--master-seed", "--seed", dest="master_seed", type=int, default=0)
    _add_common_flags(sub, out_required=False)
    sub.set_defaults(handler=_cmd_validate_lemmas)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 1
    except Exception as exc:  # internal failure: report and exit 1
        traceback.print_exc()
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
