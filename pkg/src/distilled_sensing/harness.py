"""Seeded Monte Carlo experiments over the adaptive and single-pass samplers.

Experiments are driven by an :class:`ExperimentConfig` and a master seed.
Every trial derives its own random streams from
``(master_seed, stream, trial_index, purpose)`` through
``numpy.random.SeedSequence``, so results are independent of worker count
and scheduling, trials are reproducible individually, and the two methods
see independent noise on a shared signal unless common random numbers are
requested. Calibration uses a dedicated ``pilot`` stream and evaluation an
``eval`` stream, so thresholds are never tuned on the trials they are
scored on.

CSV schemas (header row mandatory, floats printed with 17 significant
digits, booleans as 0/1):

    sweep / simulate:  method,snr,trial,threshold,fdp,ndp,detected
    snr_sweep:         method,p,snr,calibrated_tau,fdr,ndr
    boundary:          beta,rho
    lemma_report:      lemma,params,bound,empirical,pass
    phase:             r,median_fdp,median_ndp
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy import stats

from . import bounds
from ._version import __version__
from .errors import ParameterError
from .estimators import (
    SupportEstimate,
    ds_support_estimate,
    nonadaptive_threshold,
    threshold_support,
)
from .metrics import AggregateMetrics, TrialMetrics, aggregate, fdp, ndp
from .sensing import plan_allocation, run_distilled_sensing, run_nonadaptive
from .signals import (
    SignalParams,
    SparseSignal,
    generate_sparse_signal,
    sparsity_from_beta,
)

__all__ = [
    "ExperimentConfig",
    "MethodTrialResult",
    "TrialOutcome",
    "SweepRow",
    "SweepResult",
    "CalibrationResult",
    "SnrSweepRow",
    "PhaseRow",
    "PhaseTransitionResult",
    "LemmaCheck",
    "trial_rng",
    "run_trial",
    "default_threshold_grid",
    "sweep_thresholds",
    "calibrate_threshold_for_fdr",
    "evaluate_at_threshold",
    "snr_sweep",
    "validate_phase_transition",
    "validate_lemmas",
    "boundary_rows",
    "simulate_rows",
    "format_value",
    "write_csv",
    "write_metadata",
    "SWEEP_HEADER",
    "SNR_SWEEP_HEADER",
    "BOUNDARY_HEADER",
    "LEMMA_HEADER",
    "PHASE_HEADER",
]

GRID_SIZE = 200

SWEEP_HEADER = ("method", "snr", "trial", "threshold", "fdp", "ndp", "detected")
SNR_SWEEP_HEADER = ("method", "p", "snr", "calibrated_tau", "fdr", "ndr")
BOUNDARY_HEADER = ("beta", "rho")
LEMMA_HEADER = ("lemma", "params", "bound", "empirical", "pass")
PHASE_HEADER = ("r", "median_fdp", "median_ndp")

_METHOD_CHOICES = ("ds", "nonadaptive", "both")

_CONFIG_KEYS = (
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


@dataclass(frozen=True)
class ExperimentConfig:
    """Problem size, signal shape, and execution knobs for one experiment.

    Exactly one of ``beta`` (sparsity exponent, support size
    ``round(p ** (1 - beta))``) or ``num_nonzero`` (absolute support size)
    must be given. ``snr`` is the squared amplitude of the nonzero
    components under unit-precision observation. The adaptive method always
    receives a total budget of p, matching the single-pass design.
    """

    p: int
    snr: float
    beta: float | None = None
    num_nonzero: int | None = None
    trials: int = 1000
    decay: float = 0.75
    master_seed: int = 0
    method: str = "both"
    threshold_grid: tuple[float, ...] | None = None
    target_fdr: float | None = None
    common_random_numbers: bool = False

    def __post_init__(self) -> None:
        if self.p < 2:
            raise ParameterError(f"need p >= 2, got {self.p}")
        if not math.isfinite(self.snr) or self.snr < 0:
            raise ParameterError(f"snr must be finite and >= 0, got {self.snr}")
        if (self.beta is None) == (self.num_nonzero is None):
            raise ParameterError("give exactly one of beta or num_nonzero")
        if self.beta is not None and not 0 < self.beta < 1:
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta}")
        if self.num_nonzero is not None and not 0 <= self.num_nonzero <= self.p:
            raise ParameterError(
                f"num_nonzero must lie in [0, p], got {self.num_nonzero}"
            )
        if self.trials < 1:
            raise ParameterError(f"need trials >= 1, got {self.trials}")
        if not 0.5 < self.decay <= 1.0:
            raise ParameterError(f"decay must lie in (1/2, 1], got {self.decay}")
        if not 0 <= self.master_seed < 2**64:
            raise ParameterError("master_seed must be a 64-bit non-negative integer")
        if self.method not in _METHOD_CHOICES:
            raise ParameterError(
                f"method must be one of {_METHOD_CHOICES}, got {self.method!r}"
            )
        if self.threshold_grid is not None:
            grid = tuple(float(t) for t in self.threshold_grid)
            if not grid:
                raise ParameterError("threshold_grid may not be empty")
            if any(not math.isfinite(t) or t <= 0 for t in grid):
                raise ParameterError("threshold_grid entries must be positive and finite")
            object.__setattr__(self, "threshold_grid", tuple(sorted(grid)))
        if self.target_fdr is not None and not 0 <= self.target_fdr < 1:
            raise ParameterError(f"target_fdr must lie in [0, 1), got {self.target_fdr}")

    @property
    def resolved_num_nonzero(self) -> int:
        if self.num_nonzero is not None:
            return self.num_nonzero
        return sparsity_from_beta(self.p, self.beta)

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.snr)

    @property
    def methods(self) -> tuple[str, ...]:
        return ("ds", "nonadaptive") if self.method == "both" else (self.method,)

    @property
    def effective_beta(self) -> float | None:
        """The sparsity exponent, inferred from num_nonzero when not given."""
        if self.beta is not None:
            return self.beta
        s = self.num_nonzero
        if s is None or s < 1:
            return None
        b = 1.0 - math.log(s) / math.log(self.p)
        return b if 0 < b < 1 else None

    @property
    def implied_r(self) -> float:
        """Amplitude exponent ``snr / (2 ln p)`` of the configured signal."""
        return self.snr / (2.0 * math.log(self.p))

    def signal_params(self) -> SignalParams:
        return SignalParams(
            p=self.p, num_nonzero=self.resolved_num_nonzero, amplitude=self.amplitude
        )

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        """Build a config from a flat key-value mapping (config-file schema)."""
        unknown = set(mapping) - set(_CONFIG_KEYS)
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {}
        for key, value in mapping.items():
            if value is None:
                continue
            if key in ("p", "num_nonzero", "trials", "master_seed"):
                kwargs[key] = int(value)
            elif key in ("snr", "beta", "decay", "target_fdr"):
                kwargs[key] = float(value)
            elif key == "threshold_grid":
                kwargs[key] = tuple(float(t) for t in value)
            elif key == "common_random_numbers":
                kwargs[key] = bool(value)
            else:
                kwargs[key] = value
        if "p" not in kwargs or "snr" not in kwargs:
            raise ParameterError("config requires at least p and snr")
        return cls(**kwargs)

    def to_mapping(self) -> dict:
        """Flat JSON-safe mapping round-tripping through ``from_mapping``."""
        out: dict = {}
        for key in _CONFIG_KEYS:
            value = getattr(self, key)
            if value is None:
                continue
            out[key] = list(value) if key == "threshold_grid" else value
        return out


# ---------------------------------------------------------------------------
# Random stream derivation

_STREAM_CODES = {"main": 0, "pilot": 1, "eval": 2}
_PURPOSE_CODES = {"signal": 0, "ds": 1, "nonadaptive": 2, "shared": 3}


def trial_rng(
    master_seed: int, trial_index: int, purpose: str, stream: str = "main"
) -> np.random.Generator:
    """Deterministic generator for one (trial, purpose) pair.

    Seeds a PCG64 generator from the entropy tuple
    ``(master_seed, stream_code, trial_index, purpose_code)`` with stream
    codes main=0 / pilot=1 / eval=2 and purpose codes signal=0 / ds=1 /
    nonadaptive=2 / shared=3. The ``signal`` purpose is drawn once per
    trial and shared by both methods; ``shared`` replaces the per-method
    noise purposes when common random numbers are requested.
    """
    if stream not in _STREAM_CODES:
        raise ParameterError(f"unknown stream {stream!r}")
    if purpose not in _PURPOSE_CODES:
        raise ParameterError(f"unknown purpose {purpose!r}")
    if trial_index < 0:
        raise ParameterError(f"trial_index must be >= 0, got {trial_index}")
    entropy = (
        int(master_seed),
        _STREAM_CODES[stream],
        int(trial_index),
        _PURPOSE_CODES[purpose],
    )
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def _noise_purpose(config: ExperimentConfig, method: str) -> str:
    return "shared" if config.common_random_numbers else method


def _map_trials(fn: Callable[[int], object], n: int, workers: int) -> list:
    """Apply ``fn`` to 0..n-1, optionally across processes, in index order."""
    if workers <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    chunk = max(1, math.ceil(n / (workers * 8)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n), chunksize=chunk))


# ---------------------------------------------------------------------------
# Single trials

@dataclass(eq=False)
class MethodTrialResult:
    """One method's output on one trial, scored at its default threshold."""

    method: str
    estimate: SupportEstimate
    metrics: TrialMetrics
    trace: object | None = None
    observations: np.ndarray | None = None


@dataclass(eq=False)
class TrialOutcome:
    trial_index: int
    signal: SparseSignal
    results: dict[str, MethodTrialResult]


def default_threshold_grid(values: np.ndarray, size: int = GRID_SIZE) -> np.ndarray:
    """Log-spaced grid of ``size`` thresholds spanning the observation range.

    Thresholds must be positive, so the low end is clamped to the smallest
    positive observation or to 1e-4 times the largest, whichever is bigger;
    with no positive observation at all a fixed (1e-4, 1] grid is used.
    """
    values = np.asarray(values, dtype=np.float64)
    hi = float(values.max(initial=-np.inf))
    if not math.isfinite(hi) or hi <= 0:
        return np.geomspace(1e-4, 1.0, size)
    lo = max(float(values.min()), hi * 1e-4)
    if lo <= 0:
        lo = hi * 1e-4
    if lo >= hi:
        return np.full(size, hi)
    return np.geomspace(lo, hi, size)


def _operating_points(
    values: np.ndarray, signal_mask: np.ndarray, num_signals: int, grid: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """FDP, NDP, and selection counts when thresholding ``values`` at each
    grid point with the at-least rule."""
    all_sorted = np.sort(values)
    sig_sorted = np.sort(values[signal_mask])
    n_sel = values.size - np.searchsorted(all_sorted, grid, side="left")
    n_true = sig_sorted.size - np.searchsorted(sig_sorted, grid, side="left")
    n_false = n_sel - n_true
    fdp_arr = np.divide(
        n_false, n_sel, out=np.zeros(grid.size, dtype=np.float64), where=n_sel > 0
    )
    if num_signals > 0:
        ndp_arr = (num_signals - n_true) / num_signals
    else:
        ndp_arr = np.zeros(grid.size, dtype=np.float64)
    return fdp_arr, ndp_arr, n_sel


def _method_observations(
    config: ExperimentConfig, signal: SparseSignal, method: str, trial_index: int, stream: str
):
    """Run one method; returns (values, indices, trace_or_none)."""
    rng = trial_rng(config.master_seed, trial_index, _noise_purpose(config, method), stream)
    if method == "ds":
        allocation = plan_allocation(config.p, float(config.p), config.decay)
        trace = run_distilled_sensing(signal, allocation, rng)
        return trace.final_observations, trace.final_indices, trace
    y = run_nonadaptive(signal, rng)
    return y, np.arange(config.p, dtype=np.int64), None


def _na_default_tau(config: ExperimentConfig) -> float | None:
    """Closed-form single-pass threshold, when the regime supports one."""
    beta = config.effective_beta
    if beta is None or not config.implied_r > beta:
        return None
    return nonadaptive_threshold(config.p, config.implied_r, beta)


def run_trial(
    config: ExperimentConfig, trial_index: int, stream: str = "main"
) -> TrialOutcome:
    """Run every configured method on a freshly drawn signal.

    The adaptive method is scored at its default final-pass threshold. The
    single-pass method is scored at the closed-form threshold when the
    configured amplitude exponent exceeds the sparsity exponent; otherwise
    no fixed rule applies and it is scored at the grid threshold minimizing
    ``max(FDP, NDP)``, which exhibits the best it could have done.
    """
    if not 0 <= trial_index < config.trials:
        raise ParameterError(
            f"trial_index must lie in [0, {config.trials}), got {trial_index}"
        )
    signal = generate_sparse_signal(
        config.signal_params(), trial_rng(config.master_seed, trial_index, "signal", stream)
    )
    results: dict[str, MethodTrialResult] = {}
    for method in config.methods:
        values, indices, trace = _method_observations(
            config, signal, method, trial_index, stream
        )
        if method == "ds":
            estimate = ds_support_estimate(trace)
            measurements = trace.total_measurements
            spent = trace.spent_budget
        else:
            tau = _na_default_tau(config)
            if tau is None:
                grid = (
                    np.asarray(config.threshold_grid)
                    if config.threshold_grid is not None
                    else default_threshold_grid(values)
                )
                fdp_arr, ndp_arr, _ = _operating_points(
                    values, signal.values[indices] > 0, signal.num_nonzero, grid
                )
                tau = float(grid[int(np.argmin(np.maximum(fdp_arr, ndp_arr)))])
            estimate = threshold_support(values, tau)
            measurements = config.p
            spent = float(config.p)
        assert spent <= config.p * (1.0 + 1e-9), "trial exceeded its budget"
        metrics = TrialMetrics(
            fdp=fdp(estimate, signal),
            ndp=ndp(estimate, signal),
            detected=not estimate.is_empty,
            measurements_used=measurements,
            budget_spent=spent,
        )
        results[method] = MethodTrialResult(
            method=method,
            estimate=estimate,
            metrics=metrics,
            trace=trace,
            observations=None if method == "ds" else values,
        )
    return TrialOutcome(trial_index=trial_index, signal=signal, results=results)


# ---------------------------------------------------------------------------
# Threshold sweeps

class SweepRow(NamedTuple):
    method: str
    snr: float
    trial: int
    threshold: float
    fdp: float
    ndp: float
    detected: bool


@dataclass(eq=False)
class SweepResult:
    rows: list[SweepRow]
    config: ExperimentConfig


def _sweep_trial(config: ExperimentConfig, trial_index: int) -> list[SweepRow]:
    signal = generate_sparse_signal(
        config.signal_params(), trial_rng(config.master_seed, trial_index, "signal", "main")
    )
    observed = {
        m: _method_observations(config, signal, m, trial_index, "main")
        for m in config.methods
    }
    if config.threshold_grid is not None:
        grid = np.asarray(config.threshold_grid, dtype=np.float64)
    else:
        pooled = np.concatenate([observed[m][0] for m in config.methods])
        grid = default_threshold_grid(pooled)
    rows: list[SweepRow] = []
    for method in config.methods:
        values, indices, _ = observed[method]
        mask = signal.values[indices] > 0
        fdp_arr, ndp_arr, n_sel = _operating_points(
            values, mask, signal.num_nonzero, grid
        )
        rows.extend(
            SweepRow(
                method=method,
                snr=config.snr,
                trial=trial_index,
                threshold=float(t),
                fdp=float(f),
                ndp=float(n),
                detected=bool(k > 0),
            )
            for t, f, n, k in zip(grid, fdp_arr, ndp_arr, n_sel)
        )
    return rows


def sweep_thresholds(config: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Record the (FDP, NDP) operating point of every method at every grid
    threshold, for every trial.

    Without an explicit grid each trial gets a log-spaced grid spanning its
    own pooled observations, so rows from different trials have different
    threshold columns. Row order is trial-major, then method, then
    ascending threshold.
    """
    per_trial = _map_trials(partial(_sweep_trial, config), config.trials, workers)
    rows = [row for block in per_trial for row in block]
    return SweepResult(rows=rows, config=config)


def simulate_rows(
    config: ExperimentConfig, workers: int = 1
) -> list[SweepRow]:
    """Per-trial metrics at the default thresholds, in sweep row format."""
    outcomes = _map_trials(partial(_simulate_trial, config), config.trials, workers)
    return [row for block in outcomes for row in block]


def _simulate_trial(config: ExperimentConfig, trial_index: int) -> list[SweepRow]:
    outcome = run_trial(config, trial_index)
    return [
        SweepRow(
            method=method,
            snr=config.snr,
            trial=trial_index,
            threshold=result.estimate.threshold,
            fdp=result.metrics.fdp,
            ndp=result.metrics.ndp,
            detected=result.metrics.detected,
        )
        for method, result in outcome.results.items()
    ]


# ---------------------------------------------------------------------------
# FDR calibration and calibrated evaluation

class CalibrationResult(NamedTuple):
    tau: float
    achieved_fdr: float
    flagged: bool


class _PilotSummary(NamedTuple):
    null_pos: np.ndarray  # ascending positive null observations, possibly truncated
    sig_pos: np.ndarray  # ascending positive signal observations
    truncated: bool


def _pilot_summary(
    config: ExperimentConfig, method: str, cap: int, trial_index: int
) -> _PilotSummary:
    signal = generate_sparse_signal(
        config.signal_params(), trial_rng(config.master_seed, trial_index, "signal", "pilot")
    )
    values, indices, _ = _method_observations(config, signal, method, trial_index, "pilot")
    mask = signal.values[indices] > 0
    null_pos = np.sort(values[~mask & (values > 0)])
    sig_pos = np.sort(values[mask & (values > 0)])
    truncated = null_pos.size > cap
    if truncated:
        # Keep the top slice; any probe threshold below the cut already has
        # FDP >= cap/(cap + s), far above any calibratable target, so the
        # bisection direction stays correct there.
        null_pos = null_pos[-cap:]
    return _PilotSummary(null_pos=null_pos, sig_pos=sig_pos, truncated=truncated)


def _pilot_fdr(summaries: Sequence[_PilotSummary], tau: float, strict: bool) -> float:
    side = "right" if strict else "left"
    total = 0.0
    for sm in summaries:
        n_false = sm.null_pos.size - int(np.searchsorted(sm.null_pos, tau, side=side))
        n_true = sm.sig_pos.size - int(np.searchsorted(sm.sig_pos, tau, side=side))
        n_sel = n_false + n_true
        if n_sel:
            total += n_false / n_sel
    return total / len(summaries)


def calibrate_threshold_for_fdr(
    config: ExperimentConfig,
    method: str,
    target_fdr: float = 0.05,
    pilot_trials: int = 500,
    workers: int = 1,
) -> CalibrationResult:
    """Find the threshold whose pilot-trial FDR matches the target.

    Runs ``pilot_trials`` trials once on a dedicated stream, then bisects
    the threshold geometrically against those fixed replicates (common
    random numbers) until the empirical FDR is within 0.005 of the target
    or 40 bisection steps have been spent. If the target sits in a gap of
    achievable FDR values, the threshold with the closest FDR below the
    target is returned flagged. A target of 0 returns a threshold just
    above the largest observation, where the empty estimate gives FDR 0.
    """
    if method not in ("ds", "nonadaptive"):
        raise ParameterError(f"method must be 'ds' or 'nonadaptive', got {method!r}")
    if not 0 <= target_fdr < 1:
        raise ParameterError(f"target_fdr must lie in [0, 1), got {target_fdr}")
    if pilot_trials < 1:
        raise ParameterError(f"need pilot_trials >= 1, got {pilot_trials}")

    s = config.resolved_num_nonzero
    ratio = target_fdr / (1.0 - target_fdr)
    cap = int(16 * s + 4 * s * ratio) + 256
    summaries = _map_trials(
        partial(_pilot_summary, config, method, cap), pilot_trials, workers
    )
    strict = method == "ds"

    tops = [
        arr[-1]
        for sm in summaries
        for arr in (sm.null_pos, sm.sig_pos)
        if arr.size
    ]
    if not tops:
        # No positive observation anywhere: every positive threshold gives
        # the empty estimate and FDR 0.
        return CalibrationResult(tau=1.0, achieved_fdr=0.0, flagged=target_fdr > 0.005)
    hi = float(np.nextafter(max(tops), np.inf))
    if target_fdr == 0:
        return CalibrationResult(tau=hi, achieved_fdr=0.0, flagged=False)

    bottoms = [
        arr[0]
        for sm in summaries
        for arr in (sm.null_pos, sm.sig_pos)
        if arr.size
    ]
    lo = float(min(bottoms)) / 2.0
    fdr_lo = _pilot_fdr(summaries, lo, strict)
    if fdr_lo < target_fdr - 0.005:
        # Even the loosest threshold cannot reach the target from below.
        return CalibrationResult(tau=lo, achieved_fdr=fdr_lo, flagged=True)
    if abs(fdr_lo - target_fdr) <= 0.005:
        return CalibrationResult(tau=lo, achieved_fdr=fdr_lo, flagged=False)

    best_tau, best_fdr = hi, 0.0
    for _ in range(40):
        mid = math.sqrt(lo * hi)
        fdr_mid = _pilot_fdr(summaries, mid, strict)
        if target_fdr >= fdr_mid > best_fdr:
            best_tau, best_fdr = mid, fdr_mid
        if abs(fdr_mid - target_fdr) <= 0.005:
            return CalibrationResult(tau=mid, achieved_fdr=fdr_mid, flagged=False)
        if fdr_mid > target_fdr:
            lo = mid
        else:
            hi = mid
    return CalibrationResult(tau=best_tau, achieved_fdr=best_fdr, flagged=True)


def _eval_trial(
    config: ExperimentConfig, method: str, tau: float, stream: str, trial_index: int
) -> TrialMetrics:
    signal = generate_sparse_signal(
        config.signal_params(), trial_rng(config.master_seed, trial_index, "signal", stream)
    )
    values, indices, trace = _method_observations(config, signal, method, trial_index, stream)
    if method == "ds":
        estimate = ds_support_estimate(trace, tau)
        measurements, spent = trace.total_measurements, trace.spent_budget
    else:
        estimate = threshold_support(values, tau)
        measurements, spent = config.p, float(config.p)
    assert spent <= config.p * (1.0 + 1e-9), "trial exceeded its budget"
    return TrialMetrics(
        fdp=fdp(estimate, signal),
        ndp=ndp(estimate, signal),
        detected=not estimate.is_empty,
        measurements_used=measurements,
        budget_spent=spent,
    )


def evaluate_at_threshold(
    config: ExperimentConfig,
    method: str,
    tau: float,
    workers: int = 1,
    stream: str = "eval",
) -> list[TrialMetrics]:
    """Score ``config.trials`` fresh trials of one method at a fixed threshold."""
    if method not in ("ds", "nonadaptive"):
        raise ParameterError(f"method must be 'ds' or 'nonadaptive', got {method!r}")
    if not tau > 0:
        raise ParameterError(f"threshold must be positive, got {tau}")
    return _map_trials(
        partial(_eval_trial, config, method, tau, stream), config.trials, workers
    )


class SnrSweepRow(NamedTuple):
    method: str
    p: int
    snr: float
    calibrated_tau: float
    fdr: float
    ndr: float


def snr_sweep(
    config: ExperimentConfig,
    snr_list: Sequence[float],
    target_fdr: float = 0.05,
    pilot_trials: int = 500,
    workers: int = 1,
) -> list[SnrSweepRow]:
    """Calibrate each method's threshold at each SNR, then score fresh trials.

    For every (method, snr) pair the threshold is calibrated on the pilot
    stream and ``config.trials`` evaluation trials are aggregated into FDR
    and NDR. Rows are ordered method-major, then in the given SNR order.
    """
    if not len(snr_list):
        raise ParameterError("snr_list may not be empty")
    rows: list[SnrSweepRow] = []
    for method in config.methods:
        for snr in snr_list:
            cfg = replace(config, snr=float(snr))
            cal = calibrate_threshold_for_fdr(cfg, method, target_fdr, pilot_trials, workers)
            agg = aggregate(evaluate_at_threshold(cfg, method, cal.tau, workers))
            rows.append(
                SnrSweepRow(
                    method=method,
                    p=cfg.p,
                    snr=cfg.snr,
                    calibrated_tau=cal.tau,
                    fdr=agg.fdr,
                    ndr=agg.ndr,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Phase-transition and bound-validation experiments

class PhaseRow(NamedTuple):
    r: float
    median_fdp: float
    median_ndp: float


@dataclass(eq=False)
class PhaseTransitionResult:
    rows: list[PhaseRow]
    # Per r: each trial's best achievable max(FDP, NDP) over its grid.
    best_max: dict[float, np.ndarray]


def _phase_trial(
    p: int, beta: float, r: float, master_seed: int, trial_index: int
) -> tuple[float, float, float]:
    mu = math.sqrt(2.0 * r * math.log(p))
    config = ExperimentConfig(
        p=p, snr=mu * mu, beta=beta, master_seed=master_seed, method="nonadaptive"
    )
    signal = generate_sparse_signal(
        config.signal_params(), trial_rng(master_seed, trial_index, "signal", "main")
    )
    values, indices, _ = _method_observations(config, signal, "nonadaptive", trial_index, "main")
    mask = signal.values > 0
    grid = default_threshold_grid(values)
    fdp_arr, ndp_arr, _ = _operating_points(values, mask, signal.num_nonzero, grid)
    worst = np.maximum(fdp_arr, ndp_arr)
    best_idx = int(np.argmin(worst))
    if r > beta:
        tau = nonadaptive_threshold(p, r, beta)
        estimate = threshold_support(values, tau)
        used_fdp = fdp(estimate, signal)
        used_ndp = ndp(estimate, signal)
    else:
        used_fdp = float(fdp_arr[best_idx])
        used_ndp = float(ndp_arr[best_idx])
    return used_fdp, used_ndp, float(worst[best_idx])


def validate_phase_transition(
    p: int,
    beta: float,
    r_list: Sequence[float],
    trials: int,
    master_seed: int = 0,
    workers: int = 1,
) -> PhaseTransitionResult:
    """Median single-pass errors on both sides of the r = beta transition.

    Above the transition the closed-form threshold is used; below it each
    trial is scored at its best achievable ``max(FDP, NDP)`` over the
    threshold grid, exhibiting that no threshold works. The exact point
    r = beta is rejected.
    """
    if not 0 < beta < 1:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if not len(r_list):
        raise ParameterError("r_list may not be empty")
    if trials < 1:
        raise ParameterError(f"need trials >= 1, got {trials}")
    for r in r_list:
        if r <= 0:
            raise ParameterError(f"amplitude exponents must be positive, got {r}")
        if r == beta:
            raise ParameterError(
                f"r = beta = {beta} sits exactly on the transition and is not supported"
            )
    rows: list[PhaseRow] = []
    best_max: dict[float, np.ndarray] = {}
    for r in r_list:
        results = _map_trials(
            partial(_phase_trial, p, beta, float(r), master_seed), trials, workers
        )
        fdps, ndps, bests = (np.array(col) for col in zip(*results))
        rows.append(
            PhaseRow(
                r=float(r),
                median_fdp=float(np.median(fdps)),
                median_ndp=float(np.median(ndps)),
            )
        )
        best_max[float(r)] = bests
    return PhaseTransitionResult(rows=rows, best_max=best_max)


class LemmaCheck(NamedTuple):
    lemma: str
    params: str
    bound: float
    empirical: float
    passed: bool


def _check_rng(master_seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((int(master_seed), 1000 + tag)))
    )


def _envelope_check(master_seed: int, runs: int = 500) -> LemmaCheck:
    """Frequency of all retained-count envelopes holding vs its lower bound."""
    p, s, mu, eps = 2**14, 128, 4.2, 0.05
    z1 = p - s
    allocation = plan_allocation(p, float(p))
    budgets = allocation.budgets
    k = allocation.steps
    report = bounds.ds_success_prob_bound(s, z1, eps, mu, budgets)
    signal_values = np.zeros(p)
    support = np.arange(s, dtype=np.int64)  # support location is immaterial here
    signal_values[support] = mu
    signal = SparseSignal(values=signal_values, support=support)

    eps_l = [bounds.epsilon_j(s, z1, eps, mu, float(budgets[j - 1]), j) for j in range(1, k)]
    s_floor = s * np.cumprod([1.0 - e for e in eps_l])  # floor for passes 2..k
    z_lo = z1 * (0.5 - eps) ** np.arange(1, k)
    z_hi = z1 * (0.5 + eps) ** np.arange(1, k)

    rng = _check_rng(master_seed, 5)
    hits = 0
    for _ in range(runs):
        trace = run_distilled_sensing(signal, allocation, rng)
        ok = True
        for j in range(1, k):  # passes 2..k
            idx = trace.index_sets[j]
            s_j = int((idx < s).sum())
            z_j = idx.size - s_j
            if s_j < s_floor[j - 1] or not z_lo[j - 1] <= z_j <= z_hi[j - 1]:
                ok = False
                break
        hits += ok
    empirical = hits / runs
    return LemmaCheck(
        lemma="multi-pass-envelope",
        params=f"p={p};s={s};mu={mu};eps={eps};runs={runs};slack=0.02",
        bound=report.value,
        empirical=empirical,
        passed=bool(report.valid and empirical >= report.value - 0.02),
    )


def validate_lemmas(master_seed: int = 0) -> list[LemmaCheck]:
    """Monte Carlo and exact-oracle domination checks for every bound.

    Each row reports the bound value and the measured quantity at the worst
    grid point (for grid checks) or the violation frequency (for Monte
    Carlo checks, with the stated additive slack). The suite passes when
    every row passes.
    """
    checks: list[LemmaCheck] = []

    # Fraction of symmetric noise draws staying within eps of one half.
    m, eps, reps = 10_000, 0.02, 10_000
    rng = _check_rng(master_seed, 1)
    counts = rng.binomial(m, 0.5, size=reps)
    violations = float(np.mean(np.abs(counts / m - 0.5) > eps))
    bound_val = 2.0 * math.exp(-2.0 * m * eps * eps)
    checks.append(
        LemmaCheck(
            lemma="null-retention",
            params=f"m={m};eps={eps};replicates={reps};slack=0.004",
            bound=bound_val,
            empirical=violations,
            passed=violations <= bound_val + 0.004,
        )
    )

    # Fraction of replicates keeping fewer than (1 - eps') of m signals.
    m, mu, sigma, reps = 1_000, 2.0, 1.0, 2_000
    retention = bounds.signal_retention_bound(m, mu, sigma)
    keep_prob = 0.5 * (1.0 + math.erf(mu / sigma / math.sqrt(2.0)))
    rng = _check_rng(master_seed, 2)
    retained = rng.binomial(m, keep_prob, size=reps)
    violations = float(np.mean(retained < (1.0 - retention.eps_prime) * m))
    fail_bound = 1.0 - retention.prob
    checks.append(
        LemmaCheck(
            lemma="signal-retention",
            params=f"m={m};mu={mu};sigma={sigma};replicates={reps};slack=0.01",
            bound=fail_bound,
            empirical=violations,
            passed=bool(retention.valid and violations <= fail_bound + 0.01),
        )
    )

    # Chernoff lower-tail bound vs the exact binomial CDF, worst of 100 triples.
    rng = _check_rng(master_seed, 3)
    worst: tuple[float, float] | None = None
    for _ in range(100):
        m = int(rng.integers(2, 200))
        q = float(rng.uniform(0.05, 0.95))
        b = float(rng.uniform(0.0, m * q * 0.999))
        bound_val = bounds.binomial_lower_tail_bound(m, q, b)
        exact = float(stats.binom.cdf(math.floor(b), m, q))
        if worst is None or bound_val - exact < worst[0] - worst[1]:
            worst = (bound_val, exact)
    checks.append(
        LemmaCheck(
            lemma="chernoff-binomial",
            params="triples=100",
            bound=worst[0],
            empirical=worst[1],
            passed=worst[0] >= worst[1],
        )
    )

    # Gaussian tail sandwich against the exact complementary CDF.
    gammas = np.linspace(1.01, 6.0, 200)
    pairs = [bounds.gaussian_tail_bounds(float(g)) for g in gammas]
    exact_tails = stats.norm.sf(gammas)
    upper_margins = np.array([u for _, u in pairs]) - exact_tails
    lower_margins = exact_tails - np.array([l for l, _ in pairs])
    iu = int(np.argmin(upper_margins))
    il = int(np.argmin(lower_margins))
    checks.append(
        LemmaCheck(
            lemma="gaussian-tail-upper",
            params=f"grid=[1.01,6]x200;worst_gamma={gammas[iu]:.6g}",
            bound=pairs[iu][1],
            empirical=float(exact_tails[iu]),
            passed=bool(np.all(upper_margins >= 0)),
        )
    )
    checks.append(
        LemmaCheck(
            lemma="gaussian-tail-lower",
            params=f"grid=[1.01,6]x200;worst_gamma={gammas[il]:.6g}",
            bound=pairs[il][0],
            empirical=float(exact_tails[il]),
            passed=bool(np.all(lower_margins >= 0)),
        )
    )

    # Closed-form product lower bound vs the exact finite product.
    a, g, kk = 2.0, 4.0, 10
    bound_val = bounds.product_lower_bound(a, g, kk)
    exact = float(np.prod(1.0 - a ** -np.arange(1.0, kk + 1) / g))
    checks.append(
        LemmaCheck(
            lemma="product-bound",
            params=f"a={a};g={g};k={kk}",
            bound=bound_val,
            empirical=exact,
            passed=bound_val <= exact,
        )
    )

    # Exponential sandwich for powers close to one, worst of a random grid.
    rng = _check_rng(master_seed, 4)
    worst_up: tuple[float, float] | None = None
    worst_dn: tuple[float, float] | None = None
    for _ in range(200):
        f = float(rng.uniform(0.0, 0.5))
        g = float(rng.uniform(0.0, 10.0 / max(f, 1e-9)))
        pair = bounds.limit_lemma_check(f, g)
        grow, shrink = (1.0 + f) ** g, (1.0 - f) ** g
        if worst_up is None or pair.upper - grow < worst_up[0] - worst_up[1]:
            worst_up = (pair.upper, grow)
        if worst_dn is None or shrink - pair.lower < worst_dn[1] - worst_dn[0]:
            worst_dn = (pair.lower, shrink)
    checks.append(
        LemmaCheck(
            lemma="limit-upper",
            params="grid=200;fg<=10",
            bound=worst_up[0],
            empirical=worst_up[1],
            passed=worst_up[0] >= worst_up[1],
        )
    )
    checks.append(
        LemmaCheck(
            lemma="limit-lower",
            params="grid=200;fg<=10",
            bound=worst_dn[0],
            empirical=worst_dn[1],
            passed=worst_dn[0] <= worst_dn[1],
        )
    )

    checks.append(_envelope_check(master_seed))
    return checks


def boundary_rows(points: int = 100) -> list[tuple[float, float]]:
    """(beta, rho(beta)) over the grid i/points for i = 1..points-1."""
    if points < 2:
        raise ParameterError(f"need points >= 2, got {points}")
    betas = np.arange(1, points) / points
    return [(float(b), bounds.detection_boundary_rho(float(b))) for b in betas]


# ---------------------------------------------------------------------------
# CSV and metadata emission

def format_value(value) -> str:
    """Render one CSV cell: floats at 17 significant digits, booleans as 0/1."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """Write rows under a mandatory header; returns the data row count."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")
            count += 1
    return count


def write_metadata(csv_path, command: str, config_mapping: dict, extra: dict | None = None):
    """Write the effective run description next to the CSV; returns its path."""
    payload = {
        "tool": "dsense",
        "version": __version__,
        "command": command,
        "config": config_mapping,
    }
    if extra:
        payload.update(extra)
    meta_path = f"{csv_path}.meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta_path
