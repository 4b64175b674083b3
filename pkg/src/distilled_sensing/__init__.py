"""Adaptive multi-pass sampling for sparse signals in Gaussian noise.

The package provides the sampling procedure itself (iterative observe /
keep-the-positives refinement under a global precision budget), a
single-pass baseline, support and detection estimators, error metrics,
closed-form tail and retention bounds, and a seeded Monte Carlo harness
with CSV output and a command-line front end.
"""

from ._version import __version__
from .errors import ParameterError, UnidentifiableRegimeError
from .signals import (
    SignalParams,
    SparseSignal,
    amplitude_from_r,
    generate_sparse_signal,
    r_from_amplitude,
    sparsity_from_beta,
)
from .sensing import (
    DistillTrace,
    PrecisionAllocation,
    observe,
    plan_allocation,
    refine,
    run_distilled_sensing,
    run_nonadaptive,
    steps_k,
)
from .estimators import (
    SupportEstimate,
    detect,
    ds_default_threshold,
    ds_support_estimate,
    nonadaptive_threshold,
    threshold_support,
)
from .metrics import AggregateMetrics, TrialMetrics, aggregate, fdp, ndp
from .bounds import (
    BoundReport,
    default_epsilon,
    detection_boundary_rho,
    ds_success_prob_bound,
    epsilon_j,
    gaussian_tail_bounds,
    limit_lemma_check,
    min_detect_amplitude,
    null_retention_bound,
    binomial_lower_tail_bound,
    product_lower_bound,
    signal_retention_bound,
)
from .harness import (
    CalibrationResult,
    ExperimentConfig,
    PhaseTransitionResult,
    SweepResult,
    calibrate_threshold_for_fdr,
    evaluate_at_threshold,
    run_trial,
    snr_sweep,
    sweep_thresholds,
    trial_rng,
    validate_lemmas,
    validate_phase_transition,
)

__all__ = [
    "__version__",
    "ParameterError",
    "UnidentifiableRegimeError",
    "SignalParams",
    "SparseSignal",
    "amplitude_from_r",
    "r_from_amplitude",
    "sparsity_from_beta",
    "generate_sparse_signal",
    "PrecisionAllocation",
    "DistillTrace",
    "steps_k",
    "plan_allocation",
    "observe",
    "refine",
    "run_distilled_sensing",
    "run_nonadaptive",
    "SupportEstimate",
    "threshold_support",
    "ds_default_threshold",
    "ds_support_estimate",
    "detect",
    "nonadaptive_threshold",
    "TrialMetrics",
    "AggregateMetrics",
    "fdp",
    "ndp",
    "aggregate",
    "BoundReport",
    "default_epsilon",
    "gaussian_tail_bounds",
    "null_retention_bound",
    "signal_retention_bound",
    "binomial_lower_tail_bound",
    "epsilon_j",
    "ds_success_prob_bound",
    "detection_boundary_rho",
    "min_detect_amplitude",
    "product_lower_bound",
    "limit_lemma_check",
    "ExperimentConfig",
    "CalibrationResult",
    "SweepResult",
    "PhaseTransitionResult",
    "trial_rng",
    "run_trial",
    "sweep_thresholds",
    "calibrate_threshold_for_fdr",
    "evaluate_at_threshold",
    "snr_sweep",
    "validate_phase_transition",
    "validate_lemmas",
]
