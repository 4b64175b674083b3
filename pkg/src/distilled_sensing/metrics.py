"""Error proportions for support estimates and their aggregates over trials.

The false discovery proportion of an empty estimate and the non-discovery
proportion of a null signal are both defined as 0; consumers who need to
distinguish "nothing declared" from "all declarations correct" should carry
the separate detection flag alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .estimators import SupportEstimate
from .signals import SparseSignal

__all__ = ["TrialMetrics", "AggregateMetrics", "fdp", "ndp", "aggregate"]


def _as_index_array(obj) -> np.ndarray:
    if isinstance(obj, SupportEstimate):
        return obj.indices
    if isinstance(obj, SparseSignal):
        return obj.support
    return np.asarray(obj, dtype=np.int64)


def fdp(estimate, truth) -> float:
    """False discovery proportion |est \\ true| / |est|, 0 for an empty estimate."""
    est = _as_index_array(estimate)
    if est.size == 0:
        return 0.0
    true = _as_index_array(truth)
    hits = int(np.isin(est, true, assume_unique=True).sum())
    return (est.size - hits) / est.size


def ndp(estimate, truth) -> float:
    """Non-discovery proportion |true \\ est| / |true|, 0 for a null signal."""
    true = _as_index_array(truth)
    if true.size == 0:
        return 0.0
    est = _as_index_array(estimate)
    hits = int(np.isin(true, est, assume_unique=True).sum())
    return (true.size - hits) / true.size


@dataclass(frozen=True)
class TrialMetrics:
    """Per-trial error proportions plus the resources the trial consumed."""

    fdp: float
    ndp: float
    detected: bool
    measurements_used: int
    budget_spent: float


class AggregateMetrics(NamedTuple):
    fdr: float
    ndr: float
    detection_rate: float


def aggregate(trials: Iterable[TrialMetrics]) -> AggregateMetrics:
    """Arithmetic means of the per-trial proportions (FDR, NDR, detection rate)."""
    rows = list(trials)
    if not rows:
        raise ValueError("cannot aggregate zero trials")
    n = len(rows)
    return AggregateMetrics(
        fdr=sum(t.fdp for t in rows) / n,
        ndr=sum(t.ndp for t in rows) / n,
        detection_rate=sum(1 for t in rows if t.detected) / n,
    )
