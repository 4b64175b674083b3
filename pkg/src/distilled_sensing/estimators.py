"""Support estimators and detection rules built on the sensing outputs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnidentifiableRegimeError
from .sensing import DistillTrace

__all__ = [
    "SupportEstimate",
    "threshold_support",
    "ds_default_threshold",
    "ds_support_estimate",
    "detect",
    "nonadaptive_threshold",
]


@dataclass(eq=False)
class SupportEstimate:
    """Sorted indices declared nonzero, together with the threshold used."""

    indices: np.ndarray
    threshold: float

    def __post_init__(self) -> None:
        self.indices = np.asarray(self.indices, dtype=np.int64)

    @property
    def size(self) -> int:
        return self.indices.size

    @property
    def is_empty(self) -> bool:
        return self.indices.size == 0


def threshold_support(
    values: np.ndarray,
    tau: float,
    indices: np.ndarray | None = None,
) -> SupportEstimate:
    """Declare nonzero every coordinate whose observation is at least ``tau``.

    ``values`` may be a full observation vector or a subvector aligned with
    the optional ``indices`` array. The threshold must be positive.
    """
    if not tau > 0:
        raise ParameterError(f"threshold must be positive, got {tau}")
    values = np.asarray(values, dtype=np.float64)
    keep = values >= tau
    if indices is None:
        found = np.flatnonzero(keep).astype(np.int64)
    else:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.shape != values.shape:
            raise ParameterError("indices and values must align")
        found = indices[keep]
    return SupportEstimate(indices=found, threshold=float(tau))


def ds_default_threshold(trace: DistillTrace) -> float:
    """Final-pass threshold ``sqrt(2 / c_k)`` with ``c_k`` the last pass's
    budget as a fraction of the dimension."""
    c_k = trace.allocation.budgets[-1] / trace.p
    return math.sqrt(2.0 / c_k)


def ds_support_estimate(trace: DistillTrace, tau: float | None = None) -> SupportEstimate:
    """Survivors of the final pass whose last observation strictly exceeds ``tau``.

    With no threshold given, uses :func:`ds_default_threshold`. An empty
    final index set yields an empty estimate.
    """
    if tau is None:
        tau = ds_default_threshold(trace)
    if not tau > 0:
        raise ParameterError(f"threshold must be positive, got {tau}")
    keep = trace.final_observations > tau
    return SupportEstimate(indices=trace.final_indices[keep], threshold=float(tau))


def detect(trace: DistillTrace) -> bool:
    """Declare a signal present when the default support estimate is non-empty."""
    return not ds_support_estimate(trace).is_empty


def nonadaptive_threshold(p: int, r: float, beta: float, alpha: float | None = None) -> float:
    """Threshold ``sqrt(2 * alpha * ln p)`` separating nulls from signals
    in the single-pass design.

    Valid only when the amplitude exponent exceeds the sparsity exponent
    (``r > beta``); ``alpha`` defaults to their midpoint and must lie
    strictly between them.
    """
    if p < 2:
        raise ParameterError(f"need p >= 2, got {p}")
    if not 0 < beta < 1:
        raise ParameterError(f"sparsity exponent must lie in (0, 1), got {beta}")
    if r <= beta:
        raise UnidentifiableRegimeError(
            f"single-pass threshold requires r > beta, got r={r}, beta={beta}"
        )
    if alpha is None:
        alpha = 0.5 * (beta + r)
    elif not beta < alpha < r:
        raise ParameterError(
            f"alpha must lie strictly between beta={beta} and r={r}, got {alpha}"
        )
    return math.sqrt(2.0 * alpha * math.log(p))
