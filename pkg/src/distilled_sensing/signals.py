"""Sparse signal construction.

Signals live in R^p, are zero except on a small support set drawn uniformly
at random, and carry a single positive amplitude on every support index.
Sparsity and amplitude are commonly parameterized on logarithmic scales
(``beta`` for support size, ``r`` for squared amplitude), with helpers here
to convert to absolute units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "SignalParams",
    "SparseSignal",
    "sparsity_from_beta",
    "amplitude_from_r",
    "r_from_amplitude",
    "generate_sparse_signal",
]


@dataclass(frozen=True)
class SignalParams:
    """Dimension, support size, and on-support amplitude of a sparse signal."""

    p: int
    num_nonzero: int
    amplitude: float

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ParameterError(f"dimension must be positive, got p={self.p}")
        if not 0 <= self.num_nonzero <= self.p:
            raise ParameterError(
                f"support size must lie in [0, p], got {self.num_nonzero} with p={self.p}"
            )
        if not math.isfinite(self.amplitude) or self.amplitude < 0:
            raise ParameterError(f"amplitude must be finite and >= 0, got {self.amplitude}")


@dataclass(eq=False)
class SparseSignal:
    """A realized signal vector together with its true support.

    ``values`` has length p; ``support`` holds the sorted indices of the
    nonzero components (empty for a null signal).
    """

    values: np.ndarray
    support: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        self.support = np.asarray(self.support, dtype=np.int64)

    @property
    def p(self) -> int:
        return self.values.size

    @property
    def num_nonzero(self) -> int:
        return self.support.size


def sparsity_from_beta(p: int, beta: float) -> int:
    """Support size ``round(p ** (1 - beta))`` for sparsity exponent beta in (0, 1)."""
    if p < 2:
        raise ParameterError(f"need p >= 2, got {p}")
    if not 0 < beta < 1:
        raise ParameterError(f"sparsity exponent must lie in (0, 1), got {beta}")
    return int(round(p ** (1.0 - beta)))


def amplitude_from_r(p: int, r: float) -> float:
    """Amplitude ``sqrt(2 * r * ln p)`` for amplitude exponent r > 0."""
    if p < 2:
        raise ParameterError(f"need p >= 2, got {p}")
    if r <= 0:
        raise ParameterError(f"amplitude exponent must be positive, got {r}")
    return math.sqrt(2.0 * r * math.log(p))


def r_from_amplitude(p: int, amplitude: float) -> float:
    """Inverse of :func:`amplitude_from_r`: ``amplitude**2 / (2 ln p)``."""
    if p < 2:
        raise ParameterError(f"need p >= 2, got {p}")
    if amplitude < 0:
        raise ParameterError(f"amplitude must be >= 0, got {amplitude}")
    return amplitude**2 / (2.0 * math.log(p))


def generate_sparse_signal(params: SignalParams, rng: np.random.Generator) -> SparseSignal:
    """Draw a signal with a uniformly random support of the requested size."""
    support = rng.choice(params.p, size=params.num_nonzero, replace=False)
    support.sort()
    values = np.zeros(params.p, dtype=np.float64)
    values[support] = params.amplitude
    return SparseSignal(values=values, support=support)
