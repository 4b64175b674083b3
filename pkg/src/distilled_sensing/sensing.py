"""Multi-pass adaptive sensing under a global precision budget.

The procedure observes every coordinate of a sparse signal through additive
Gaussian noise whose variance is controlled by how much of the measurement
budget is spent on it, then repeatedly discards coordinates whose noisy
observation is not positive. Each pass spreads its slice of the budget
uniformly over the surviving coordinates, so later passes observe far fewer
coordinates at far higher precision. A non-adaptive single-pass counterpart
with the same total budget is provided for comparison.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .signals import SparseSignal

__all__ = [
    "PrecisionAllocation",
    "DistillTrace",
    "steps_k",
    "plan_allocation",
    "observe",
    "refine",
    "run_distilled_sensing",
    "run_nonadaptive",
]

logger = logging.getLogger(__name__)

# Relative slack for floating-point budget accounting.
_BUDGET_RTOL = 1e-9


def steps_k(p: int) -> int:
    """Number of passes used for dimension p: ``max(ceil(log2(ln p)), 0) + 2``.

    Grows doubly-logarithmically; equals 6 for every p from 2**14 to 2**20.
    """
    if p < 2:
        raise ParameterError(f"need p >= 2, got {p}")
    return max(math.ceil(math.log2(math.log(p))), 0) + 2


@dataclass(eq=False)
class PrecisionAllocation:
    """Per-pass budget split ``budgets[j]`` summing to at most ``total_budget``.

    Every entry must be positive, the sum may not exceed the total beyond
    floating-point slack, and each of the first ``steps - 1`` entries may
    shrink by no more than half from one pass to the next. The final entry
    is unconstrained relative to its predecessor so the last pass can be
    given a large share.
    """

    budgets: np.ndarray
    total_budget: float

    def __post_init__(self) -> None:
        self.budgets = np.asarray(self.budgets, dtype=np.float64)
        if self.budgets.ndim != 1 or self.budgets.size < 1:
            raise ParameterError("allocation needs at least one pass")
        if not np.all(np.isfinite(self.budgets)) or np.any(self.budgets <= 0):
            raise ParameterError("every pass budget must be positive and finite")
        if self.total_budget <= 0 or not math.isfinite(self.total_budget):
            raise ParameterError(f"total budget must be positive, got {self.total_budget}")
        spent = float(self.budgets.sum())
        if spent > self.total_budget * (1.0 + _BUDGET_RTOL):
            raise ParameterError(
                f"pass budgets sum to {spent}, exceeding the total {self.total_budget}"
            )
        head = self.budgets[:-1]
        if head.size >= 2:
            ratios = head[1:] / head[:-1]
            if np.any(ratios <= 0.5):
                j = int(np.argmax(ratios <= 0.5))
                raise ParameterError(
                    f"budget ratio {ratios[j]:.6g} at pass {j + 2} is <= 1/2; "
                    "each pass before the last must keep more than half the "
                    "previous pass's budget"
                )

    @property
    def steps(self) -> int:
        return self.budgets.size


def plan_allocation(p: int, total_budget: float, decay: float = 0.75) -> PrecisionAllocation:
    """Build the default schedule for dimension p and a given total budget.

    Uses ``steps_k(p)`` passes. The first ``k - 1`` budgets form a geometric
    sequence with the given decay ratio and the final budget equals the
    first, the whole schedule scaled so the budgets sum to ``total_budget``
    exactly. The decay must lie in (1/2, 1] so that early passes never give
    up more than half their budget.
    """
    if not 0.5 < decay <= 1.0:
        raise ParameterError(f"decay must lie in (1/2, 1], got {decay}")
    if total_budget <= 0 or not math.isfinite(total_budget):
        raise ParameterError(f"total budget must be positive, got {total_budget}")
    k = steps_k(p)
    weights = np.concatenate([decay ** np.arange(k - 1), [1.0]])
    budgets = (total_budget / weights.sum()) * weights
    return PrecisionAllocation(budgets=budgets, total_budget=float(total_budget))


def observe(
    signal: SparseSignal,
    index_set: np.ndarray,
    step_budget: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Observe the signal on ``index_set`` with the pass budget spread uniformly.

    Each retained coordinate gets precision ``gamma = step_budget / len(index_set)``
    and is observed as ``x_i + noise`` with noise variance ``1 / gamma``.
    Returns the observations aligned with ``index_set``.
    """
    if index_set.size == 0:
        raise ParameterError("cannot observe an empty index set")
    if step_budget <= 0:
        raise ParameterError(f"pass budget must be positive, got {step_budget}")
    gamma = step_budget / index_set.size
    noise = rng.standard_normal(index_set.size) / math.sqrt(gamma)
    return signal.values[index_set] + noise


def refine(index_set: np.ndarray, observations: np.ndarray) -> np.ndarray:
    """Keep the indices whose observation is strictly positive."""
    if index_set.shape != observations.shape:
        raise ParameterError("index set and observations must align")
    return index_set[observations > 0]


@dataclass(eq=False)
class DistillTrace:
    """Complete record of one adaptive run.

    ``index_sets[j]`` is the coordinate set entering pass j, starting from
    all of ``{0, ..., p-1}``; ``observations[j]`` and ``step_precisions[j]``
    are that pass's outputs. A pass whose index set is empty records no
    observations and precision 0. The survivors of the final pass, with
    their final observations, are the procedure's output.
    """

    index_sets: list[np.ndarray]
    step_precisions: list[float]
    observations: list[np.ndarray]
    allocation: PrecisionAllocation = field(repr=False)

    @property
    def p(self) -> int:
        return self.index_sets[0].size

    @property
    def steps(self) -> int:
        return len(self.index_sets)

    @property
    def final_indices(self) -> np.ndarray:
        return self.index_sets[-1]

    @property
    def final_observations(self) -> np.ndarray:
        return self.observations[-1]

    @property
    def total_measurements(self) -> int:
        """Count of individual coordinate observations across all passes."""
        return int(sum(s.size for s in self.index_sets))

    @property
    def spent_budget(self) -> float:
        """Budget actually consumed: sum over passes of measurements times precision."""
        return float(
            sum(y.size * g for y, g in zip(self.observations, self.step_precisions))
        )

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError on violation."""
        k = len(self.index_sets)
        assert k == len(self.observations) == len(self.step_precisions)
        assert np.array_equal(self.index_sets[0], np.arange(self.p))
        for j in range(k - 1):
            cur, nxt = self.index_sets[j], self.index_sets[j + 1]
            pos = np.searchsorted(cur, nxt)
            assert pos.size == 0 or (
                pos.max(initial=-1) < cur.size and np.array_equal(cur[pos], nxt)
            ), f"pass {j + 2} set is not nested in pass {j + 1} set"
        assert (
            self.spent_budget <= self.allocation.total_budget * (1.0 + _BUDGET_RTOL)
        ), f"spent {self.spent_budget} exceeds budget {self.allocation.total_budget}"


def run_distilled_sensing(
    signal: SparseSignal,
    allocation: PrecisionAllocation,
    rng: np.random.Generator,
) -> DistillTrace:
    """Run the full observe/refine loop and return its trace.

    Refinement happens after every pass except the last. If the retained set
    ever becomes empty the remaining passes are skipped and spend nothing.
    """
    index_sets: list[np.ndarray] = []
    precisions: list[float] = []
    observations: list[np.ndarray] = []
    current = np.arange(signal.p, dtype=np.int64)
    last = allocation.steps - 1
    for j, step_budget in enumerate(allocation.budgets):
        index_sets.append(current)
        if current.size == 0:
            precisions.append(0.0)
            observations.append(np.empty(0, dtype=np.float64))
            continue
        y = observe(signal, current, float(step_budget), rng)
        precisions.append(float(step_budget) / current.size)
        observations.append(y)
        if j < last:
            current = refine(current, y)
    trace = DistillTrace(
        index_sets=index_sets,
        step_precisions=precisions,
        observations=observations,
        allocation=allocation,
    )
    trace.validate()
    logger.debug(
        "adaptive run: p=%d steps=%d budget spent %.6f of %.6f, %d measurements",
        signal.p,
        allocation.steps,
        trace.spent_budget,
        allocation.total_budget,
        trace.total_measurements,
    )
    return trace


def run_nonadaptive(signal: SparseSignal, rng: np.random.Generator) -> np.ndarray:
    """Observe every coordinate once at unit precision (total budget p)."""
    return signal.values + rng.standard_normal(signal.p)
