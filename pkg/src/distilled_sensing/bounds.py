"""Closed-form tail bounds, retention bounds, and asymptotic boundaries.

Everything here is a pure function of its arguments. Probability-valued
bounds are returned raw (they can be vacuous, i.e. negative) together with
a validity flag for their preconditions; use ``BoundReport.clamped`` when a
number in [0, 1] is needed for display.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterError

__all__ = [
    "BoundReport",
    "SignalRetentionBound",
    "LimitLemmaBounds",
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
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BoundReport:
    """A bound value plus whether its preconditions held.

    ``value`` is kept raw so a vacuous bound (for instance a negative
    probability lower bound) stays distinguishable from a violated one;
    ``failing_step`` identifies the first pass whose condition failed, when
    the bound is per-pass.
    """

    value: float
    valid: bool
    failing_step: int | None = None

    @property
    def clamped(self) -> float:
        """The value pushed into [0, 1] for reporting."""
        return min(max(self.value, 0.0), 1.0)


class SignalRetentionBound(NamedTuple):
    eps_prime: float
    prob: float
    valid: bool


class LimitLemmaBounds(NamedTuple):
    upper: float
    lower: float


def default_epsilon(p: int) -> float:
    """Conventional slack choice ``p ** (-1/3)`` for the retention bounds."""
    if p < 2:
        raise ParameterError(f"need p >= 2, got {p}")
    return p ** (-1.0 / 3.0)


def gaussian_tail_bounds(gamma: float) -> tuple[float, float]:
    """Sandwich on the standard normal upper tail beyond ``gamma``.

    Returns ``(lower, upper)`` with
    ``upper = exp(-gamma^2/2) / sqrt(2 pi gamma^2)`` and
    ``lower = upper * (1 - 1/gamma^2)`` floored at 0. The lower bound is
    informative only for gamma > 1.
    """
    if gamma <= 0:
        raise ParameterError(f"need gamma > 0, got {gamma}")
    upper = math.exp(-0.5 * gamma * gamma) / (_SQRT_2PI * gamma)
    lower = max(upper * (1.0 - 1.0 / (gamma * gamma)), 0.0)
    return lower, upper


def null_retention_bound(m: int, eps: float) -> float:
    """Probability ``1 - 2 exp(-2 m eps^2)`` that the positive fraction of m
    symmetric noise draws stays within eps of one half."""
    if m < 1:
        raise ParameterError(f"need m >= 1, got {m}")
    if not 0 < eps < 0.5:
        raise ParameterError(f"need eps in (0, 1/2), got {eps}")
    return 1.0 - 2.0 * math.exp(-2.0 * m * eps * eps)


def signal_retention_bound(m: int, mu: float, sigma: float) -> SignalRetentionBound:
    """Retention guarantee for m signal coordinates of amplitude mu observed
    at noise level sigma.

    At least a ``1 - eps_prime`` fraction survives a positivity cut with
    probability at least ``prob``, where ``eps_prime = sigma / (mu sqrt(2 pi))``.
    Requires ``mu >= 2 sigma``; outside that regime the numbers are still
    returned but flagged invalid rather than raised, since the formula
    remains evaluable.
    """
    if m < 1:
        raise ParameterError(f"need m >= 1, got {m}")
    if mu <= 0 or sigma <= 0:
        raise ParameterError(f"need mu > 0 and sigma > 0, got mu={mu}, sigma={sigma}")
    eps_prime = sigma / (mu * _SQRT_2PI)
    prob = 1.0 - math.exp(-mu * m / (4.0 * sigma * _SQRT_2PI))
    return SignalRetentionBound(eps_prime=eps_prime, prob=prob, valid=mu >= 2.0 * sigma)


def binomial_lower_tail_bound(m: int, q: float, b: float) -> float:
    """Chernoff upper bound on ``Pr(Binomial(m, q) <= b)`` for ``b < m q``:
    ``((m - m q)/(m - b))^(m-b) * (m q / b)^b``."""
    if m < 1:
        raise ParameterError(f"need m >= 1, got {m}")
    if not 0 < q < 1:
        raise ParameterError(f"need q in (0, 1), got {q}")
    if not 0 <= b < m * q:
        raise ParameterError(f"need 0 <= b < m*q = {m * q}, got b={b}")
    # b = 0 is the limit value (mq/b)^b -> 1, giving (1-q)^m.
    head = ((m - m * q) / (m - b)) ** (m - b)
    tail = (m * q / b) ** b if b > 0 else 1.0
    return head * tail


def epsilon_j(s1: int, z1: int, eps: float, mu: float, r_j: float, j: int) -> float:
    """Pass-j retention slack
    ``sqrt((s1 + (1/2 + eps)^(j-1) * z1) / (2 pi mu^2 R_j))``.

    ``s1`` and ``z1`` are the signal and null counts entering the first
    pass and ``r_j`` the pass budget. The pass index must be given
    explicitly since it enters only through the geometric factor.
    """
    if s1 < 0 or z1 < 0:
        raise ParameterError(f"counts must be >= 0, got s1={s1}, z1={z1}")
    if not 0 < eps < 0.5:
        raise ParameterError(f"need eps in (0, 1/2), got {eps}")
    if mu <= 0 or r_j <= 0:
        raise ParameterError(f"need mu > 0 and R_j > 0, got mu={mu}, R_j={r_j}")
    if j < 1:
        raise ParameterError(f"pass index must be >= 1, got {j}")
    return math.sqrt((s1 + (0.5 + eps) ** (j - 1) * z1) / (2.0 * math.pi * mu * mu * r_j))


def ds_success_prob_bound(
    s1: int, z1: int, eps: float, mu: float, budgets: np.ndarray
) -> BoundReport:
    """Lower bound on the probability that every pass keeps its retained
    signal and null counts inside their envelopes.

    With k pass budgets, the bound is
    ``1 - sum_j exp(-s1 * prod_{l<j}(1 - eps_l) / (2 sqrt(2 pi)))
       - 2 * sum_j exp(-2 z1 (1/2 - eps)^(j-1) eps^2)``
    over j = 1..k-1, the first sum dropped when s1 = 0. Each pass j < k
    must satisfy ``R_j > (4/mu^2)(s1 + (1/2 + eps)^(j-1) z1)``; the first
    violation is reported via the valid flag and ``failing_step`` while the
    value is still computed.
    """
    budgets = np.asarray(budgets, dtype=np.float64)
    if budgets.ndim != 1 or budgets.size < 2:
        raise ParameterError("need at least two pass budgets")
    if np.any(budgets <= 0):
        raise ParameterError("every pass budget must be positive")
    if not 0 < eps < 0.5:
        raise ParameterError(f"need eps in (0, 1/2), got {eps}")
    if mu <= 0:
        raise ParameterError(f"need mu > 0, got {mu}")
    if s1 < 0 or z1 < 0:
        raise ParameterError(f"counts must be >= 0, got s1={s1}, z1={z1}")

    k = budgets.size
    failing_step: int | None = None
    for j in range(1, k):
        required = (4.0 / (mu * mu)) * (s1 + (0.5 + eps) ** (j - 1) * z1)
        if not budgets[j - 1] > required:
            failing_step = j
            break

    signal_sum = 0.0
    if s1 > 0:
        survival = 1.0
        for j in range(1, k):
            signal_sum += math.exp(-s1 * survival / (2.0 * _SQRT_2PI))
            survival *= 1.0 - epsilon_j(s1, z1, eps, mu, float(budgets[j - 1]), j)
    null_sum = 0.0
    for j in range(1, k):
        null_sum += math.exp(-2.0 * z1 * (0.5 - eps) ** (j - 1) * eps * eps)

    value = 1.0 - signal_sum - 2.0 * null_sum
    return BoundReport(value=value, valid=failing_step is None, failing_step=failing_step)


def detection_boundary_rho(beta: float) -> float:
    """Minimum amplitude exponent at which detection becomes possible, as a
    function of the sparsity exponent.

    Piecewise: 0 up to beta = 1/2, then ``beta - 1/2`` up to 3/4, then
    ``(1 - sqrt(1 - beta))^2``. Continuous and non-decreasing on (0, 1).
    """
    if not 0 < beta < 1:
        raise ParameterError(f"need beta in (0, 1), got {beta}")
    if beta <= 0.5:
        return 0.0
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def min_detect_amplitude(c1: float, ck: float) -> float:
    """Smallest reliably detectable amplitude ``max(sqrt(4/c1), 2 sqrt(2/ck))``
    for first- and last-pass budget fractions c1 and ck of the dimension."""
    if not 0 < c1 <= 1 or not 0 < ck <= 1:
        raise ParameterError(f"budget fractions must lie in (0, 1], got c1={c1}, ck={ck}")
    return max(math.sqrt(4.0 / c1), 2.0 * math.sqrt(2.0 / ck))


def product_lower_bound(a: float, g: float, k: int) -> float:
    """Lower bound on ``prod_{j=1..k} (1 - a^(-j)/g)`` for a > 1:
    ``exp(-(a^(-1) (1 - a^(-k)) / (1 - a^(-1))) / (g - a^(-1)))``.

    Requires ``g > 1/a`` with a small safety margin so every factor stays
    positive.
    """
    if a <= 1:
        raise ParameterError(f"need a > 1, got {a}")
    if k < 1:
        raise ParameterError(f"need k >= 1, got {k}")
    inv_a = 1.0 / a
    if not g > inv_a * (1.0 + 1e-6):
        raise ParameterError(f"need g > 1/a = {inv_a}, got g={g}")
    geometric = inv_a * (1.0 - a ** (-float(k))) / (1.0 - inv_a)
    return math.exp(-geometric / (g - inv_a))


def limit_lemma_check(f: float, g: float) -> LimitLemmaBounds:
    """Exponential sandwich for powers close to one: returns
    ``(exp(f g), exp(-2 f g))`` with ``(1+f)^g <= exp(f g)`` and
    ``(1-f)^g >= exp(-2 f g)`` whenever ``0 <= f <= 1/2`` and ``g >= 0``."""
    if not 0 <= f <= 0.5:
        raise ParameterError(f"need f in [0, 1/2], got {f}")
    if g < 0:
        raise ParameterError(f"need g >= 0, got {g}")
    return LimitLemmaBounds(upper=math.exp(f * g), lower=math.exp(-2.0 * f * g))
