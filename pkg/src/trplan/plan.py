"""Single acceptance sampling plans for time-truncated life tests.

A sample of ``n`` items is put on test until time ``t``; the lot is accepted
when at most ``c`` of them fail.  Time and quality are expressed as ratios to
the specified scale ``sigma0``: ``t_ratio = t / sigma0`` and
``scale_ratio = sigma / sigma0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammaln

# Direct summation up to this n, regularized incomplete beta above.
DIRECT_SUM_MAX_N = 1000
# Linear ascent budget before switching to galloping + bisection.
_LINEAR_SEARCH_STEPS = 512


class UnsatisfiablePlanError(ValueError):
    """No finite sample size satisfies the consumer-risk constraint."""


@dataclass(frozen=True)
class DesignQuery:
    p_star: float
    c: int
    t_ratio: float
    lam: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.p_star < 1.0:
            raise ValueError(f"p_star must lie in (0, 1), got {self.p_star!r}")
        if int(self.c) != self.c or self.c < 0:
            raise ValueError(f"c must be a nonnegative integer, got {self.c!r}")
        if not self.t_ratio > 0:
            raise ValueError(f"t_ratio must be positive, got {self.t_ratio!r}")
        if not -1.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [-1, 1], got {self.lam!r}")

    @property
    def consumer_risk(self) -> float:
        return 1.0 - self.p_star


@dataclass(frozen=True)
class SamplingPlan:
    """Plan ``(n, c, t_ratio)``; ``p_star`` is informational and may be None."""

    n: int
    c: int
    t_ratio: float
    p_star: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.c) != self.c or self.c < 0:
            raise ValueError(f"c must be a nonnegative integer, got {self.c!r}")
        if self.c > self.n:
            raise ValueError(f"c={self.c} exceeds n={self.n}")
        if not self.t_ratio > 0:
            raise ValueError(f"t_ratio must be positive, got {self.t_ratio!r}")


@dataclass(frozen=True)
class OCPoint:
    scale_ratio: float
    p_fail: float
    prob_accept: float


def failure_prob(t_ratio: float, scale_ratio: float = 1.0, lam: float = 0.5) -> float:
    """Probability that one item fails before the truncation time."""
    if not t_ratio > 0:
        raise ValueError(f"t_ratio must be positive, got {t_ratio!r}")
    if not scale_ratio > 0:
        raise ValueError(f"scale_ratio must be positive, got {scale_ratio!r}")
    if not -1.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [-1, 1], got {lam!r}")
    z = (t_ratio / scale_ratio) ** 2 / 2.0
    y = math.exp(-z)
    return -math.expm1(-z) * (1.0 + lam * y)


def _tail_sum(lo: int, hi: int, n: int, p: float) -> float:
    """Sum of binomial pmf terms ``lo..hi``, max-shifted in log space."""
    i = np.arange(lo, hi + 1)
    logs = (gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
            + i * math.log(p) + (n - i) * math.log1p(-p))
    m = logs.max()
    return float(math.exp(m) * np.exp(logs - m).sum())


def _check_binom_args(c, n, p):
    if c < 0 or n < 0 or int(c) != c or int(n) != n:
        raise ValueError("c and n must be nonnegative integers")
    if c > n:
        raise ValueError(f"c={c} exceeds n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")


def binom_cdf(c: int, n: int, p: float) -> float:
    """``P[Bin(n, p) <= c]``.

    For ``n <= 1000`` the pmf terms are summed in log space; when the lower
    tail exceeds 1/2 the result is taken as one minus the upper tail, which
    keeps values near 1 accurate.  Larger ``n`` use the regularized
    incomplete beta ``I_{1-p}(n - c, c + 1)``.
    """
    _check_binom_args(c, n, p)
    c, n = int(c), int(n)
    if c == n or p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    if n > DIRECT_SUM_MAX_N:
        return float(betainc(n - c, c + 1, 1.0 - p))
    lower = _tail_sum(0, c, n, p)
    if lower <= 0.5:
        return lower
    return 1.0 - _tail_sum(c + 1, n, n, p)


def binom_sf(c: int, n: int, p: float) -> float:
    """``P[Bin(n, p) > c]``, the complement of :func:`binom_cdf`."""
    _check_binom_args(c, n, p)
    c, n = int(c), int(n)
    if c == n or p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    if n > DIRECT_SUM_MAX_N:
        return float(betainc(c + 1, n - c, p))
    upper = _tail_sum(c + 1, n, n, p)
    if upper <= 0.5:
        return upper
    return 1.0 - _tail_sum(0, c, n, p)


def min_sample_size(query: DesignQuery) -> SamplingPlan:
    """Smallest ``n`` with ``P[Bin(n, p) <= c] <= 1 - p_star`` at ``sigma = sigma0``."""
    c, beta = int(query.c), query.consumer_risk
    p = failure_prob(query.t_ratio, 1.0, query.lam)
    if p <= 0.0:
        raise UnsatisfiablePlanError(
            f"failure probability underflows to 0 at t_ratio={query.t_ratio}; no finite n exists"
        )

    def ok(n):
        return binom_cdf(c, n, p) <= beta

    n = c + 1
    for _ in range(_LINEAR_SEARCH_STEPS):
        if ok(n):
            return SamplingPlan(n, c, query.t_ratio, query.p_star)
        n += 1
    # Galloping then bisection; the binomial cdf is decreasing in n.
    lo, step = n - 1, 1
    hi = n
    while not ok(hi):
        lo = hi
        step *= 2
        hi = n + step
        if hi > 10**12:
            raise UnsatisfiablePlanError(f"no n below 1e12 satisfies the constraint (p={p:.3g})")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return SamplingPlan(hi, c, query.t_ratio, query.p_star)


def oc_value(plan: SamplingPlan, scale_ratio: float, lam: float = 0.5) -> float:
    """Lot acceptance probability when the true scale is ``scale_ratio * sigma0``."""
    return binom_cdf(plan.c, plan.n, failure_prob(plan.t_ratio, scale_ratio, lam))


def producer_risk(plan: SamplingPlan, scale_ratio: float, lam: float = 0.5) -> float:
    return 1.0 - oc_value(plan, scale_ratio, lam)


def oc_point(plan: SamplingPlan, scale_ratio: float, lam: float = 0.5) -> OCPoint:
    p = failure_prob(plan.t_ratio, scale_ratio, lam)
    return OCPoint(scale_ratio, p, binom_cdf(plan.c, plan.n, p))


def oc_curve(plan: SamplingPlan, scale_ratios, lam: float = 0.5) -> list[OCPoint]:
    return [oc_point(plan, float(r), lam) for r in scale_ratios]


def min_scale_ratio(plan: SamplingPlan, lam: float = 0.5, delta: float = 0.05,
                    resolution: float = 0.01) -> float:
    """Smallest quality ratio on a ``resolution`` grid with producer's risk ``<= delta``.

    The exact crossing is located by bisection on the monotone risk curve and
    then rounded up to the grid, so the returned ratio always satisfies the
    constraint.  Returns 1.0 when the plan already meets ``delta`` at the
    specified quality.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")

    def risk(r):
        return producer_risk(plan, r, lam)

    if plan.c >= plan.n or risk(1.0) <= delta:
        return 1.0
    lo, hi = 1.0, 2.0
    while risk(hi) > delta:
        lo, hi = hi, hi * 2.0
        if hi > 1e12:
            raise UnsatisfiablePlanError("producer's risk never falls to delta")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if risk(mid) > delta:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * hi:
            break
    k = math.ceil(round(hi / resolution, 9))
    # Guard against the grid point landing a hair below the crossing.
    while risk(k * resolution) > delta:
        k += 1
    while k > 1 / resolution and risk((k - 1) * resolution) <= delta:
        k -= 1
    return round(k * resolution, 10)
