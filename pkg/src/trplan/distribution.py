"""Transmuted Rayleigh lifetime distribution.

All functions accept scalars or numpy arrays for the evaluation point and
return a float for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_func

# Beyond this many scales e^{-x^2/2s^2} underflows; the cdf is exactly 1.
_UNDERFLOW_RATIO = 40.0


@dataclass(frozen=True)
class TRParams:
    """Scale ``sigma`` and transmutation ``lam`` of a transmuted Rayleigh law.

    ``lam = 0`` gives the ordinary Rayleigh distribution.
    """

    sigma: float
    lam: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if not (-1.0 <= self.lam <= 1.0):
            raise ValueError(f"lambda must lie in [-1, 1], got {self.lam!r}")


def _mean_factor(lam: float) -> float:
    return math.sqrt(math.pi) / 2.0 * (lam + math.sqrt(2.0) * (1.0 - lam))


def _as_nonneg(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("x must be nonnegative")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def pdf(x, params: TRParams):
    """Density ``x/s^2 * y * (1 - lam + 2 lam y)`` with ``y = exp(-x^2/2s^2)``."""
    arr = _as_nonneg(x)
    s, lam = params.sigma, params.lam
    y = np.exp(-(arr * arr) / (2.0 * s * s))
    return _out(arr / (s * s) * y * (1.0 - lam + 2.0 * lam * y), x)


def cdf(x, params: TRParams):
    arr = _as_nonneg(x)
    s, lam = params.sigma, params.lam
    z = (arr * arr) / (2.0 * s * s)
    y = np.exp(-z)
    # Lower half: (1 - y)(1 + lam y) keeps relative accuracy near 0.
    # Upper half: 1 - sf is monotone under rounding as F approaches 1.
    res = np.where(y >= 0.5, -np.expm1(-z) * (1.0 + lam * y), 1.0 - y * (1.0 - lam + lam * y))
    res = np.where(arr / s > _UNDERFLOW_RATIO, 1.0, np.clip(res, 0.0, 1.0))
    return _out(res, x)


def sf(x, params: TRParams):
    """Survival function ``1 - cdf``, computed without cancellation."""
    arr = _as_nonneg(x)
    s, lam = params.sigma, params.lam
    y = np.exp(-(arr * arr) / (2.0 * s * s))
    # 1 - (1-y)(1+lam y) = y (1 - lam + lam y)
    return _out(y * (1.0 - lam + lam * y), x)


def quantile(u, params: TRParams):
    """Inverse cdf in closed form.

    Writing ``y = exp(-x^2/2s^2)`` the cdf equation becomes the quadratic
    ``lam y^2 + (1 - lam) y - (1 - u) = 0`` whose root in (0, 1) is unique
    for ``|lam| <= 1``.
    """
    arr = np.asarray(u, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise ValueError("u must lie strictly inside (0, 1)")
    lam = params.lam
    q = 1.0 - arr
    # Upper tail: root y of lam y^2 + (1 - lam) y - q = 0, rationalised.
    b = 1.0 - lam
    y = 2.0 * q / (b + np.sqrt(b * b + 4.0 * lam * q))
    # Lower tail: w = 1 - y solves lam w^2 - (1 + lam) w + u = 0.
    a = 1.0 + lam
    w = 2.0 * arr / (a + np.sqrt(np.maximum(a * a - 4.0 * lam * arr, 0.0)))
    log_y = np.where(arr < 0.5, np.log1p(-w), np.log(y))
    x = params.sigma * np.sqrt(-2.0 * log_y)
    return _out(x, u)


def raw_moment(r: int, params: TRParams) -> float:
    """``E[X^r] = (r/2) s^r Gamma(r/2) (lam + 2^{r/2} (1 - lam))``."""
    if int(r) != r or r < 1:
        raise ValueError(f"moment order must be a positive integer, got {r!r}")
    s, lam = params.sigma, params.lam
    return float(r / 2.0 * s**r * gamma_func(r / 2.0) * (lam + 2.0 ** (r / 2.0) * (1.0 - lam)))


def mean(params: TRParams) -> float:
    return params.sigma * _mean_factor(params.lam)


def sigma_from_mu(mu: float, lam: float) -> float:
    """Scale whose distribution has mean ``mu`` for transmutation ``lam``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    if not (-1.0 <= lam <= 1.0):
        raise ValueError(f"lambda must lie in [-1, 1], got {lam!r}")
    return mu / _mean_factor(lam)


def sample(params: TRParams, n: int, seed=None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw ``n`` lifetimes by inverse-transform sampling.

    Either ``seed`` or an existing ``rng`` may be given; a given seed makes
    the output reproducible across platforms (PCG64).
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if rng is None:
        rng = np.random.default_rng(seed)
    u = rng.random(int(n))
    # random() draws from [0, 1); quantile needs u > 0.
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    return np.asarray(quantile(u, params))
