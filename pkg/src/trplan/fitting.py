"""Maximum likelihood fitting and goodness of fit for lifetime data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize
from scipy.stats import kstwo, kstwobign

from . import distribution as trd
from .distribution import TRParams

N_PARAMS = 2
# Exact finite-n Kolmogorov distribution up to this size (and no ties).
KS_EXACT_MAX_N = 100

# Software failure times, hours from start of execution (n = 10).
DATA_SET_I = (519, 968, 1430, 1893, 2490, 3058, 3625, 4422, 5218, 5823)

# Millions of revolutions to failure of 23 ball bearings.
DATA_SET_II = (
    17.88, 28.92, 33.00, 41.52, 42.12, 45.60, 48.40, 51.84, 51.96, 54.12, 55.56, 67.80,
    68.64, 68.64, 68.88, 84.12, 93.12, 98.64, 105.12, 105.84, 127.92, 128.04, 173.40,
)


class DataFileError(ValueError):
    """Malformed lifetime data file; the message carries the line number."""


class LifetimeSample:
    """Sorted positive lifetimes, at least two of them."""

    def __init__(self, values):
        arr = np.sort(np.asarray(values, dtype=float).ravel())
        if arr.size < 2:
            raise ValueError(f"need at least 2 lifetimes, got {arr.size}")
        if not np.all(np.isfinite(arr)) or arr[0] <= 0:
            raise ValueError("lifetimes must be finite and positive")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return int(self._values.size)

    @property
    def has_ties(self) -> bool:
        return bool(np.any(np.diff(self._values) == 0))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"LifetimeSample(n={self.n}, min={self._values[0]:g}, max={self._values[-1]:g})"


@dataclass(frozen=True)
class FitResult:
    params: TRParams
    loglik: float
    aic: float
    bic: float
    ks_stat: float
    ks_pvalue: float
    converged: bool
    n: int

    def as_dict(self) -> dict:
        return {
            "sigma": self.params.sigma,
            "lambda": self.params.lam,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "ks_stat": self.ks_stat,
            "ks_pvalue": self.ks_pvalue,
            "converged": self.converged,
            "n": self.n,
        }


@dataclass(frozen=True)
class DescriptiveStats:
    minimum: float
    q1: float
    median: float
    mean: float
    q3: float
    maximum: float
    cs: float
    ck: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _values(data) -> np.ndarray:
    if isinstance(data, LifetimeSample):
        return data.values
    arr = np.asarray(data, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("data must not be empty")
    return arr


def log_likelihood(data, params: TRParams) -> float:
    """Sum of log densities; ``-inf`` when any density is not positive."""
    x = _values(data)
    dens = np.asarray(trd.pdf(x, params))
    if np.any(dens <= 0):
        return -math.inf
    return float(np.sum(np.log(dens)))


def information_criteria(loglik: float, n: int) -> tuple[float, float]:
    """AIC and BIC for the two-parameter model."""
    return -2.0 * loglik + 2 * N_PARAMS, -2.0 * loglik + N_PARAMS * math.log(n)


def ks_statistic(data, params: TRParams) -> float:
    x = np.sort(_values(data))
    n = x.size
    F = np.asarray(trd.cdf(x, params))
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_test(data, params: TRParams) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov statistic and p-value.

    The p-value is exact for ``n <= 100`` without ties and otherwise uses
    the limiting Kolmogorov distribution of ``sqrt(n) D``, the same switch
    R's ``ks.test`` makes.
    """
    x = np.sort(_values(data))
    n = x.size
    d = ks_statistic(x, params)
    ties = bool(np.any(np.diff(x) == 0))
    if n <= KS_EXACT_MAX_N and not ties:
        p = float(kstwo.sf(d, n))
    else:
        p = float(kstwobign.sf(math.sqrt(n) * d))
    return d, min(max(p, 0.0), 1.0)


def describe(data) -> DescriptiveStats:
    """Five-number summary, mean, moment skewness and (non-excess) kurtosis.

    Quartiles interpolate linearly at position ``1 + (n - 1) q``.
    """
    x = np.sort(_values(data))
    q1, med, q3 = np.quantile(x, [0.25, 0.5, 0.75], method="linear")
    dev = x - x.mean()
    m2 = np.mean(dev**2)
    if m2 > 0:
        cs = float(np.mean(dev**3) / m2**1.5)
        ck = float(np.mean(dev**4) / m2**2)
    else:
        cs = ck = math.nan
    return DescriptiveStats(float(x[0]), float(q1), float(med), float(x.mean()),
                            float(q3), float(x[-1]), cs, ck)


def _rayleigh_sigma(x: np.ndarray) -> float:
    return math.sqrt(np.sum(x * x) / (2 * x.size))


def fit_mle(data, starts=(-0.5, 0.0, 0.5), tol: float = 1e-8) -> FitResult:
    """Maximize the likelihood over ``sigma > 0`` and ``lam`` in [-1, 1].

    Nelder-Mead runs on ``(sigma / sigma_r, lam)``, with ``sigma_r`` the
    Rayleigh MLE, from each starting ``lam``; trial points with ``lam``
    outside the box are projected onto it.  The best of the runs is kept.
    """
    sample = data if isinstance(data, LifetimeSample) else LifetimeSample(data)
    x = sample.values
    scale = _rayleigh_sigma(x)

    def unpack(theta):
        return float(theta[0] * scale), float(min(1.0, max(-1.0, theta[1])))

    def nll(theta):
        s, lam = unpack(theta)
        if s <= 0:
            return math.inf
        ll = log_likelihood(x, TRParams(s, lam))
        return -ll if math.isfinite(ll) else math.inf

    best = None
    all_ok = True
    init_ll = log_likelihood(x, TRParams(scale, 0.0))
    for lam0 in starts:
        res = minimize(
            nll, np.array([1.0, lam0]), method="Nelder-Mead",
            options={"xatol": tol, "fatol": tol * 1e-2, "maxiter": 20000, "maxfev": 40000},
        )
        all_ok &= bool(res.success)
        if best is None or res.fun < best.fun:
            best = res

    sigma, lam = unpack(best.x)
    params = TRParams(sigma, lam)
    loglik = -float(best.fun)
    converged = all_ok and math.isfinite(loglik) and loglik >= init_ll and np.ptp(x) > 0
    aic, bic = information_criteria(loglik, sample.n)
    d, p = ks_test(x, params)
    return FitResult(params, loglik, aic, bic, d, p, bool(converged), sample.n)


def read_lifetimes(path) -> LifetimeSample:
    """Read one lifetime per line; blank lines and ``#`` comments are skipped."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataFileError(f"{path}: cannot read ({exc.strerror})") from exc
    return parse_lifetimes(text, source=str(path))


def parse_lifetimes(text: str, source: str = "<data>") -> LifetimeSample:
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            v = float(line)
        except ValueError:
            raise DataFileError(f"{source}:{lineno}: not a number: {line!r}") from None
        if not math.isfinite(v) or v <= 0:
            raise DataFileError(f"{source}:{lineno}: lifetime must be positive, got {line!r}")
        values.append(v)
    if len(values) < 2:
        raise DataFileError(f"{source}:{len(text.splitlines()) or 1}: need at least 2 lifetimes, found {len(values)}")
    return LifetimeSample(values)
