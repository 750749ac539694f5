"""Simulation check of lot-acceptance probabilities.

Each trial draws ``n`` lifetimes from the true distribution, counts those
failing by ``t = t_ratio * spec_sigma`` and accepts the lot when the count is
at most ``c``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import distribution as trd
from .distribution import TRParams
from .plan import SamplingPlan, oc_value

# Trials per independently seeded block; block k always uses child stream k.
BLOCK_SIZE = 8192
DEFAULT_TRIALS = 100_000


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    acceptances: int
    estimate: float
    std_error: float
    analytic: float
    z_score: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _count_block(plan: SamplingPlan, params: TRParams, t: float, size: int, seed_seq) -> int:
    rng = np.random.default_rng(seed_seq)
    u = rng.random((size, plan.n))
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    lifetimes = trd.quantile(u, params)
    failures = np.count_nonzero(lifetimes <= t, axis=1)
    return int(np.count_nonzero(failures <= plan.c))


def simulate_plan(plan: SamplingPlan, true_params: TRParams, spec_sigma: float,
                  trials: int = DEFAULT_TRIALS, seed: int = 0) -> SimulationReport:
    """Estimate the acceptance probability of ``plan`` by simulation.

    Trials are split into fixed-size blocks, each with its own child stream
    spawned from ``seed``, so the result does not depend on evaluation order.
    ``z_score`` compares against the binomial OC value for the same truth;
    when every trial agrees the analytic standard error is used instead of
    the (zero) empirical one.
    """
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    if not spec_sigma > 0:
        raise ValueError(f"spec_sigma must be positive, got {spec_sigma!r}")
    trials = int(trials)
    t = plan.t_ratio * spec_sigma
    nblocks = -(-trials // BLOCK_SIZE)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    accepted = 0
    for k, child in enumerate(children):
        size = min(BLOCK_SIZE, trials - k * BLOCK_SIZE)
        accepted += _count_block(plan, true_params, t, size, child)

    est = accepted / trials
    se = math.sqrt(est * (1.0 - est) / trials)
    analytic = oc_value(plan, true_params.sigma / spec_sigma, true_params.lam)
    ref_se = se if se > 0 else math.sqrt(analytic * (1.0 - analytic) / trials)
    if ref_se > 0:
        z = (est - analytic) / ref_se
    else:
        z = 0.0 if est == analytic else math.copysign(math.inf, est - analytic)
    return SimulationReport(trials, accepted, est, se, analytic, z)
