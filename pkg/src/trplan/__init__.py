"""Time-truncated acceptance sampling plans under the transmuted Rayleigh lifetime model."""

from .distribution import TRParams, cdf, mean, pdf, quantile, raw_moment, sample, sf, sigma_from_mu
from .plan import (
    DesignQuery,
    OCPoint,
    SamplingPlan,
    UnsatisfiablePlanError,
    binom_cdf,
    failure_prob,
    min_sample_size,
    min_scale_ratio,
    oc_value,
    producer_risk,
)

__version__ = "0.1.0"
