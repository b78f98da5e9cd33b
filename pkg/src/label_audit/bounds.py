"""Explicit theoretical bounds on the advantage measures.

Every closed-form bound stated for the audited mechanisms is materialized
here so tests (and the bounds-check command) can assert that empirical
estimates never exceed them.  Where a statement hides universal constants,
the explicit proof-level expression is evaluated instead, since only that
is checkable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

__all__ = [
    "BoundReport",
    "thm1_exact",
    "thm1_upper",
    "lemmaA1_bound",
    "truebound",
    "confbased_bound",
    "rr_worstcase_adv",
    "thm2_thm3_bound_shape",
]


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound next to the empirical value it must dominate."""

    bound_name: str
    bound_value: float
    empirical_value: float
    empirical_stderr: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return bool(self.empirical_value <= self.bound_value + 3.0 * self.empirical_stderr)


def thm1_exact(p: float, k: int) -> float:
    """Exact feature-independent advantage min{p,1-p} - E[min{a,1-a}].

    Evaluated through the binomial law of the bag sum, independently of the
    Poisson-binomial convolution machinery.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if k < 1:
        raise ValueError("k must be >= 1")
    s = np.arange(k + 1)
    pmf = stats.binom.pmf(s, k, p)
    alpha = s / k
    return float(min(p, 1.0 - p) - pmf @ np.minimum(alpha, 1.0 - alpha))


def thm1_upper(p: float, k: int) -> float:
    """The sqrt(p(1-p)/k) branch of the feature-independent bound."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.sqrt(p * (1.0 - p) / k)


def _c_k(p: float, k: int) -> float:
    log8k = math.log(8.0 * k)
    return (
        log8k / 3.0 + math.sqrt(2.0 * log8k + 12.0 * k * p * (1.0 - p) * log8k) / 6.0
    ) / math.sqrt(k)


def lemmaA1_bound(p: float, mu: float, k: int) -> float:
    """Explicit general-distribution advantage bound in (p, mu, k)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 0.0 <= mu <= 0.25:
        raise ValueError("mu must lie in [0, 1/4]")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    const = math.exp(-1.5) + math.pi / 4.0 + math.pi / math.e
    lead = k**0.25 * math.sqrt(2.0 * _c_k(p, k))
    return lead * math.sqrt(const * math.sqrt(mu) / k**1.5) + mu / k


def truebound(mu: float, k: int, beta: float) -> tuple[float, float]:
    """(threshold, tail probability) pair for the advantage tail bound.

    The average per-bag gap exceeds the threshold with probability at most
    the returned tail mass (clamped to [0, 1]).
    """
    if not mu > 0:
        raise ValueError("mu must be > 0")
    if not 0.0 <= beta < (k - 1) * mu:
        raise ValueError("beta must satisfy 0 <= beta < (k-1)*mu")
    threshold = 9.0 * (k * mu + beta) / (k * math.sqrt((k - 1) * mu - beta))
    tail = (k + 1) * math.exp(-(beta**2) / (2.0 * k * mu + beta / 6.0))
    return threshold, min(1.0, tail)


def confbased_bound(p: float, k: int, delta: float) -> float:
    """High-probability bound on |multiplicative advantage| for aggregation.

    Valid for k >= 32*ln(1/delta)/(p(1-p)); at most a delta fraction of
    bags may exceed it in the feature-independent setting.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    log_term = math.log(1.0 / delta)
    if k < 32.0 * log_term / (p * (1.0 - p)):
        raise ValueError(f"k={k} below validity threshold {32.0 * log_term / (p * (1.0 - p)):.1f}")
    B = math.sqrt(2.0 * p * (1.0 - p) * log_term / k) + 2.0 * log_term / (3.0 * k)
    return 2.0 * B * math.log(2.0) / (p * (1.0 - p))


def rr_worstcase_adv(epsilon: float) -> float:
    """Distribution-free advantage cap for any eps-label-DP mechanism."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == math.inf:
        return 1.0
    return 1.0 - 2.0 / (1.0 + math.exp(epsilon))


def thm2_thm3_bound_shape(p: float, mu: float, mu_i: float, k: int) -> tuple[float, float]:
    """(expected, individual) advantage bound pair for general distributions.

    The expected-advantage side is the same explicit expression as
    :func:`lemmaA1_bound`; the individual side scales the explicit
    absolute-difference sum bound by mu_i = eta_i(1-eta_i).
    """
    adv_bound = lemmaA1_bound(p, mu, k)
    if mu_i < 0 or mu_i > 0.25:
        raise ValueError("mu_i must lie in [0, 1/4]")
    if mu_i == 0.0:
        return adv_bound, 0.0
    if not mu > 0:
        raise ValueError("mu must be > 0 when mu_i > 0")
    if k < 2.0 / mu * math.log(1.0 / mu):
        raise ValueError(f"k={k} below validity threshold {2.0 / mu * math.log(1.0 / mu):.1f}")
    abssum = 1.0 / k + k**0.25 * math.sqrt(2.0 * _c_k(p, k)) * math.sqrt(
        (1.0 - 2.0 * mu) ** k
        + math.pi / (8.0 * mu * k) ** 1.5
        + math.pi / (2.0 * math.e * mu * k**2)
    )
    return adv_bound, mu_i * abssum
