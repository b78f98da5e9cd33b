"""Bayes-optimal posteriors of the informed attacker.

Each function returns P(y_i = 1 | features, mechanism output) for one
example, conditioning only on the bag containing it: data are iid and noise
is independent across bags, so other bags carry no information about y_i.

For the aggregation mechanisms the posterior has the common Bayes form

    eta_i * sum_s w(s) P(sum_without_i = s-1) / sum_s w(s) P(sum = s)

where w(s) is the channel likelihood of the observed release given bag sum
s: a point indicator for plain LLP, a Laplace density for LLP+Lap, and the
clipped two-sided-geometric channel for LLP+Geom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mechanisms import PrivacyParams, flip_probability
from .pbin import pbin_all_leave_one_out, pbin_leave_one_out, pbin_pmf

__all__ = [
    "PosteriorRecord",
    "rr_posterior",
    "llp_posterior",
    "llp_lap_posterior",
    "geom_clip_likelihood",
    "geom_likelihood_matrix",
    "llp_geom_posterior",
    "llp_bag_posteriors",
    "lap_bag_posteriors",
    "geom_bag_posteriors",
]


@dataclass(frozen=True)
class PosteriorRecord:
    """One audited example: prior, posterior, and what was observed."""

    prior: float
    posterior: float
    params: PrivacyParams
    outcome: float


def rr_posterior(eta: float, observed_bit: int, epsilon: float) -> float:
    """Posterior after seeing one randomized-response bit."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if observed_bit not in (0, 1):
        raise ValueError("observed bit must be 0 or 1")
    pi = flip_probability(epsilon)
    if observed_bit == 1:
        num, den = (1.0 - pi) * eta, (1.0 - pi) * eta + pi * (1.0 - eta)
    else:
        num, den = pi * eta, pi * eta + (1.0 - pi) * (1.0 - eta)
    if den == 0.0:
        raise ValueError("observed bit has zero probability under this prior")
    return num / den


def llp_posterior(etas, i: int, s: int) -> float:
    """Posterior for bag member i after seeing the exact bag sum s."""
    full = pbin_pmf(etas)
    k = full.k
    if not 0 <= s <= k:
        raise ValueError(f"sum {s} outside support 0..{k}")
    if full.pmf[s] == 0.0:
        raise ValueError(f"bag sum {s} has zero probability for these etas")
    loo = pbin_leave_one_out(etas, i).pmf
    num = full.etas[i] * (loo[s - 1] if s >= 1 else 0.0)
    return min(1.0, num / full.pmf[s])


def _lap_weights(z: float, k: int, epsilon: float) -> np.ndarray:
    if epsilon == math.inf:
        # noiseless limit: unit weight on the nearest grid point
        w = np.zeros(k + 1)
        w[int(round(z * k))] = 1.0
        return w
    scale = 1.0 / (k * epsilon)
    return np.exp(-np.abs(z - np.arange(k + 1) / k) / scale) / (2.0 * scale)


def llp_lap_posterior(etas, i: int, z: float, epsilon: float) -> float:
    """Posterior for member i after seeing the Laplace-noised proportion z.

    Always well defined: the Laplace density is positive everywhere.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    full = pbin_pmf(etas)
    w = _lap_weights(z, full.k, epsilon)
    loo = pbin_leave_one_out(etas, i).pmf
    den = float(w @ full.pmf)
    if den == 0.0:
        raise ValueError("observed value has zero probability")
    num = full.etas[i] * float(w[1:] @ loo)
    return min(1.0, num / den)


def geom_clip_likelihood(s: int, z: float, k: int, epsilon: float) -> float:
    """P(clip((s + W)/k, [0,1]) = z) for the two-sided geometric W.

    Interior grid points carry the point mass of W; z=0 and z=1 absorb the
    lower and upper geometric tails.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    if not 0 <= s <= k:
        raise ValueError(f"sum {s} outside support 0..{k}")
    j = z * k
    if not 0.0 <= z <= 1.0 or abs(j - round(j)) > 1e-9:
        raise ValueError(f"z={z} is not on the grid {{0..{k}}}/{k}")
    j = int(round(j))
    q = math.exp(-epsilon)
    if j == 0:
        return q**s / (1.0 + q)  # P(W <= -s)
    if j == k:
        return q ** (k - s) / (1.0 + q)  # P(W >= k-s)
    return (1.0 - q) / (1.0 + q) * q ** abs(j - s)


def geom_likelihood_matrix(k: int, epsilon: float) -> np.ndarray:
    """Matrix L[s, j] = P(release j/k | bag sum s); rows sum to 1."""
    q = math.exp(-epsilon)
    s = np.arange(k + 1)[:, None]
    j = np.arange(k + 1)[None, :]
    L = (1.0 - q) / (1.0 + q) * q ** np.abs(j - s).astype(np.float64)
    L[:, 0] = q ** s[:, 0] / (1.0 + q)
    L[:, k] = q ** (k - s[:, 0]) / (1.0 + q)
    return L


def llp_geom_posterior(etas, i: int, z: float, epsilon: float) -> float:
    """Posterior for member i after seeing the clipped geometric release z."""
    full = pbin_pmf(etas)
    k = full.k
    if epsilon == math.inf:
        return llp_posterior(etas, i, int(round(z * k)))
    jz = z * k
    if not 0.0 <= z <= 1.0 or abs(jz - round(jz)) > 1e-9:
        raise ValueError(f"z={z} is not on the grid {{0..{k}}}/{k}")
    w = geom_likelihood_matrix(k, epsilon)[:, int(round(jz))]
    loo = pbin_leave_one_out(etas, i).pmf
    den = float(w @ full.pmf)
    num = full.etas[i] * float(w[1:] @ loo)
    return min(1.0, num / den)


def _bag_posteriors_from_weights(etas: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Posteriors for every bag member given channel weights w over sums."""
    full = pbin_pmf(etas)
    loo = pbin_all_leave_one_out(full.etas)
    den = float(w @ full.pmf)
    if den == 0.0:
        raise ValueError("observed value has zero probability")
    nums = full.etas * (loo @ w[1:])
    return np.clip(nums / den, 0.0, 1.0)


def llp_bag_posteriors(etas, s: int) -> np.ndarray:
    """Vector of llp_posterior values for all members of one bag."""
    etas = np.asarray(etas, dtype=np.float64)
    w = np.zeros(etas.size + 1)
    w[s] = 1.0
    return _bag_posteriors_from_weights(etas, w)


def lap_bag_posteriors(etas, z: float, epsilon: float) -> np.ndarray:
    etas = np.asarray(etas, dtype=np.float64)
    return _bag_posteriors_from_weights(etas, _lap_weights(z, etas.size, epsilon))


def geom_bag_posteriors(etas, z: float, epsilon: float) -> np.ndarray:
    etas = np.asarray(etas, dtype=np.float64)
    k = etas.size
    if epsilon == math.inf:
        return llp_bag_posteriors(etas, int(round(z * k)))
    w = geom_likelihood_matrix(k, epsilon)[:, int(round(z * k))]
    return _bag_posteriors_from_weights(etas, w)
