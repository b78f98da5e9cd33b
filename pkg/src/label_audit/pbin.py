"""Exact Poisson-binomial distributions for bag label sums.

The sum of a bag's labels, conditioned on its feature vectors, follows a
Poisson-binomial law with one Bernoulli parameter per bag member.  All
posteriors over aggregated labels reduce to these PMFs, so this module keeps
them exact: PMFs are built by iterative convolution in float64, and
leave-one-out PMFs are recomputed from scratch rather than deconvolved
(division by eta or 1-eta is unstable near 0/1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PBinPmf",
    "pbin_pmf",
    "pbin_pmf_batch",
    "pbin_leave_one_out",
    "pbin_all_leave_one_out",
]


@dataclass(frozen=True)
class PBinPmf:
    """PMF of a sum of independent Bernoulli(eta_j) variables.

    ``pmf[s]`` is the probability that exactly ``s`` of the ``len(etas)``
    labels are 1; the support is ``{0, ..., len(etas)}``.
    """

    etas: np.ndarray
    pmf: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "etas", np.asarray(self.etas, dtype=np.float64))
        object.__setattr__(self, "pmf", np.asarray(self.pmf, dtype=np.float64))

    @property
    def k(self) -> int:
        return self.etas.shape[0]


def _check_etas(etas: np.ndarray) -> np.ndarray:
    etas = np.asarray(etas, dtype=np.float64)
    if etas.ndim != 1 or etas.size == 0:
        raise ValueError("etas must be a non-empty 1-d vector")
    if np.any((etas < 0.0) | (etas > 1.0)) or not np.all(np.isfinite(etas)):
        raise ValueError("every eta must lie in [0, 1]")
    return etas


def _fold(etas: np.ndarray) -> np.ndarray:
    """Convolve Bernoulli PMFs one at a time; O(k^2) and exact in float64."""
    pmf = np.ones(1)
    for eta in etas:
        nxt = np.empty(pmf.size + 1)
        nxt[:-1] = pmf * (1.0 - eta)
        nxt[-1] = 0.0
        nxt[1:] += pmf * eta
        pmf = nxt
    return pmf


def pbin_pmf(etas) -> PBinPmf:
    """Exact PMF of the Poisson-binomial sum of Bernoulli(eta_j) labels."""
    etas = _check_etas(etas)
    return PBinPmf(etas=etas, pmf=_fold(etas))


def pbin_pmf_batch(etas: np.ndarray) -> np.ndarray:
    """Row-wise Poisson-binomial PMFs for a (bags, k) matrix of etas.

    Returns a (bags, k+1) array; row b equals ``pbin_pmf(etas[b]).pmf``.
    """
    etas = np.asarray(etas, dtype=np.float64)
    if etas.ndim != 2 or etas.shape[1] == 0:
        raise ValueError("etas must be a (bags, k) matrix with k >= 1")
    if np.any((etas < 0.0) | (etas > 1.0)):
        raise ValueError("every eta must lie in [0, 1]")
    nbags, k = etas.shape
    pmf = np.zeros((nbags, k + 1))
    pmf[:, 0] = 1.0
    for j in range(k):
        eta = etas[:, j : j + 1]
        upper = pmf[:, : j + 1] * eta
        pmf[:, : j + 1] *= 1.0 - eta
        pmf[:, 1 : j + 2] += upper
    return pmf


def pbin_leave_one_out(etas, i: int) -> PBinPmf:
    """PMF of the bag sum with member ``i`` excluded.

    Recomputed by a fresh convolution over the remaining k-1 etas.  For a
    single-member bag the result is the unit mass on 0 (empty product).
    """
    etas = _check_etas(etas)
    if not 0 <= i < etas.size:
        raise IndexError(f"member index {i} out of range for bag of size {etas.size}")
    rest = np.delete(etas, i)
    return PBinPmf(etas=rest, pmf=_fold(rest))


def pbin_all_leave_one_out(etas) -> np.ndarray:
    """Leave-one-out PMFs for every member of one bag, as a (k, k) array.

    Row i is the PMF over {0, ..., k-1} of the sum excluding member i.
    Uses prefix/suffix convolutions so the whole set costs O(k^2) convolution
    work per member instead of k full refolds; each row is still an exact
    convolution of honestly computed PMFs (no deconvolution).
    """
    etas = _check_etas(etas)
    k = etas.size
    if k == 1:
        return np.ones((1, 1))
    # prefix[i] = PMF of members [0, i); suffix[i] = PMF of members [i, k)
    prefix = [np.ones(1)]
    for eta in etas[:-1]:
        prev = prefix[-1]
        nxt = np.empty(prev.size + 1)
        nxt[:-1] = prev * (1.0 - eta)
        nxt[-1] = 0.0
        nxt[1:] += prev * eta
        prefix.append(nxt)
    suffix = [np.ones(1)]
    for eta in etas[:0:-1]:
        prev = suffix[-1]
        nxt = np.empty(prev.size + 1)
        nxt[:-1] = prev * (1.0 - eta)
        nxt[-1] = 0.0
        nxt[1:] += prev * eta
        suffix.append(nxt)
    suffix.reverse()
    out = np.empty((k, k))
    for i in range(k):
        out[i] = np.convolve(prefix[i], suffix[i])
    return out
