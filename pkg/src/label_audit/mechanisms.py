"""Label privatization mechanisms.

Five PETs over a labeled dataset, each a randomized map from the label
vector to a privacy-protected release (features are always public):

* ``null``      -- releases nothing.
* ``rr``        -- randomized response: each label flipped with probability
                   1/(1+e^eps).
* ``llp``       -- random partition into bags of size k, releasing each
                   bag's exact fraction of positive labels.
* ``llp-lap``   -- LLP plus iid Laplace(1/(k*eps)) noise on each proportion,
                   released unclipped.
* ``llp-geom``  -- LLP plus two-sided geometric noise (success 1-e^-eps on
                   each side), clipped to [0,1]; stays on the grid {0..k}/k.

All samplers take an explicit numpy Generator and are pure given it, so
concurrent audits just use disjoint substreams (see :mod:`label_audit.rng`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "Mechanism",
    "PrivacyParams",
    "BagAssignment",
    "NullOutput",
    "NoisyLabels",
    "Proportions",
    "RealProportions",
    "GridProportions",
    "PrivOutput",
    "flip_probability",
    "rr_privatize",
    "llp_partition",
    "llp_privatize",
    "llp_lap_privatize",
    "llp_geom_privatize",
    "two_sided_geometric_pmf",
    "sample_two_sided_geometric",
    "geom_debias",
    "null_privatize",
    "privatize",
]


class Mechanism(str, enum.Enum):
    NULL = "null"
    RR = "rr"
    LLP = "llp"
    LLP_LAP = "llp-lap"
    LLP_GEOM = "llp-geom"


@dataclass(frozen=True)
class PrivacyParams:
    """Mechanism choice plus its privacy knobs.

    ``epsilon`` is ignored by null/llp (may be ``math.inf``); ``bag_size``
    is ignored by null/rr.
    """

    mechanism: Mechanism
    epsilon: float = math.inf
    bag_size: int = 1

    def __post_init__(self):
        mech = Mechanism(self.mechanism)
        object.__setattr__(self, "mechanism", mech)
        if mech in (Mechanism.RR, Mechanism.LLP_LAP, Mechanism.LLP_GEOM):
            if not self.epsilon > 0:
                raise ValueError(f"{mech.value} requires epsilon > 0")
        if mech in (Mechanism.LLP, Mechanism.LLP_LAP, Mechanism.LLP_GEOM):
            if self.bag_size < 1:
                raise ValueError(f"{mech.value} requires bag_size >= 1")

    @property
    def uses_bags(self) -> bool:
        return self.mechanism in (Mechanism.LLP, Mechanism.LLP_LAP, Mechanism.LLP_GEOM)

    def label(self) -> str:
        if self.mechanism is Mechanism.NULL:
            return "null"
        if self.mechanism is Mechanism.RR:
            return f"rr(eps={self.epsilon:g})"
        if self.mechanism is Mechanism.LLP:
            return f"llp(k={self.bag_size})"
        return f"{self.mechanism.value}(k={self.bag_size},eps={self.epsilon:g})"


@dataclass(frozen=True)
class BagAssignment:
    """Uniformly random partition of a prefix-permutation of ``range(m)``.

    ``bags`` is a (n_bags, k) index matrix; the ``dropped`` trailing examples
    (m mod k of them) are left out of every bag.
    """

    bags: np.ndarray
    dropped: int

    @property
    def n_bags(self) -> int:
        return self.bags.shape[0]

    @property
    def bag_size(self) -> int:
        return self.bags.shape[1]


@dataclass(frozen=True)
class NullOutput:
    pass


@dataclass(frozen=True)
class NoisyLabels:
    labels: np.ndarray


@dataclass(frozen=True)
class Proportions:
    bags: BagAssignment
    alphas: np.ndarray


@dataclass(frozen=True)
class RealProportions:
    bags: BagAssignment
    alphas: np.ndarray
    epsilon: float


@dataclass(frozen=True)
class GridProportions:
    bags: BagAssignment
    alphas: np.ndarray
    epsilon: float


PrivOutput = Union[NullOutput, NoisyLabels, Proportions, RealProportions, GridProportions]


def _check_labels(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError("labels must be a 1-d bit vector")
    if labels.size and not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be binary")
    return labels.astype(np.int64)


def flip_probability(epsilon: float) -> float:
    """Randomized-response flip probability pi = 1/(1+e^eps)."""
    if epsilon == math.inf:
        return 0.0
    return 1.0 / (1.0 + math.exp(epsilon))


def null_privatize(labels) -> NullOutput:
    """The no-release PET: discards the labels entirely."""
    return NullOutput()


def rr_privatize(labels, epsilon: float, rng: np.random.Generator) -> NoisyLabels:
    """Flip each label independently with probability 1/(1+e^eps)."""
    labels = _check_labels(labels)
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    pi = flip_probability(epsilon)
    flips = rng.random(labels.size) < pi
    return NoisyLabels(labels=np.where(flips, 1 - labels, labels))


def llp_partition(m: int, k: int, rng: np.random.Generator) -> BagAssignment:
    """Chunk a uniformly random permutation of range(m) into bags of size k.

    The m mod k trailing indices of the permutation are dropped, which keeps
    every bag an iid size-k sample.
    """
    if k < 1:
        raise ValueError("bag size must be >= 1")
    if m < k:
        raise ValueError(f"need at least k={k} examples, got m={m}")
    perm = rng.permutation(m)
    n_bags = m // k
    return BagAssignment(bags=perm[: n_bags * k].reshape(n_bags, k), dropped=m % k)


def llp_privatize(labels, bags: BagAssignment) -> Proportions:
    """Release each bag's exact fraction of positive labels."""
    labels = _check_labels(labels)
    if bags.bags.size and bags.bags.max() >= labels.size:
        raise ValueError("bag indices exceed the label vector")
    sums = labels[bags.bags].sum(axis=1)
    return Proportions(bags=bags, alphas=sums / bags.bag_size)


def llp_lap_privatize(
    labels, bags: BagAssignment, epsilon: float, rng: np.random.Generator
) -> RealProportions:
    """Exact proportions plus iid Laplace(1/(k*eps)) noise, unclipped."""
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    exact = llp_privatize(labels, bags)
    if epsilon == math.inf:
        noise = np.zeros(bags.n_bags)
    else:
        noise = rng.laplace(loc=0.0, scale=1.0 / (bags.bag_size * epsilon), size=bags.n_bags)
    return RealProportions(bags=bags, alphas=exact.alphas + noise, epsilon=epsilon)


def sample_two_sided_geometric(
    epsilon: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw W = Z+ - Z- with Z+/- iid Geometric(1 - e^-eps) on {0,1,2,...}.

    Each one-sided geometric is sampled by inverse CDF from one uniform, so
    a draw consumes exactly two uniforms from the stream.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    if epsilon == math.inf:
        return np.zeros(size, dtype=np.int64)
    log_q = -epsilon

    def one_sided() -> np.ndarray:
        u = 1.0 - rng.random(size)  # in (0, 1]
        return np.maximum(np.ceil(np.log(u) / log_q) - 1, 0).astype(np.int64)

    return one_sided() - one_sided()


def two_sided_geometric_pmf(j: np.ndarray, epsilon: float) -> np.ndarray:
    """P(W = j) = ((1-q)/(1+q)) * q^|j| with q = e^-eps."""
    q = math.exp(-epsilon)
    return (1.0 - q) / (1.0 + q) * q ** np.abs(np.asarray(j, dtype=np.float64))


def llp_geom_privatize(
    labels, bags: BagAssignment, epsilon: float, rng: np.random.Generator
) -> GridProportions:
    """Proportions plus two-sided geometric noise, clipped to the grid.

    The released value is clip((s + W)/k, 0, 1) for bag sum s, so outputs are
    exact grid points j/k.
    """
    labels = _check_labels(labels)
    if bags.bags.size and bags.bags.max() >= labels.size:
        raise ValueError("bag indices exceed the label vector")
    sums = labels[bags.bags].sum(axis=1)
    noise = sample_two_sided_geometric(epsilon, bags.n_bags, rng)
    clipped = np.clip(sums + noise, 0, bags.bag_size)
    return GridProportions(bags=bags, alphas=clipped / bags.bag_size, epsilon=epsilon)


def geom_debias(alpha_clip: float, epsilon: float, k: int) -> float:
    """E[unclipped noisy proportion | clipped value], per the memoryless law.

    Interior grid values are already conditionally unbiased; the two boundary
    values absorb a geometric tail whose conditional mean overshoots by
    1/(e^eps - 1) grid steps, i.e. 1/(k(e^eps - 1)) in proportion units.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    scaled = alpha_clip * k
    if not 0.0 <= alpha_clip <= 1.0 or abs(scaled - round(scaled)) > 1e-9:
        raise ValueError(f"alpha_clip={alpha_clip} is not on the grid {{0..{k}}}/{k}")
    if alpha_clip == 0.0:
        return -1.0 / (k * math.expm1(epsilon))
    if alpha_clip == 1.0:
        return 1.0 + 1.0 / (k * math.expm1(epsilon))
    return float(alpha_clip)


def privatize(labels, params: PrivacyParams, rng: np.random.Generator) -> PrivOutput:
    """Apply the mechanism named by ``params`` to a label vector."""
    mech = params.mechanism
    if mech is Mechanism.NULL:
        return null_privatize(labels)
    if mech is Mechanism.RR:
        return rr_privatize(labels, params.epsilon, rng)
    labels = _check_labels(labels)
    bags = llp_partition(labels.size, params.bag_size, rng)
    if mech is Mechanism.LLP:
        return llp_privatize(labels, bags)
    if mech is Mechanism.LLP_LAP:
        return llp_lap_privatize(labels, bags, params.epsilon, rng)
    return llp_geom_privatize(labels, bags, params.epsilon, rng)
