"""Reconstruction-advantage measures.

Additive advantage is the optimal informed attacker's success probability
minus the optimal uninformed one's.  Conditioned on the bag's priors it
equals

    min{eta_i, 1-eta_i} - E_outcome[ min_b P(y_i = b | outcome) ],

which this module evaluates exactly wherever the outcome space is finite
(RR, LLP, LLP+Geom) and by Monte Carlo for the continuous Laplace channel.
Multiplicative advantage is the posterior-vs-prior log-odds gap, kept as an
extended real: deterministic posteriors are honest infinities, never
clamped, and ride through CDFs and percentiles as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mechanisms import (
    Mechanism,
    PrivacyParams,
    flip_probability,
    llp_geom_privatize,
    llp_lap_privatize,
    llp_partition,
    llp_privatize,
)
from .pbin import pbin_all_leave_one_out, pbin_pmf, pbin_pmf_batch
from .posterior import (
    PosteriorRecord,
    geom_bag_posteriors,
    geom_likelihood_matrix,
    lap_bag_posteriors,
    llp_bag_posteriors,
)

__all__ = [
    "AdvantageSample",
    "AdvantageEstimate",
    "additive_iadv_llp",
    "additive_iadv_rr",
    "additive_iadv_geom",
    "additive_iadv_lap",
    "additive_adv",
    "mult_adv",
    "scatter_samples",
    "make_samples",
    "empirical_cdf",
    "percentile",
    "hpadv_estimate",
    "bag_gap_llp",
    "bag_mean_gap_llp",
]


@dataclass(frozen=True)
class AdvantageSample:
    """One audited example's realized prior-vs-posterior gaps."""

    prior: float
    posterior: float
    additive_gap: float
    mult_adv: float


@dataclass(frozen=True)
class AdvantageEstimate:
    value: float
    stderr: float
    trials: int
    exact: bool

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be >= 0")


# ---------------------------------------------------------------------------
# exact per-bag additive gaps
# ---------------------------------------------------------------------------


def _gap_from_loo(eta: np.ndarray, loo: np.ndarray) -> np.ndarray:
    """Exact additive gap from leave-one-out PMFs.

    ``eta`` has one entry per audited member and ``loo`` one row per member.
    Uses P(sum=s) = eta*Q[s-1] + (1-eta)*Q[s], so the expected min-posterior
    is sum_s min{eta*Q[s-1], (1-eta)*Q[s]} without forming the posteriors.
    """
    k1 = loo.shape[1] + 1
    up = np.zeros((loo.shape[0], k1))
    up[:, 1:] = loo
    down = np.zeros((loo.shape[0], k1))
    down[:, :-1] = loo
    e = eta[:, None]
    exp_min = np.minimum(e * up, (1.0 - e) * down).sum(axis=1)
    return np.minimum(eta, 1.0 - eta) - exp_min


def _gap_from_loo_geom(eta: np.ndarray, loo: np.ndarray, epsilon: float) -> np.ndarray:
    """Exact additive gap over the clipped-geometric outcome grid."""
    k = loo.shape[1]
    L = geom_likelihood_matrix(k, epsilon)
    up = np.zeros((loo.shape[0], k + 1))
    up[:, 1:] = loo
    down = np.zeros((loo.shape[0], k + 1))
    down[:, :-1] = loo
    e = eta[:, None]
    n1 = (e * up) @ L
    n0 = ((1.0 - e) * down) @ L
    exp_min = np.minimum(n1, n0).sum(axis=1)
    return np.minimum(eta, 1.0 - eta) - exp_min


def bag_gap_llp(etas) -> np.ndarray:
    """Exact per-member additive gaps for one bag under plain LLP."""
    full = pbin_pmf(etas)
    loo = pbin_all_leave_one_out(full.etas)
    return _gap_from_loo(full.etas, loo)


def bag_mean_gap_llp(etas) -> float:
    """Bag-average additive gap (the per-bag quantity behind HPADV).

    Members sharing an eta share a gap, so a homogeneous bag needs a single
    leave-one-out PMF.
    """
    etas = np.asarray(etas, dtype=np.float64)
    if np.all(etas == etas[0]):
        loo = pbin_pmf_batch(etas[None, 1:]) if etas.size > 1 else np.ones((1, 1))
        return float(_gap_from_loo(etas[:1], loo)[0])
    return float(bag_gap_llp(etas).mean())


def additive_iadv_llp(etas, i: int) -> AdvantageEstimate:
    """Exact individual advantage for member i of an LLP bag."""
    full = pbin_pmf(etas)
    loo = pbin_pmf_batch(np.delete(full.etas, i)[None, :]) if full.k > 1 else np.ones((1, 1))
    gap = float(_gap_from_loo(full.etas[i : i + 1], loo)[0])
    return AdvantageEstimate(value=gap, stderr=0.0, trials=1, exact=True)


def additive_iadv_rr(eta: float, epsilon: float) -> AdvantageEstimate:
    """Closed-form individual advantage for randomized response."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    pi = flip_probability(epsilon)
    value = (min(eta, 1.0 - eta) - pi) if pi <= eta <= 1.0 - pi else 0.0
    return AdvantageEstimate(value=value, stderr=0.0, trials=1, exact=True)


def additive_iadv_geom(etas, i: int, epsilon: float) -> AdvantageEstimate:
    """Exact individual advantage for LLP+Geom (finite outcome grid)."""
    if epsilon == math.inf:
        return additive_iadv_llp(etas, i)
    full = pbin_pmf(etas)
    loo = pbin_pmf_batch(np.delete(full.etas, i)[None, :]) if full.k > 1 else np.ones((1, 1))
    gap = float(_gap_from_loo_geom(full.etas[i : i + 1], loo, epsilon)[0])
    return AdvantageEstimate(value=gap, stderr=0.0, trials=1, exact=True)


def _lap_weight_matrix(z: np.ndarray, k: int, epsilon: float) -> np.ndarray:
    scale = 1.0 / (k * epsilon)
    grid = np.arange(k + 1) / k
    return np.exp(-np.abs(z[:, None] - grid[None, :]) / scale) / (2.0 * scale)


def additive_iadv_lap(
    etas, i: int, epsilon: float, trials: int, rng: np.random.Generator
) -> AdvantageEstimate:
    """Monte-Carlo individual advantage for LLP+Lap.

    Samples (labels, noise) jointly; the min-posterior term is averaged over
    trials and the prior term is exact.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    full = pbin_pmf(etas)
    k = full.k
    loo = (pbin_pmf_batch(np.delete(full.etas, i)[None, :]) if k > 1 else np.ones((1, 1)))[0]
    labels = rng.random((trials, k)) < full.etas[None, :]
    sums = labels.sum(axis=1)
    z = sums / k + rng.laplace(scale=1.0 / (k * epsilon), size=trials)
    w = _lap_weight_matrix(z, k, epsilon)
    den = w @ full.pmf
    num = full.etas[i] * (w[:, 1:] @ loo)
    post = np.clip(num / den, 0.0, 1.0)
    mins = np.minimum(post, 1.0 - post)
    eta_i = full.etas[i]
    value = min(eta_i, 1.0 - eta_i) - float(mins.mean())
    stderr = float(mins.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return AdvantageEstimate(value=value, stderr=stderr, trials=trials, exact=False)


# ---------------------------------------------------------------------------
# expected advantage over feature draws
# ---------------------------------------------------------------------------


def _member0_gaps(etas: np.ndarray, params: PrivacyParams, rng: np.random.Generator) -> np.ndarray:
    """Additive gap of member 0 for each bag in a (bags, k) eta matrix.

    Exact for LLP and LLP+Geom; for LLP+Lap each bag contributes one sampled
    (labels, noise) outcome, still unbiased for the expected gap.
    """
    nbags, k = etas.shape
    full = pbin_pmf_batch(etas)
    loo = pbin_pmf_batch(etas[:, 1:]) if k > 1 else np.ones((nbags, 1))
    eta0 = etas[:, 0]
    if params.mechanism is Mechanism.LLP or (
        params.mechanism in (Mechanism.LLP_LAP, Mechanism.LLP_GEOM)
        and params.epsilon == math.inf
    ):
        return _gap_from_loo(eta0, loo)
    if params.mechanism is Mechanism.LLP_GEOM:
        return _gap_from_loo_geom(eta0, loo, params.epsilon)
    # LLP+Lap: one sampled outcome per bag
    labels = rng.random(etas.shape) < etas
    sums = labels.sum(axis=1)
    z = sums / k + rng.laplace(scale=1.0 / (k * params.epsilon), size=nbags)
    w = _lap_weight_matrix(z, k, params.epsilon)
    den = np.einsum("bs,bs->b", w, full)
    num = eta0 * np.einsum("bs,bs->b", w[:, 1:], loo)
    post = np.clip(num / den, 0.0, 1.0)
    return np.minimum(eta0, 1.0 - eta0) - np.minimum(post, 1.0 - post)


def additive_adv(
    eta_sampler, params: PrivacyParams, trials: int, rng: np.random.Generator
) -> AdvantageEstimate:
    """Expected additive advantage, averaging per-bag gaps over feature draws.

    ``eta_sampler(rng, shape)`` must return prior probabilities of that
    shape.  Per-bag gaps are computed exactly (Monte Carlo only over the
    feature draw, and over noise for LLP+Lap); duplicate eta rows are
    collapsed before the per-bag computation since equal bags have equal
    gaps.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if params.mechanism is Mechanism.NULL:
        return AdvantageEstimate(value=0.0, stderr=0.0, trials=trials, exact=True)
    if params.mechanism is Mechanism.RR:
        etas = np.asarray(eta_sampler(rng, (trials,)), dtype=np.float64)
        pi = flip_probability(params.epsilon)
        gaps = np.where(
            (etas >= pi) & (etas <= 1.0 - pi), np.minimum(etas, 1.0 - etas) - pi, 0.0
        )
        return _mc_estimate(gaps)
    k = params.bag_size
    etas = np.asarray(eta_sampler(rng, (trials, k)), dtype=np.float64)
    if params.mechanism is Mechanism.LLP_LAP:
        # noise draws differ across bags even when etas repeat
        gaps = _member0_gaps(etas, params, rng)
    else:
        uniq, inverse = np.unique(etas, axis=0, return_inverse=True)
        gaps = _member0_gaps(uniq, params, rng)[inverse.reshape(-1)]
    return _mc_estimate(gaps)


def _mc_estimate(values: np.ndarray) -> AdvantageEstimate:
    n = values.size
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return AdvantageEstimate(value=float(values.mean()), stderr=stderr, trials=n, exact=False)


def hpadv_estimate(
    eta_sampler, k: int, theta: float, trials: int, rng: np.random.Generator
) -> AdvantageEstimate:
    """Fraction of feature bags whose average additive gap exceeds theta.

    The per-bag gap average is computed exactly; Monte Carlo enters only
    through the feature draw.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    etas = np.asarray(eta_sampler(rng, (trials, k)), dtype=np.float64)
    uniq, inverse = np.unique(etas, axis=0, return_inverse=True)
    gaps = np.array([bag_mean_gap_llp(row) for row in uniq])[inverse.reshape(-1)]
    hits = (gaps > theta).astype(np.float64)
    return _mc_estimate(hits)


# ---------------------------------------------------------------------------
# multiplicative advantage and sample summaries
# ---------------------------------------------------------------------------


def mult_adv(prior: float, posterior: float) -> float:
    """Log-odds gap logit(posterior) - logit(prior); +-inf at 0/1 posteriors."""
    if not 0.0 < prior < 1.0:
        raise ValueError("prior must lie strictly inside (0, 1)")
    if not 0.0 <= posterior <= 1.0:
        raise ValueError("posterior must lie in [0, 1]")
    if posterior == 0.0:
        return -math.inf
    if posterior == 1.0:
        return math.inf
    return math.log(posterior / (1.0 - posterior)) - math.log(prior / (1.0 - prior))


def scatter_samples(
    dataset, params: PrivacyParams, runs: int, rng: np.random.Generator
) -> list[PosteriorRecord]:
    """(prior, posterior) records over repeated privatization runs.

    Each run resamples labels from the dataset's priors, privatizes them,
    and computes every surviving example's posterior (examples dropped by
    the bag partition are skipped for that run).
    """
    etas = np.asarray(dataset.etas, dtype=np.float64)
    records: list[PosteriorRecord] = []
    for run_rng in rng.spawn(runs):
        labels = (run_rng.random(etas.size) < etas).astype(np.int64)
        if params.mechanism is Mechanism.NULL:
            records.extend(
                PosteriorRecord(float(e), float(e), params, math.nan) for e in etas
            )
            continue
        if params.mechanism is Mechanism.RR:
            pi = flip_probability(params.epsilon)
            flips = run_rng.random(etas.size) < pi
            noisy = np.where(flips, 1 - labels, labels)
            num = np.where(noisy == 1, (1.0 - pi) * etas, pi * etas)
            den = num + np.where(noisy == 1, pi * (1.0 - etas), (1.0 - pi) * (1.0 - etas))
            post = num / den
            records.extend(
                PosteriorRecord(float(e), float(p), params, float(b))
                for e, p, b in zip(etas, post, noisy)
            )
            continue
        k = params.bag_size
        bags = llp_partition(etas.size, k, run_rng)
        if params.mechanism is Mechanism.LLP:
            out = llp_privatize(labels, bags)
        elif params.mechanism is Mechanism.LLP_GEOM:
            out = llp_geom_privatize(labels, bags, params.epsilon, run_rng)
        else:
            out = llp_lap_privatize(labels, bags, params.epsilon, run_rng)
        for bag, z in zip(bags.bags, out.alphas):
            bag_etas = etas[bag]
            if params.mechanism is Mechanism.LLP:
                post = llp_bag_posteriors(bag_etas, int(round(z * k)))
            elif params.mechanism is Mechanism.LLP_GEOM:
                post = geom_bag_posteriors(bag_etas, float(z), params.epsilon)
            else:
                post = lap_bag_posteriors(bag_etas, float(z), params.epsilon)
            records.extend(
                PosteriorRecord(float(e), float(p), params, float(z))
                for e, p in zip(bag_etas, post)
            )
    return records


def make_samples(records: list[PosteriorRecord]) -> tuple[list[AdvantageSample], int]:
    """Convert records to advantage samples, sidelining degenerate priors.

    Returns (samples, degenerate_count): log odds are undefined at prior 0
    or 1, so those records are only counted.
    """
    samples: list[AdvantageSample] = []
    degenerate = 0
    for r in records:
        if not 0.0 < r.prior < 1.0:
            degenerate += 1
            continue
        gap = min(r.prior, 1.0 - r.prior) - min(r.posterior, 1.0 - r.posterior)
        samples.append(
            AdvantageSample(
                prior=r.prior,
                posterior=r.posterior,
                additive_gap=gap,
                mult_adv=mult_adv(r.prior, r.posterior),
            )
        )
    return samples, degenerate


def empirical_cdf(samples) -> list[tuple[float, float]]:
    """Step-function CDF points; +inf samples sit after every finite value."""
    values = np.asarray(samples, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty sample")
    values = np.sort(values)  # numpy orders -inf first, +inf last
    n = values.size
    points: list[tuple[float, float]] = []
    for idx in np.flatnonzero(np.r_[values[1:] != values[:-1], True]):
        points.append((float(values[idx]), float((idx + 1) / n)))
    return points


def percentile(samples, q: float) -> float:
    """Order statistic at ceil(q*n) with +inf ordered last."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly inside (0, 1)")
    values = np.asarray(samples, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty sample")
    values = np.sort(values)
    return float(values[math.ceil(q * values.size) - 1])
