"""Desk-scale training from privatized labels.

A logistic model trained with minibatch Adam, one loss per mechanism
family:

* randomized response -- per-example binary cross entropy on labels
  debiased by the affine inverse of the flip channel;
* aggregation mechanisms -- proportion matching: cross entropy between the
  bag-average prediction and the reported (possibly noisy or debiased)
  proportion, evaluated through its gradient so out-of-range targets are
  fine.

Training is deterministic given the config seed; utility is reported as the
Mann-Whitney AUC on held-out data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .advantage import (
    AdvantageEstimate,
    additive_adv,
    make_samples,
    percentile,
    scatter_samples,
)
from .data import EtaDataset
from .mechanisms import (
    BagAssignment,
    Mechanism,
    PrivacyParams,
    geom_debias,
    llp_geom_privatize,
    llp_lap_privatize,
    llp_partition,
    llp_privatize,
    rr_privatize,
)
from .rng import substream
from .util import parallel_map

__all__ = [
    "LinearModel",
    "TrainConfig",
    "predict",
    "propmatch_gradient",
    "train_rr_debiased",
    "train_propmatch",
    "auc",
    "TradeoffRow",
    "tradeoff_sweep",
]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
PBAR_CLAMP = 1e-12  # keeps the proportion-matching gradient finite


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if not (np.all(np.isfinite(w)) and math.isfinite(self.bias)):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-2
    epochs: int = 5
    examples_per_batch: int = 64
    bags_per_batch: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 1:
            raise ValueError("learning_rate must be > 0 and epochs >= 1")
        if self.examples_per_batch < 1 or self.bags_per_batch < 1:
            raise ValueError("batch sizes must be >= 1")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict(model: LinearModel, x) -> np.ndarray | float:
    """Sigmoid score of one feature vector or an (m, d) matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.weights.shape[0]:
        raise ValueError("feature dimension mismatch")
    z = x @ model.weights + model.bias
    s = _sigmoid(np.atleast_1d(z))
    return float(s[0]) if z.ndim == 0 else s


class _Adam:
    def __init__(self, dim: int, lr: float):
        self.lr = lr
        self.t = 0
        self.m = np.zeros(dim + 1)
        self.v = np.zeros(dim + 1)

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = ADAM_BETA1 * self.m + (1.0 - ADAM_BETA1) * grad
        self.v = ADAM_BETA2 * self.v + (1.0 - ADAM_BETA2) * grad * grad
        mhat = self.m / (1.0 - ADAM_BETA1**self.t)
        vhat = self.v / (1.0 - ADAM_BETA2**self.t)
        return theta - self.lr * mhat / (np.sqrt(vhat) + ADAM_EPS)


def debias_rr_labels(noisy_labels: np.ndarray, epsilon: float) -> np.ndarray:
    """Affine label transform making the BCE gradient unbiased under RR.

    The gradient is affine in the label, so debiasing the label debiases
    any such function of it; the result leaves [0, 1] for finite epsilon.
    """
    noisy = np.asarray(noisy_labels, dtype=np.float64)
    if epsilon == math.inf:
        return noisy
    e = math.exp(epsilon)
    return ((e + 1.0) * noisy - 1.0) / (e - 1.0)


def train_rr_debiased(features, noisy_labels, epsilon: float, config: TrainConfig) -> LinearModel:
    """Minibatch Adam on the debiased binary cross-entropy gradient."""
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    X = np.asarray(features, dtype=np.float64)
    y = debias_rr_labels(noisy_labels, epsilon)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("features must be (m, d) aligned with labels")
    m, d = X.shape
    theta = np.zeros(d + 1)
    opt = _Adam(d, config.learning_rate)
    rng = substream(config.seed, 1)
    bs = config.examples_per_batch
    for _ in range(config.epochs):
        order = rng.permutation(m)
        for start in range(0, m, bs):
            idx = order[start : start + bs]
            p = _sigmoid(X[idx] @ theta[:-1] + theta[-1])
            resid = p - y[idx]
            grad = np.empty(d + 1)
            grad[:-1] = X[idx].T @ resid / idx.size
            grad[-1] = resid.mean()
            theta = opt.step(theta, grad)
    return LinearModel(weights=theta[:-1], bias=float(theta[-1]))


def propmatch_gradient(
    theta: np.ndarray, bag_features: np.ndarray, targets: np.ndarray
) -> np.ndarray:
    """Gradient of the mean proportion-matching BCE over a batch of bags.

    ``bag_features`` is (bags, k, d); ``targets`` may lie outside [0, 1]
    (debiased proportions), which only enters through the affine-in-target
    gradient.  Returns the (d+1,) gradient with the bias last.
    """
    z = bag_features @ theta[:-1] + theta[-1]
    p = _sigmoid(z)
    pbar = np.clip(p.mean(axis=1), PBAR_CLAMP, 1.0 - PBAR_CLAMP)
    coef = (pbar - targets) / (pbar * (1.0 - pbar))
    sig_prime = p * (1.0 - p)
    grad = np.empty(theta.size)
    grad[:-1] = np.einsum("b,bk,bkd->d", coef, sig_prime, bag_features) / (
        z.shape[0] * z.shape[1]
    )
    grad[-1] = float((coef * sig_prime.mean(axis=1)).mean())
    return grad


def train_propmatch(features, bags: BagAssignment, reported_proportions, config: TrainConfig) -> LinearModel:
    """Minibatch Adam on the proportion-matching gradient over bags.

    Accepts exact, Laplace-noised, or debiased grid proportions; with k=1
    and exact proportions this is plain per-example BCE training.
    """
    X = np.asarray(features, dtype=np.float64)
    targets = np.asarray(reported_proportions, dtype=np.float64)
    if bags.n_bags != targets.shape[0]:
        raise ValueError("one reported proportion per bag required")
    if bags.bags.size and bags.bags.max() >= X.shape[0]:
        raise ValueError("bag indices exceed the feature matrix")
    d = X.shape[1]
    bag_feats = X[bags.bags]  # (n_bags, k, d)
    theta = np.zeros(d + 1)
    opt = _Adam(d, config.learning_rate)
    rng = substream(config.seed, 2)
    bs = config.bags_per_batch
    for _ in range(config.epochs):
        order = rng.permutation(bags.n_bags)
        for start in range(0, bags.n_bags, bs):
            idx = order[start : start + bs]
            theta = opt.step(theta, propmatch_gradient(theta, bag_feats[idx], targets[idx]))
    return LinearModel(weights=theta[:-1], bias=float(theta[-1]))


def auc(scores, labels) -> float:
    """Mann-Whitney AUC; tied scores contribute 1/2."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")
    ranks = stats.rankdata(scores)
    u = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


# ---------------------------------------------------------------------------
# privacy-utility sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TradeoffRow:
    params: PrivacyParams
    auc_mean: float
    auc_stderr: float
    best_learning_rate: float
    additive: AdvantageEstimate
    mult_p98: float
    frac_infinite: float


def _train_one(
    train: EtaDataset, params: PrivacyParams, lr: float, config: TrainConfig, rng_key: tuple
) -> LinearModel:
    shuffle_seed = int(
        np.random.SeedSequence(entropy=rng_key[0], spawn_key=rng_key[1:]).generate_state(1)[0]
    )
    cfg = replace(config, learning_rate=lr, seed=shuffle_seed)
    rng = substream(*rng_key)
    mech = params.mechanism
    if mech in (Mechanism.NULL, Mechanism.RR):
        if mech is Mechanism.NULL:
            # reference run: the no-PET baseline trains on clean labels
            noisy = train.labels.astype(np.float64)
            eps = math.inf
        else:
            noisy = rr_privatize(train.labels, params.epsilon, rng).labels
            eps = params.epsilon
        return train_rr_debiased(train.features, noisy, eps, cfg)
    bags = llp_partition(len(train), params.bag_size, rng)
    if mech is Mechanism.LLP:
        targets = llp_privatize(train.labels, bags).alphas
    elif mech is Mechanism.LLP_LAP:
        targets = llp_lap_privatize(train.labels, bags, params.epsilon, rng).alphas
    else:
        out = llp_geom_privatize(train.labels, bags, params.epsilon, rng)
        targets = np.array([geom_debias(a, params.epsilon, params.bag_size) for a in out.alphas])
    return train_propmatch(train.features, bags, targets, cfg)


def _eval_point(
    point_idx: int,
    params: PrivacyParams,
    train: EtaDataset,
    eval_ds: EtaDataset,
    learning_rates,
    config: TrainConfig,
    runs: int,
    adv_trials: int,
    scatter_runs: int,
    seed: int,
) -> TradeoffRow:
    aucs = np.empty((len(learning_rates), runs))
    for li, lr in enumerate(learning_rates):
        for run in range(runs):
            model = _train_one(train, params, lr, config, (seed, 3, point_idx, li, run))
            aucs[li, run] = auc(predict(model, eval_ds.features), eval_ds.labels)
    means = aucs.mean(axis=1)
    best = int(np.argmax(means))
    stderr = float(aucs[best].std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0

    if params.mechanism is Mechanism.NULL:
        additive = AdvantageEstimate(0.0, 0.0, trials=1, exact=True)
        mult_p98, frac_inf = 0.0, 0.0
    else:
        eval_etas = eval_ds.etas

        def sampler(rng, shape):
            return eval_etas[rng.integers(0, eval_etas.size, size=shape)]

        additive = additive_adv(sampler, params, adv_trials, substream(seed, 4, point_idx))
        records = scatter_samples(eval_ds, params, scatter_runs, substream(seed, 5, point_idx))
        samples, _ = make_samples(records)
        abs_mult = [abs(s.mult_adv) for s in samples]
        mult_p98 = percentile(abs_mult, 0.98)
        frac_inf = float(np.mean([math.isinf(v) for v in abs_mult]))
    return TradeoffRow(
        params=params,
        auc_mean=float(means[best]),
        auc_stderr=stderr,
        best_learning_rate=float(learning_rates[best]),
        additive=additive,
        mult_p98=mult_p98,
        frac_infinite=frac_inf,
    )


def tradeoff_sweep(
    dataset: EtaDataset,
    mech_grid,
    learning_rates,
    config: TrainConfig,
    eval_frac: float = 0.2,
    runs: int = 10,
    adv_trials: int = 2000,
    scatter_runs: int = 1,
    seed: int = 0,
) -> list[TradeoffRow]:
    """Privacy-utility sweep: one row per mechanism setting.

    Per grid point: privatize the training labels, train once per learning
    rate and run, keep the learning rate with the best mean eval AUC, and
    pair that AUC with the mechanism's additive advantage and 98th-percentile
    absolute multiplicative advantage computed on the eval priors.
    """
    if not dataset.has_etas:
        raise ValueError("tradeoff sweep needs a dataset with known priors")
    if not 0.0 < eval_frac < 1.0:
        raise ValueError("eval_frac must lie in (0, 1)")
    perm = substream(seed, 6).permutation(len(dataset))
    n_eval = max(1, int(len(dataset) * eval_frac))
    eval_ds = dataset.subset(perm[:n_eval])
    train = dataset.subset(perm[n_eval:])

    def run_point(item):
        idx, params = item
        return _eval_point(
            idx, params, train, eval_ds, list(learning_rates), config,
            runs, adv_trials, scatter_runs, seed,
        )

    return parallel_map(run_point, enumerate(mech_grid))
