"""Datasets with known label priors.

Synthetic generators draw each example's conditional positive probability
eta from a chosen distribution, sample the label from it, and embed
logit(eta) as the first feature so a logistic model can represent the Bayes
predictor exactly.  External data comes in over a flat CSV with one row per
example; when it lacks an eta column the priors must be estimated (kNN)
before any audit runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import substream

__all__ = [
    "EtaDataset",
    "gen_beta",
    "gen_uniform",
    "gen_independent",
    "save_csv",
    "load_csv",
    "knn_eta_estimate",
]

LOGIT_CLAMP = 30.0  # |logit| cap; the induced eta error is < 1e-13


@dataclass(frozen=True)
class EtaDataset:
    """Examples as (features, true prior eta, sampled binary label)."""

    features: np.ndarray
    labels: np.ndarray
    etas: np.ndarray | None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels)
        if feats.ndim != 2 or labels.ndim != 1 or feats.shape[0] != labels.shape[0]:
            raise ValueError("features must be (m, d) with one label per row")
        if labels.size and not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be binary")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels.astype(np.int64))
        if self.etas is not None:
            etas = np.asarray(self.etas, dtype=np.float64)
            if etas.shape != labels.shape:
                raise ValueError("etas must align with labels")
            if etas.size and (etas.min() < 0.0 or etas.max() > 1.0):
                raise ValueError("etas must lie in [0, 1]")
            object.__setattr__(self, "etas", etas)

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def has_etas(self) -> bool:
        return self.etas is not None

    def with_etas(self, etas) -> "EtaDataset":
        return EtaDataset(self.features, self.labels, etas, dict(self.meta))

    def subset(self, idx) -> "EtaDataset":
        etas = None if self.etas is None else self.etas[idx]
        return EtaDataset(self.features[idx], self.labels[idx], etas, dict(self.meta))


def _assemble(etas: np.ndarray, d_distractors: int, rng: np.random.Generator, meta: dict) -> EtaDataset:
    labels = (rng.random(etas.size) < etas).astype(np.int64)
    logits = np.clip(_safe_logit(etas), -LOGIT_CLAMP, LOGIT_CLAMP)
    cols = [logits[:, None]]
    if d_distractors:
        cols.append(rng.standard_normal((etas.size, d_distractors)))
    return EtaDataset(np.hstack(cols), labels, etas, meta)


def _safe_logit(etas: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(etas) - np.log1p(-etas)


def gen_beta(a: float, b: float, m: int, d_distractors: int = 2, seed: int = 0) -> EtaDataset:
    """Priors eta ~ Beta(a, b); features are [logit(eta), N(0,1) distractors]."""
    if a <= 0 or b <= 0:
        raise ValueError("Beta parameters must be positive")
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = substream(seed, 0)
    etas = rng.beta(a, b, size=m)
    meta = {"generator": "beta", "a": a, "b": b, "m": m, "d_distractors": d_distractors,
            "seed": seed, "logit_clamp": LOGIT_CLAMP}
    return _assemble(etas, d_distractors, rng, meta)


def gen_uniform(m: int, d_distractors: int = 2, seed: int = 0) -> EtaDataset:
    """Uniform priors on [0, 1] (Beta(1, 1))."""
    ds = gen_beta(1.0, 1.0, m, d_distractors, seed)
    ds.meta["generator"] = "uniform"
    return ds


def gen_independent(p: float, m: int, seed: int = 0) -> EtaDataset:
    """Constant prior p for every example; features are pure noise."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = substream(seed, 0)
    etas = np.full(m, float(p))
    labels = (rng.random(m) < etas).astype(np.int64)
    features = rng.standard_normal((m, 2))
    meta = {"generator": "independent", "p": p, "m": m, "seed": seed}
    return EtaDataset(features, labels, etas, meta)


def save_csv(dataset: EtaDataset, path, header_comment: str | None = None) -> None:
    """Write `feat_0,...,feat_{d-1},label[,eta]` rows; floats as shortest repr."""
    d = dataset.dim
    cols = [f"feat_{j}" for j in range(d)] + ["label"]
    if dataset.has_etas:
        cols.append("eta")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header_comment is not None:
            fh.write(f"# {header_comment}\n")
        fh.write(",".join(cols) + "\n")
        for i in range(len(dataset)):
            row = [repr(float(v)) for v in dataset.features[i]]
            row.append(str(int(dataset.labels[i])))
            if dataset.has_etas:
                row.append(repr(float(dataset.etas[i])))
            fh.write(",".join(row) + "\n")


def load_csv(path) -> EtaDataset:
    """Parse a dataset CSV; `#` lines are skipped, errors carry line numbers."""
    header = None
    feats: list[list[float]] = []
    labels: list[int] = []
    etas: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if "label" not in header:
                    raise ValueError(f"{path}: header is missing a 'label' column")
                label_idx = header.index("label")
                eta_idx = header.index("eta") if "eta" in header else None
                feat_idx = [j for j, name in enumerate(header)
                            if j != label_idx and j != eta_idx]
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(parts)}")
            try:
                feats.append([float(parts[j]) for j in feat_idx])
                lab = float(parts[label_idx])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if lab not in (0.0, 1.0):
                raise ValueError(f"{path}:{lineno}: label must be 0 or 1, got {parts[label_idx]}")
            labels.append(int(lab))
            if eta_idx is not None:
                eta = float(parts[eta_idx])
                if not 0.0 <= eta <= 1.0:
                    raise ValueError(f"{path}:{lineno}: eta must lie in [0, 1], got {eta}")
                etas.append(eta)
    if header is None:
        raise ValueError(f"{path}: empty file")
    features = np.asarray(feats, dtype=np.float64).reshape(len(labels), len(feat_idx))
    return EtaDataset(
        features,
        np.asarray(labels),
        np.asarray(etas) if etas else None,
        {"source": str(path)},
    )


def knn_eta_estimate(train: EtaDataset, query_features, k_nn: int) -> np.ndarray:
    """Mean label of the k_nn nearest training rows (ties: lower index)."""
    if len(train) == 0:
        raise ValueError("empty training set")
    if not 1 <= k_nn <= len(train):
        raise ValueError(f"k_nn must lie in [1, {len(train)}]")
    queries = np.atleast_2d(np.asarray(query_features, dtype=np.float64))
    out = np.empty(queries.shape[0])
    chunk = max(1, int(2e7) // max(1, len(train)))
    for start in range(0, queries.shape[0], chunk):
        block = queries[start : start + chunk]
        d2 = ((block[:, None, :] - train.features[None, :, :]) ** 2).sum(axis=2)
        order = np.argsort(d2, axis=1, kind="stable")[:, :k_nn]
        out[start : start + block.shape[0]] = train.labels[order].mean(axis=1)
    return out
