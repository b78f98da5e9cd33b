"""Auditing toolkit for label privatization mechanisms.

Computes additive, multiplicative, and high-probability reconstruction
advantage for randomized response, random label aggregation, and their
noisy variants, alongside exact theoretical bounds and a desk-scale
privacy-vs-utility training harness.
"""

from .advantage import (
    AdvantageEstimate,
    AdvantageSample,
    additive_adv,
    additive_iadv_geom,
    additive_iadv_lap,
    additive_iadv_llp,
    additive_iadv_rr,
    empirical_cdf,
    hpadv_estimate,
    make_samples,
    mult_adv,
    percentile,
    scatter_samples,
)
from .data import EtaDataset, gen_beta, gen_independent, gen_uniform, knn_eta_estimate, load_csv, save_csv
from .learner import LinearModel, TrainConfig, auc, predict, tradeoff_sweep, train_propmatch, train_rr_debiased
from .mechanisms import (
    BagAssignment,
    Mechanism,
    PrivacyParams,
    geom_debias,
    llp_geom_privatize,
    llp_lap_privatize,
    llp_partition,
    llp_privatize,
    null_privatize,
    privatize,
    rr_privatize,
)
from .pbin import PBinPmf, pbin_leave_one_out, pbin_pmf
from .posterior import (
    PosteriorRecord,
    geom_clip_likelihood,
    llp_geom_posterior,
    llp_lap_posterior,
    llp_posterior,
    rr_posterior,
)
from .rng import substream

__version__ = "0.1.0"
