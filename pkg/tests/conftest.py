"""Shared brute-force oracles.

Everything here enumerates all 2^k label vectors directly, so it is
independent of the convolution/posterior code it is used to check.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from label_audit.posterior import geom_clip_likelihood


def enumerate_label_vectors(etas):
    """Yield (label_vector, probability) over all 2^k assignments."""
    etas = np.asarray(etas, dtype=np.float64)
    for bits in itertools.product((0, 1), repeat=etas.size):
        v = np.asarray(bits)
        prob = float(np.prod(np.where(v == 1, etas, 1.0 - etas)))
        yield v, prob


def brute_pmf(etas):
    """Poisson-binomial PMF by exhaustive enumeration."""
    k = len(etas)
    pmf = np.zeros(k + 1)
    for v, prob in enumerate_label_vectors(etas):
        pmf[v.sum()] += prob
    return pmf


def brute_llp_posterior(etas, i, s):
    """P(y_i = 1 | sum = s) by enumeration."""
    num = den = 0.0
    for v, prob in enumerate_label_vectors(etas):
        if v.sum() == s:
            den += prob
            if v[i] == 1:
                num += prob
    if den == 0.0:
        raise ZeroDivisionError("impossible sum")
    return num / den


def brute_geom_posterior(etas, i, z, epsilon):
    """P(y_i = 1 | clipped geometric release z) by enumeration."""
    k = len(etas)
    num = den = 0.0
    for v, prob in enumerate_label_vectors(etas):
        like = geom_clip_likelihood(int(v.sum()), z, k, epsilon)
        den += prob * like
        if v[i] == 1:
            num += prob * like
    return num / den


def brute_iadv_llp(etas, i):
    """Exact additive gap for member i by enumeration over sums."""
    etas = np.asarray(etas, dtype=np.float64)
    k = etas.size
    pmf = brute_pmf(etas)
    exp_min = 0.0
    for s in range(k + 1):
        if pmf[s] == 0.0:
            continue
        post = brute_llp_posterior(etas, i, s)
        exp_min += pmf[s] * min(post, 1.0 - post)
    return min(etas[i], 1.0 - etas[i]) - exp_min


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
