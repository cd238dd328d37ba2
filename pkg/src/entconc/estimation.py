"""The measured Young index as an estimator of the entropy of entanglement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import PreconditionError
from .partitions import YoungIndex
from .rates import dimension_entropy_bound, kl_divergence, rate_function, shannon_entropy
from .schur_measure import YieldDistribution, pairwise_divergence, yield_distribution
from .spectrum import as_spectrum

__all__ = [
    "EstimatorSample",
    "estimator_samples",
    "TailExponents",
    "estimator_error_exponent",
    "cramer_rao_bound",
    "cramer_rao_literal",
    "estimator_mse",
    "divergence_slope_check",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class EstimatorSample:
    n: int
    index: YoungIndex
    h_primary: float
    h_type: float

    @property
    def within_bound(self) -> bool:
        return abs(self.h_primary - self.h_type) <= dimension_entropy_bound(self.n, self.index.d)


def estimator_samples(dist: YieldDistribution) -> list[EstimatorSample]:
    n = dist.n
    return [EstimatorSample(n, lam, float(x), shannon_entropy([v / n for v in lam.parts]))
            for lam, x in zip(dist.indices, dist.yields)]


@dataclass(frozen=True)
class TailExponents:
    n: int
    lower_log2_prob: float
    upper_log2_prob: float
    lower_target: float
    upper_target: float

    @property
    def lower(self) -> float:
        return math.inf if self.lower_log2_prob == -math.inf else -self.lower_log2_prob / self.n

    @property
    def upper(self) -> float:
        return math.inf if self.upper_log2_prob == -math.inf else -self.upper_log2_prob / self.n


def _log2_tail(log2_probs: np.ndarray, mask: np.ndarray) -> float:
    sel = log2_probs[mask]
    if sel.size == 0 or np.all(np.isneginf(sel)):
        return -math.inf
    return min(0.0, float(logsumexp(sel * _LN2) / _LN2))


def estimator_error_exponent(p, delta: float, n_list) -> list[TailExponents]:
    """Exact tail exponents of ``Pr{Ĥ <= H - δ}`` and ``Pr{Ĥ >= H + δ}``.

    Targets are the rate function at ``H ∓ δ``; a side that leaves
    ``[0, log2 d]`` has an empty tail and target ``inf``.
    """
    if delta <= 0:
        raise PreconditionError("need delta > 0")
    spec = as_spectrum(p)
    h = shannon_entropy(spec)
    ceiling = math.log2(spec.d)
    lower_target = rate_function(spec, h - delta) if h - delta >= 0 else math.inf
    upper_target = rate_function(spec, h + delta) if h + delta <= ceiling else math.inf
    out = []
    for n in n_list:
        dist = yield_distribution(n, spec, exact=False)
        lo = _log2_tail(dist.log2_probs, dist.yields <= h - delta + 1e-12)
        hi = _log2_tail(dist.log2_probs, dist.yields >= h + delta - 1e-12)
        out.append(TailExponents(n, lo, hi, lower_target, upper_target))
    return out


def cramer_rao_bound(p) -> float:
    """Variance of ``-log2 p_i`` under ``p``: the smallest attainable ``n·MSE``."""
    arr = as_spectrum(p).as_array()
    pos = arr[arr > 0]
    h = shannon_entropy(pos)
    return math.fsum(pos * (-np.log2(pos) - h) ** 2)


def cramer_rao_literal(p) -> float:
    """``Σ p_i (log2 p_i - H)^2`` exactly as commonly printed (differs by a sign inside)."""
    arr = as_spectrum(p).as_array()
    pos = arr[arr > 0]
    h = shannon_entropy(pos)
    return math.fsum(pos * (np.log2(pos) - h) ** 2)


def estimator_mse(p, n: int) -> tuple[float, float, float]:
    """``(n·MSE of log2(dim V)/n, n·MSE of the type entropy, variance bound)``."""
    spec = as_spectrum(p)
    h = shannon_entropy(spec)
    dist = yield_distribution(n, spec, exact=False)
    probs = dist.prob_array()
    h_type = np.array([shannon_entropy([v / n for v in lam.parts]) for lam in dist.indices])
    mse_primary = math.fsum(probs * (dist.yields - h) ** 2)
    mse_type = math.fsum(probs * (h_type - h) ** 2)
    return n * mse_primary, n * mse_type, cramer_rao_bound(spec)


def divergence_slope_check(p, q, n_list) -> list[float]:
    """``|D(Q_n^q || Q_n^p)/n - D(q || p)|`` for each ``n``."""
    target = kl_divergence(as_spectrum(q).as_array(), as_spectrum(p).as_array())
    return [abs(pairwise_divergence(n, p, q) / n - target) for n in n_list]
