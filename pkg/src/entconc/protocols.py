"""Protocol figures of merit: tails, fidelity, average yields and comparisons.

All yields are per copy. Tail probabilities are evaluated in log space so
that exponents stay accurate when the probabilities underflow.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DegenerateSpectrumError, PreconditionError
from .partitions import permutation_sign, staircase
from .rates import expansion_coefficients_bbps, rate_function, shannon_entropy
from .schur_measure import YieldDistribution, yield_distribution
from .spectrum import as_spectrum

__all__ = [
    "YIELD_TOL",
    "failure_probability",
    "strong_converse_probability",
    "total_fidelity",
    "log2_failure_probability",
    "log2_strong_converse_probability",
    "log2_infidelity",
    "exponent",
    "average_yield",
    "bbps_average_yield_exact",
    "cstar_bbps_gap",
    "gap_constant",
    "hardy_average_yield",
    "hardy_qubit_yield",
    "hardy_qubit_expansion",
    "estimation_based_bound",
    "monte_carlo_failure",
    "ProtocolReport",
    "protocol_report",
]

YIELD_TOL = 1e-12
_LN2 = math.log(2.0)
BBPS_TYPE_CAP = 5_000_000


def _log2_sum(log2_terms) -> float:
    arr = np.asarray(log2_terms, dtype=np.float64)
    if arr.size == 0 or np.all(np.isneginf(arr)):
        return -math.inf
    # a tail probability cannot exceed 1; rounding in the terms can push it over
    return min(0.0, float(logsumexp(arr * _LN2) / _LN2))


def _check_rate(dist: YieldDistribution, rate: float):
    if not (-YIELD_TOL <= rate <= dist.max_yield + YIELD_TOL):
        raise PreconditionError(f"rate {rate} outside [0, log2 d]")


def failure_probability(dist: YieldDistribution, rate: float):
    """``Pr{X <= rate}``; a ``Fraction`` for exact distributions."""
    _check_rate(dist, rate)
    mask = dist.yields <= rate + YIELD_TOL
    chosen = [pr for pr, keep in zip(dist.probs, mask) if keep]
    return sum(chosen, Fraction(0)) if dist.exact else math.fsum(chosen)


def strong_converse_probability(dist: YieldDistribution, rate: float):
    """``Pr{X >= rate}``; a ``Fraction`` for exact distributions."""
    _check_rate(dist, rate)
    mask = dist.yields >= rate - YIELD_TOL
    chosen = [pr for pr, keep in zip(dist.probs, mask) if keep]
    return sum(chosen, Fraction(0)) if dist.exact else math.fsum(chosen)


def log2_failure_probability(dist: YieldDistribution, rate: float) -> float:
    _check_rate(dist, rate)
    return _log2_sum(dist.log2_probs[dist.yields <= rate + YIELD_TOL])


def log2_strong_converse_probability(dist: YieldDistribution, rate: float) -> float:
    _check_rate(dist, rate)
    return _log2_sum(dist.log2_probs[dist.yields >= rate - YIELD_TOL])


def log2_infidelity(dist: YieldDistribution, rate: float) -> float:
    """``log2(1 - F)`` with ``1 - F = Σ_{x<rate} (1 - 2^{-n(rate-x)}) Q(x)``."""
    _check_rate(dist, rate)
    shortfall = rate - dist.yields
    mask = shortfall > YIELD_TOL
    if not np.any(mask):
        return -math.inf
    loss = np.log2(-np.expm1(-dist.n * shortfall[mask] * _LN2))
    return _log2_sum(dist.log2_probs[mask] + loss)


def total_fidelity(dist: YieldDistribution, rate: float) -> float:
    """``F = Σ_x min(1, 2^{-n(rate-x)}) Q(x)``: overlap with ``nR`` ebits."""
    _check_rate(dist, rate)
    weights = np.exp2(-dist.n * np.clip(rate - dist.yields, 0.0, None))
    weights[rate - dist.yields <= YIELD_TOL] = 1.0
    return float(min(1.0, math.fsum(weights * dist.prob_array())))


def exponent(log2_prob: float, n: int) -> float:
    """``-(1/n) log2(prob)``; ``inf`` for an empty tail."""
    return math.inf if log2_prob == -math.inf else -log2_prob / n


def average_yield(dist: YieldDistribution) -> float:
    return math.fsum(dist.prob_array() * dist.yields)


# -- known-state comparison protocols ---------------------------------------

def _compositions(n: int, d: int):
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


def bbps_average_yield_exact(n: int, p) -> float:
    """Expected ``log2(n! / Π k_i!) / n`` over multinomial type counts ``k``."""
    if n < 1:
        raise PreconditionError("need n >= 1")
    arr = as_spectrum(p).as_array()
    d = arr.size
    if math.comb(n + d - 1, d - 1) > BBPS_TYPE_CAP:
        raise PreconditionError(f"too many types for n={n}, d={d}")
    if d == 1:
        return 0.0
    if d == 2:
        k = np.arange(n + 1, dtype=np.float64)
        counts = np.stack([n - k, k], axis=1)
    else:
        counts = np.array(list(_compositions(n, d)), dtype=np.float64)
    log_multinom = gammaln(n + 1.0) - gammaln(counts + 1.0).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_p = np.where(counts > 0, counts * np.log(np.where(arr > 0, arr, 1.0)), 0.0).sum(axis=1)
    impossible = ((counts > 0) & (arr == 0)).any(axis=1)
    log_prob = np.where(impossible, -np.inf, log_multinom + log_p)
    return math.fsum(np.exp(log_prob) * log_multinom / _LN2) / n


def gap_constant(p) -> float:
    """Analytic limit of ``n`` times the known-state minus universal yield gap.

    Requires pairwise distinct, strictly positive entries.
    """
    spec = as_spectrum(p)
    arr = spec.as_array()
    d = arr.size
    if spec.is_degenerate or np.any(arr <= 0):
        raise DegenerateSpectrumError("gap constant needs distinct positive entries")
    vdm = math.prod(arr[i] - arr[j] for i in range(d) for j in range(i + 1, d))
    delta = staircase(d)
    terms = []
    for perm in itertools.permutations(range(d)):
        shifts = [delta[perm[i]] for i in range(d)]
        weight = math.prod(arr[i] ** shifts[i] for i in range(d))
        inner = math.log2(vdm) - math.fsum(shifts[k] * math.log2(arr[k]) for k in range(d))
        terms.append(permutation_sign(perm) * weight * inner)
    return -math.fsum(terms) / vdm


def cstar_bbps_gap(n: int, p) -> tuple[float, float]:
    """``(known-state yield - universal yield, analytic constant)`` at ``n`` copies."""
    constant = gap_constant(p)
    gap = bbps_average_yield_exact(n, p) - average_yield(yield_distribution(n, p, exact=False))
    return gap, constant


def hardy_average_yield(coefficients, multiplicities=None) -> float:
    """Expected ebits (total, not per copy) of optimal known-state concentration.

    ``coefficients`` are Schmidt coefficients (squared amplitudes). With
    ``multiplicities`` each value is repeated that many times, which keeps
    exponentially large rank-``n`` spectra tractable.
    """
    if multiplicities is None:
        values: dict[float, int] = {}
        for c in coefficients:
            values[c] = values.get(c, 0) + 1
        pairs = sorted(values.items(), reverse=True)
    else:
        merged: dict[float, int] = {}
        for c, m in zip(coefficients, multiplicities):
            merged[c] = merged.get(c, 0) + int(m)
        pairs = sorted(merged.items(), reverse=True)
    pairs = [(float(c), m) for c, m in pairs if c > 0 and m > 0]
    terms = []
    cumulative = 0
    for idx, (alpha, mult) in enumerate(pairs):
        cumulative += mult
        if cumulative == 1:
            continue
        nxt = pairs[idx + 1][0] if idx + 1 < len(pairs) else 0.0
        log2_t = math.log2(cumulative)
        # (alpha - next) * T * log2 T, formed in log space
        terms.append(2.0 ** (math.log2(alpha) + math.log2(1.0 - nxt / alpha) + log2_t) * log2_t)
    return math.fsum(terms)


def hardy_qubit_yield(n: int, p) -> float:
    """Per-copy optimal known-state yield for ``n`` copies of a qubit pair."""
    arr = as_spectrum(p).as_array()
    if arr.size != 2:
        raise PreconditionError("qubit formula needs d == 2")
    big, small = arr
    if small == 0:
        return 0.0
    if big == small:
        return 1.0
    # coefficient big^(n-k) small^k with multiplicity C(n, k), descending in k
    terms = []
    cumulative = 0
    ratio = small / big
    for k in range(n + 1):
        cumulative += math.comb(n, k)
        if cumulative == 1 and k < n:
            continue
        log2_alpha = (n - k) * math.log2(big) + k * math.log2(small)
        drop = 1.0 - ratio if k < n else 1.0
        log2_t = math.log2(cumulative)
        terms.append(2.0 ** (log2_alpha + math.log2(drop) + log2_t) * log2_t)
    return math.fsum(terms) / n


def hardy_qubit_expansion(n: int, p) -> float:
    """Large-``n`` expansion of :func:`hardy_qubit_yield` up to ``O(1/n)``.

    The geometric series in the correction runs over ``small/big < 1``.
    """
    arr = as_spectrum(p).as_array()
    big, small = arr
    if small <= 0 or big == small:
        raise PreconditionError("expansion needs distinct positive entries")
    ratio = small / big
    correction = (-0.5 * math.log2(2 * math.pi * math.e * big * small)
                  + ratio / (1 - ratio) * math.log2(1 / ratio)
                  + math.log2(1 / (1 - ratio)))
    return shannon_entropy(arr) - math.log2(n) / (2 * n) + correction / n


def estimation_based_bound(n: int, estimation_copies: float, p) -> float:
    """Upper bound on a scheme that spends ``estimation_copies`` copies estimating ``p`` first."""
    if not (0 <= estimation_copies < n):
        raise PreconditionError("need 0 <= estimation_copies < n")
    a, _ = expansion_coefficients_bbps(p)
    rest = n - estimation_copies
    return rest / n * shannon_entropy(as_spectrum(p)) + a * math.log2(rest) / rest


def monte_carlo_failure(dist: YieldDistribution, rate: float, samples: int, seed: int) -> tuple[float, float]:
    """Sampled ``Pr{X <= rate}`` and its binomial standard error."""
    draws = dist.sample(samples, seed)
    est = float(np.mean(draws <= rate + YIELD_TOL))
    return est, math.sqrt(max(est * (1 - est), 1e-300) / samples)


@dataclass
class ProtocolReport:
    protocol: str
    n: int
    spectrum: str
    rate: float
    failure_prob: float
    strong_converse_prob: float
    total_fidelity: float
    average_yield: float
    failure_exponent: float
    strong_converse_exponent: float
    infidelity_exponent: float
    rate_function: float
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        out.update(out.pop("extras"))
        return out


def protocol_report(dist: YieldDistribution, rate: float) -> ProtocolReport:
    n = dist.n
    return ProtocolReport(
        protocol="universal",
        n=n,
        spectrum=str(dist.spectrum),
        rate=rate,
        failure_prob=float(failure_probability(dist, rate)),
        strong_converse_prob=float(strong_converse_probability(dist, rate)),
        total_fidelity=total_fidelity(dist, rate),
        average_yield=average_yield(dist),
        failure_exponent=exponent(log2_failure_probability(dist, rate), n),
        strong_converse_exponent=exponent(log2_strong_converse_probability(dist, rate), n),
        infidelity_exponent=exponent(log2_infidelity(dist, rate), n),
        rate_function=rate_function(dist.spectrum, rate),
    )
