"""Entropy and divergence primitives, and the constrained rate function.

The rate function is the smallest relative entropy to ``p`` among spectra
whose entropy lies on the far side of ``rate`` from ``H(p)``. Its minimiser
lies on the tilted family ``q ∝ p**beta``: ``beta > 1`` sharpens ``p``
(lower entropy), ``0 <= beta < 1`` flattens it. Entropy is monotone in
``beta``, so one bisection finds the minimiser.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import _core
from .errors import PreconditionError
from .partitions import YoungIndex, dim_v
from .spectrum import SchmidtSpectrum, as_spectrum

__all__ = [
    "shannon_entropy",
    "kl_divergence",
    "RateQuery",
    "rate_function",
    "tilted",
    "grid_rate_function",
    "dimension_entropy_bound",
    "dimension_entropy_bound_check",
    "expansion_coefficients_bbps",
]

_LN2 = math.log(2.0)
BETA_TOL = 1e-10
RATE_EQ_TOL = 1e-13


def _floats(p) -> np.ndarray:
    if isinstance(p, SchmidtSpectrum):
        return p.as_array()
    return np.asarray([float(x) for x in p], dtype=np.float64)


def shannon_entropy(p) -> float:
    """``H(p)`` in bits with ``0 log 0 = 0``."""
    arr = _floats(p)
    pos = arr[arr > 0]
    return float(max(0.0, -math.fsum(pos * np.log2(pos))))


def kl_divergence(q, p) -> float:
    """``D(q || p)`` in bits; ``inf`` if ``q`` puts mass where ``p`` has none."""
    qa, pa = _floats(q), _floats(p)
    if qa.shape != pa.shape:
        raise PreconditionError("distributions must have the same length")
    mask = qa > 0
    if np.any(pa[mask] == 0):
        return math.inf
    return float(max(0.0, math.fsum(qa[mask] * (np.log2(qa[mask]) - np.log2(pa[mask])))))


@dataclass(frozen=True)
class RateQuery:
    """A rate ``rate`` in bits/copy paired with the spectrum it is measured against."""

    p: SchmidtSpectrum
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "p", as_spectrum(self.p))
        if not (0.0 <= self.rate <= math.log2(self.p.d) + 1e-12):
            raise PreconditionError(f"rate {self.rate} outside [0, log2 d]")

    @property
    def upper(self) -> bool:
        """True for the branch ``rate > H(p)`` (constraint ``H(q) >= rate``)."""
        return self.rate > shannon_entropy(self.p)


def tilted(p, beta: float) -> np.ndarray:
    """``q ∝ p**beta`` restricted to the support of ``p``."""
    arr = _floats(p)
    out = np.zeros_like(arr)
    pos = arr > 0
    logs = beta * np.log(arr[pos])
    out[pos] = np.exp(logs - logsumexp(logs))
    return out


def _bisect_beta(p, target: float, lo: float, hi: float) -> float:
    # entropy decreases in beta: keep H(lo) >= target >= H(hi)
    while hi - lo > BETA_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if shannon_entropy(tilted(p, mid)) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rate_function(query, rate: float | None = None) -> float:
    """Constrained minimum of ``D(q || p)``.

    Call as ``rate_function(RateQuery(p, rate))`` or ``rate_function(p, rate)``.
    Below ``H(p)`` the constraint is ``H(q) <= rate``; above, ``H(q) >= rate``.
    Returns ``inf`` when no spectrum absolutely continuous w.r.t. ``p``
    reaches the required entropy.
    """
    if not isinstance(query, RateQuery):
        query = RateQuery(as_spectrum(query), float(rate))
    arr = query.p.as_array()
    rate = query.rate
    h = shannon_entropy(arr)
    if abs(rate - h) <= RATE_EQ_TOL:
        return 0.0
    support = int(np.count_nonzero(arr > 0))
    if rate > h:
        ceiling = math.log2(support)
        if rate > ceiling + RATE_EQ_TOL:
            return math.inf
        if rate >= ceiling - RATE_EQ_TOL:
            return kl_divergence(tilted(arr, 0.0), arr)
        beta = _bisect_beta(arr, rate, 0.0, 1.0)
        return kl_divergence(tilted(arr, beta), arr)
    pmax = float(arr.max())
    mult = int(np.count_nonzero(arr == pmax))
    if rate <= math.log2(mult):
        # mass on the argmax set with entropy exactly rate is optimal
        return max(0.0, -rate - math.log2(pmax))
    hi = 2.0
    while shannon_entropy(tilted(arr, hi)) > rate:
        hi *= 2.0
    beta = _bisect_beta(arr, rate, 1.0, hi)
    return kl_divergence(tilted(arr, beta), arr)


def grid_rate_function(p, rate: float, coarse: int = 2001, zoom_rounds: int = 8,
                       zoom_points: int = 321, radius: int = 16) -> float:
    """Independent oracle: dense-grid minimisation over the simplex (``d`` in {2, 3}).

    A coarse grid is refined ``zoom_rounds`` times inside a window of
    ``radius`` grid steps around the incumbent. The window is wide because
    near the constraint curve the best grid point can sit several steps
    away from the true minimiser. Used to validate :func:`rate_function`.
    """
    arr = _floats(p)
    d = arr.size
    upper = rate > shannon_entropy(arr)
    if d not in (2, 3):
        raise PreconditionError("grid oracle supports d in {2, 3}")
    m = coarse if d == 2 else max(3, coarse // 4)
    if d == 2:
        best, q1, q2 = _core.grid_min_simplex(arr, rate, upper, 0.0, 1.0, m)
    else:
        best, q1, q2 = _core.grid_min_simplex(arr, rate, upper, 0.0, 1.0, m, 0.0, 1.0, m)
    width = 1.0 / (m - 1)
    for _ in range(zoom_rounds):
        if not math.isfinite(best):
            break
        span = radius * width
        lo1, hi1 = max(0.0, q1 - span), min(1.0, q1 + span)
        if d == 2:
            cand, c1, c2 = _core.grid_min_simplex(arr, rate, upper, lo1, hi1, zoom_points)
        else:
            lo2, hi2 = max(0.0, q2 - span), min(1.0, q2 + span)
            cand, c1, c2 = _core.grid_min_simplex(arr, rate, upper, lo1, hi1, zoom_points,
                                                  lo2, hi2, zoom_points)
        if cand <= best:
            best, q1, q2 = cand, c1, c2
        width = 2 * span / (zoom_points - 1)
    return best


def dimension_entropy_bound(n: int, d: int) -> float:
    return (d * d + 2 * d) / (2 * n) * math.log2(n + d)


def dimension_entropy_bound_check(lam: YoungIndex) -> tuple[bool, float]:
    """Compare ``log2(dim V)/n`` with the type entropy ``H(λ/n)``.

    Returns ``(holds, margin)`` where ``margin = bound - |difference|``.
    """
    n, d = lam.n, lam.d
    if n < 1:
        raise PreconditionError("need n >= 1")
    diff = abs(math.log2(dim_v(lam)) / n - shannon_entropy([x / n for x in lam.parts]))
    margin = dimension_entropy_bound(n, d) - diff
    return margin >= 0, margin


def expansion_coefficients_bbps(p) -> tuple[float, float]:
    """Coefficients ``(A, B)`` of ``H + A log2(n)/n + B/n`` for the known-state yield."""
    arr = _floats(p)
    if np.any(arr <= 0):
        raise PreconditionError("expansion needs strictly positive spectrum entries")
    d = arr.size
    a = -(d - 1) / 2
    b = -((d - 1) / 2 * math.log2(2 * math.pi * math.e) + 0.5 * math.fsum(np.log2(arr)))
    return a, b
