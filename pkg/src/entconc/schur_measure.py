"""Outcome law of the universal concentration measurement.

Measuring the isotypic blocks of ``n`` copies returns Young index ``λ`` with
probability ``a_λ = dim V_λ · s_λ(p)`` and leaves a maximally entangled state
of Schmidt rank ``dim V_λ``; the yield is ``log2(dim V_λ) / n`` bits per copy.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _core
from .errors import DegenerateSpectrumError, PreconditionError, ResourceCapError
from .partitions import (
    YoungIndex,
    count_young_indices,
    dim_v,
    enumerate_young_indices,
    permutation_sign,
)
from .spectrum import SchmidtSpectrum, as_spectrum

__all__ = [
    "schur_polynomial",
    "outcome_probability",
    "yield_distribution",
    "YieldDistribution",
    "pairwise_divergence",
    "log2_fraction",
    "DEFAULT_PARTITION_CAP",
    "EXACT_AUTO_MAX_N",
]

DEFAULT_PARTITION_CAP = 250_000
EXACT_AUTO_MAX_N = 30
# float spectra with d >= 3 are evaluated through their exact binary value up to this n
EXACT_FLOAT_MAX_N = 150
YIELD_MERGE_TOL = 1e-12


def log2_fraction(x) -> float:
    """``log2`` of a non-negative rational without underflow (``-inf`` at 0)."""
    x = Fraction(x)
    if x == 0:
        return -math.inf
    return math.log2(x.numerator) - math.log2(x.denominator)


# -- Schur polynomials -----------------------------------------------------

def _det_permutation(matrix):
    # division-free Leibniz expansion; matrices here are at most d x d
    size = len(matrix)
    total = 0
    for perm in itertools.permutations(range(size)):
        term = permutation_sign(perm)
        for i in range(size):
            term = term * matrix[i][perm[i]]
            if term == 0:
                break
        total = total + term
    return total


def _det_fraction(matrix):
    # Gaussian elimination over Q
    m = [list(row) for row in matrix]
    size = len(m)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, size):
            factor = m[r][col] * inv
            if factor:
                for c in range(col, size):
                    m[r][c] -= factor * m[col][c]
    return det


def _complete_homogeneous(values, kmax):
    # h_0..h_kmax by adding one variable at a time
    zero = values[0] * 0
    h = [zero + 1] + [zero] * kmax
    for x in values:
        for k in range(1, kmax + 1):
            h[k] = h[k] + x * h[k - 1]
    return h


def _schur_jacobi_trudi(parts, values):
    lam = [x for x in parts if x]
    if not lam:
        return values[0] * 0 + 1
    ell = len(lam)
    kmax = lam[0] + ell
    h = _complete_homogeneous(list(values), kmax)
    zero = values[0] * 0

    def hk(k):
        return h[k] if 0 <= k <= kmax else zero

    matrix = [[hk(lam[i] - i + j) for j in range(ell)] for i in range(ell)]
    return _det_permutation(matrix)


def _schur_bialternant_exact(parts, values):
    d = len(values)
    if any(a == b for a, b in zip(values, values[1:])):
        raise DegenerateSpectrumError("bialternant needs pairwise distinct spectrum entries")
    ell = [x + d - 1 - i for i, x in enumerate(parts)]
    matrix = [[v ** e for e in ell] for v in values]
    vdm = Fraction(1)
    for i in range(d):
        for j in range(i + 1, d):
            vdm *= values[i] - values[j]
    return _det_fraction(matrix) / vdm


def _log2_schur_d2(lam1, lam2, a, b):
    """``log2 s_(λ1,λ2)(a, b)`` for ``a >= b`` via the geometric closed form."""
    lam1 = np.asarray(lam1, dtype=np.float64)
    lam2 = np.asarray(lam2, dtype=np.float64)
    m = lam1 - lam2
    if a <= 0:
        raise PreconditionError("leading Schmidt coefficient must be positive")
    if b == 0:
        # only the one-row shape survives
        return np.where(lam2 == 0, m * math.log2(a), -np.inf)
    big_l = math.log(b / a)
    if big_l == 0.0:
        geo = np.log2(m + 1.0)
    else:
        # log2[(1 - r^(m+1)) / (1 - r)] with r = b/a, no cancellation near r = 1
        geo = (np.log(-np.expm1((m + 1.0) * big_l)) - math.log(-math.expm1(big_l))) / math.log(2)
    return lam2 * math.log2(a * b) + m * math.log2(a) + geo


def _log2_schur_bialternant_float(parts, probs):
    # log2 of det(p_i^{l_j}) / Vdm, factoring out the dominant diagonal term
    d = len(probs)
    if any(a == b for a, b in zip(probs, probs[1:])) or probs[-1] <= 0:
        raise DegenerateSpectrumError("log-space bialternant needs distinct positive entries")
    ell = [x + d - 1 - i for i, x in enumerate(parts)]
    logs = [math.log(x) for x in probs]
    terms = []
    for perm in itertools.permutations(range(d)):
        expo = math.fsum((ell[perm[i]] - ell[i]) * logs[i] for i in range(d))
        terms.append(permutation_sign(perm) * math.exp(expo))
    rest = math.fsum(terms)
    if rest <= 0:
        raise DegenerateSpectrumError("bialternant lost all precision; spectrum too close to degenerate")
    lvdm = math.fsum(math.log(probs[i] - probs[j]) for i in range(d) for j in range(i + 1, d))
    lead = math.fsum(e * lg for e, lg in zip(ell, logs))
    return (lead + math.log(rest) - lvdm) / math.log(2)


def schur_polynomial(lam: YoungIndex, p, method: str = "auto"):
    """Evaluate the Schur polynomial ``s_λ`` at the spectrum ``p``.

    ``method`` is one of ``"auto"``, ``"bialternant"``, ``"jacobi_trudi"``
    or ``"closed_form"`` (``d == 2`` only). Exact spectra return a
    ``Fraction``; float spectra return a float.

    ``"auto"`` picks the exact bialternant for distinct rationals, the
    division-free Jacobi-Trudi determinant for repeated entries, and the
    closed form for float qubit spectra.
    """
    spec = as_spectrum(p)
    if lam.d != spec.d:
        lam = YoungIndex.of(lam.parts, spec.d)
    if method == "auto":
        if spec.d == 2 and not spec.exact:
            method = "closed_form"
        else:
            method = "jacobi_trudi" if spec.is_degenerate else "bialternant"
    if method == "closed_form":
        if spec.d != 2:
            raise PreconditionError("closed form only for d == 2")
        a, b = spec.as_array()
        return float(2.0 ** _log2_schur_d2(lam.parts[0], lam.parts[1], a, b))
    values = spec.as_fractions()
    if method == "bialternant":
        result = _schur_bialternant_exact(lam.parts, values)
    elif method == "jacobi_trudi":
        result = _schur_jacobi_trudi(lam.parts, values)
    else:
        raise PreconditionError(f"unknown Schur method {method!r}")
    return result if spec.exact else float(result)


def outcome_probability(lam: YoungIndex, p):
    """``a_λ = dim V_λ · s_λ(p)``, the probability of observing ``λ``."""
    spec = as_spectrum(p)
    return dim_v(lam) * schur_polynomial(lam, spec)


# -- the yield distribution ------------------------------------------------

@dataclass(frozen=True)
class YieldDistribution:
    """Outcome law over Young indices together with the yield of each outcome.

    ``probs`` holds ``Fraction`` values on the exact path and floats
    otherwise; ``log2_probs`` and ``yields`` are always float arrays.
    """

    n: int
    spectrum: SchmidtSpectrum
    indices: tuple
    probs: tuple
    log2_probs: np.ndarray
    yields: np.ndarray
    exact: bool

    @property
    def d(self) -> int:
        return self.spectrum.d

    @property
    def max_yield(self) -> float:
        return math.log2(self.d)

    def prob_array(self) -> np.ndarray:
        return np.exp2(self.log2_probs)

    def total(self):
        return sum(self.probs) if self.exact else math.fsum(self.probs)

    def __len__(self):
        return len(self.indices)

    def items(self):
        return zip(self.indices, self.probs, self.yields)

    def yield_law(self, tol: float = YIELD_MERGE_TOL):
        """Merge outcomes with equal yields: returns ``(values, probs)`` float arrays."""
        order = np.argsort(self.yields, kind="stable")
        ys = self.yields[order]
        ps = self.prob_array()[order]
        values, probs = [], []
        for y, pr in zip(ys, ps):
            if values and abs(y - values[-1]) <= tol:
                probs[-1] += pr
            else:
                values.append(float(y))
                probs.append(float(pr))
        return np.array(values), np.array(probs)

    def sample(self, size: int, seed: int) -> np.ndarray:
        """Draw ``size`` yields with a seeded PCG64 generator."""
        rng = np.random.default_rng(seed)
        probs = self.prob_array()
        idx = rng.choice(len(self.indices), size=size, p=probs / probs.sum())
        return self.yields[idx]


def yield_distribution(n: int, p, exact: bool | None = None,
                       cap: int = DEFAULT_PARTITION_CAP) -> YieldDistribution:
    """Full outcome law of ``n``-copy universal concentration at spectrum ``p``.

    ``exact=None`` uses rational arithmetic when the spectrum is exact and
    ``n <= EXACT_AUTO_MAX_N``.
    """
    if n < 1:
        raise PreconditionError(f"need n >= 1, got {n}")
    spec = as_spectrum(p)
    d = spec.d
    count = count_young_indices(n, d)
    if count > cap:
        raise ResourceCapError(f"{count} Young indices for n={n}, d={d} exceeds cap {cap}")
    if exact is None:
        exact = spec.exact and n <= EXACT_AUTO_MAX_N
    if exact and not spec.exact:
        raise PreconditionError("exact evaluation requested for a float spectrum")
    indices = enumerate_young_indices(n, d)

    if exact:
        probs = tuple(outcome_probability(lam, spec) for lam in indices)
        log2_probs = np.array([log2_fraction(x) for x in probs])
        yields = np.array([math.log2(dim_v(lam)) / n for lam in indices])
        return YieldDistribution(n, spec, tuple(indices), probs, log2_probs, yields, True)

    parts = np.array([lam.parts for lam in indices], dtype=np.int64)
    log2_dims = _core.log2_dim_v_rows(parts)
    if n <= 60:
        # exact integer dimensions are cheap here and avoid lgamma rounding
        log2_dims = np.array([math.log2(dim_v(lam)) for lam in indices])
    if d == 1:
        log2_s = np.zeros(len(indices))
    elif d == 2:
        a, b = spec.as_array()
        log2_s = _log2_schur_d2(parts[:, 0], parts[:, 1], a, b)
    elif n <= EXACT_FLOAT_MAX_N or spec.is_degenerate:
        if n > EXACT_FLOAT_MAX_N:
            raise ResourceCapError(
                f"degenerate float spectrum with d={d} needs exact evaluation; n={n} > {EXACT_FLOAT_MAX_N}")
        fr = spec.as_fractions()
        method = "jacobi_trudi" if spec.is_degenerate else "bialternant"
        exact_fn = _schur_jacobi_trudi if method == "jacobi_trudi" else _schur_bialternant_exact
        log2_s = np.array([log2_fraction(exact_fn(lam.parts, fr)) for lam in indices])
    else:
        probs_f = [float(x) for x in spec.probs]
        log2_s = np.array([_log2_schur_bialternant_float(lam.parts, probs_f) for lam in indices])
    log2_probs = log2_dims + log2_s
    probs = tuple(float(x) for x in np.exp2(log2_probs))
    return YieldDistribution(n, spec, tuple(indices), probs, log2_probs, log2_dims / n, False)


def pairwise_divergence(n: int, p, q) -> float:
    """``D(Q_n^q || Q_n^p)`` in bits: the law at ``q`` measured against reference ``p``."""
    sp, sq = as_spectrum(p), as_spectrum(q)
    if sp.d != sq.d:
        raise PreconditionError("spectra must have the same dimension")
    lp = yield_distribution(n, sp, exact=False).log2_probs
    lq = yield_distribution(n, sq, exact=False).log2_probs
    pq = np.exp2(lq)
    mask = pq > 0
    if np.any(np.isneginf(lp[mask])):
        return math.inf
    return math.fsum(pq[mask] * (lq[mask] - lp[mask]))
