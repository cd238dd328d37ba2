"""Young indices and the dimensions of the associated irreducible representations.

Everything here works with Python integers so the dimension identities hold
exactly. Floating log-dimensions for large ``n`` live in :mod:`entconc._core`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import PreconditionError

__all__ = [
    "YoungIndex",
    "staircase",
    "enumerate_young_indices",
    "count_young_indices",
    "dim_v_determinant",
    "dim_v_product",
    "dim_v",
    "dim_u",
    "permutation_sign",
]

MAX_DETERMINANT_D = 8


@dataclass(frozen=True, order=True)
class YoungIndex:
    """A partition of ``n`` padded with zeros to exactly ``d`` parts."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        object.__setattr__(self, "parts", parts)
        if len(parts) < 1:
            raise PreconditionError("a Young index needs d >= 1 parts")
        if any(x < 0 for x in parts):
            raise PreconditionError(f"negative part in {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise PreconditionError(f"parts must be non-increasing: {parts}")

    @classmethod
    def of(cls, parts, d: int | None = None) -> "YoungIndex":
        parts = [int(x) for x in parts]
        if d is not None:
            while len(parts) > d and parts[-1] == 0:
                parts.pop()
            if len(parts) > d:
                raise PreconditionError(f"{tuple(parts)} has more than d={d} nonzero parts")
            parts = parts + [0] * (d - len(parts))
        return cls(tuple(parts))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def d(self) -> int:
        return len(self.parts)

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(x for x in self.parts if x)

    def shifted(self) -> tuple[int, ...]:
        """``λ + δ`` with ``δ = (d-1, ..., 0)``."""
        return tuple(x + s for x, s in zip(self.parts, staircase(self.d)))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def staircase(d: int) -> tuple[int, ...]:
    return tuple(range(d - 1, -1, -1))


def _partitions_at_most(n: int, d: int, max_part: int):
    # lexicographically descending
    if n == 0:
        yield ()
        return
    if d == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        if first * d < n:
            break
        for rest in _partitions_at_most(n - first, d - 1, first):
            yield (first,) + rest


def enumerate_young_indices(n: int, d: int) -> list[YoungIndex]:
    """All partitions of ``n`` into at most ``d`` parts, lexicographically descending."""
    if n < 0 or d < 1:
        raise PreconditionError(f"need n >= 0 and d >= 1, got n={n}, d={d}")
    return [YoungIndex(p + (0,) * (d - len(p))) for p in _partitions_at_most(n, d, n)]


@lru_cache(maxsize=1024)
def count_young_indices(n: int, d: int) -> int:
    """Number of partitions of ``n`` into at most ``d`` parts (no enumeration)."""
    if n < 0 or d < 0:
        return 0
    # ways[m] = partitions of m with parts of size <= k; conjugation maps this to <= k parts
    ways = [1] + [0] * n
    for k in range(1, d + 1):
        for m in range(k, n + 1):
            ways[m] += ways[m - k]
    return ways[n]


def permutation_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign



def dim_v_determinant(lam: YoungIndex) -> int:
    """dim V via the signed sum over permutations of the staircase.

    Sums ``sgn(π) n! / (λ + δ - π(δ))!`` over all ``π`` in ``S_d``.
    Only allowed for ``d <= 8`` because of the ``d!`` terms.
    """
    d, n = lam.d, lam.n
    if d > MAX_DETERMINANT_D:
        raise PreconditionError(
            f"determinant formula disabled for d={d} > {MAX_DETERMINANT_D}; use dim_v_product"
        )
    delta = staircase(d)
    total = 0
    nfact = math.factorial(n)
    for perm in itertools.permutations(range(d)):
        ks = [lam.parts[i] + delta[i] - delta[perm[i]] for i in range(d)]
        if any(k < 0 for k in ks):
            continue
        denom = 1
        for k in ks:
            denom *= math.factorial(k)
        # individual terms are multinomials, hence integers
        total += permutation_sign(perm) * (nfact // denom)
    return total


def dim_v_product(lam: YoungIndex) -> int:
    """dim V via ``n! · |Π_{i>j}(l_i - l_j)| / Π l_i!`` with ``l = λ + δ``."""
    n = lam.n
    ell = lam.shifted()
    num = math.factorial(n)
    for i in range(lam.d):
        for j in range(i):
            num *= ell[i] - ell[j]
    den = 1
    for x in ell:
        den *= math.factorial(x)
    q, r = divmod(abs(num), den)
    if r:
        raise ArithmeticError(f"non-integral dimension for {lam}")
    return q


def dim_v(lam: YoungIndex) -> int:
    """Dimension of the symmetric-group irrep labelled by ``lam``."""
    return _dim_v_cached(lam.nonzero)


@lru_cache(maxsize=65536)
def _dim_v_cached(nonzero: tuple[int, ...]) -> int:
    if not nonzero:
        return 1
    return dim_v_product(YoungIndex(nonzero))


def dim_u(lam: YoungIndex) -> int:
    """Weyl dimension of the SU(d) irrep: ``Π_{i<j} (λ_i - λ_j + j - i) / (j - i)``."""
    num = 1
    den = 1
    parts = lam.parts
    for i in range(lam.d):
        for j in range(i + 1, lam.d):
            num *= parts[i] - parts[j] + j - i
            den *= j - i
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"non-integral Weyl dimension for {lam}")
    return q
