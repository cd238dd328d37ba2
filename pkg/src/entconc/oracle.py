"""Brute-force ground truth at a handful of copies.

The ``n``-copy state is stored as its coefficient matrix ``Ψ`` between
party A's and party B's ``n``-fold spaces, so ``|ψ> = Σ Ψ[a, b] |a>|b>``.
A projector ``P`` on A's side and ``P`` on B's side acts as ``P Ψ Pᵀ``.
Isotypic projectors come from symmetric-group characters.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import unitary_group

from .errors import PreconditionError, ResourceCapError
from .partitions import YoungIndex, dim_u, dim_v, enumerate_young_indices
from .rates import shannon_entropy
from .schur_measure import outcome_probability
from .spectrum import as_spectrum

__all__ = [
    "OracleCaps",
    "DEFAULT_CAPS",
    "DenseBipartiteState",
    "build_state",
    "character",
    "cycle_type",
    "IsotypicProjector",
    "isotypic_projector",
    "projector_family",
    "random_local_unitaries",
    "verify_projectors",
    "verify_outcome_law",
    "ExtractionCheck",
    "verify_extracted_entanglement",
]


@dataclass(frozen=True)
class OracleCaps:
    max_party_dim: int = 32
    max_copies: int = 8


DEFAULT_CAPS = OracleCaps()


def _check_caps(d: int, n: int, caps: OracleCaps):
    if n > caps.max_copies:
        raise ResourceCapError(f"n={n} exceeds oracle copy cap {caps.max_copies}")
    if d ** n > caps.max_party_dim:
        raise ResourceCapError(f"d^n={d ** n} exceeds oracle dimension cap {caps.max_party_dim}")


@dataclass(frozen=True)
class DenseBipartiteState:
    d: int
    n: int
    coefficients: np.ndarray

    def amplitudes(self) -> np.ndarray:
        """Amplitude vector in the copy-interleaved order ``A1 B1 A2 B2 ...``."""
        d, n = self.d, self.n
        tensor = self.coefficients.reshape([d] * (2 * n))
        order = [ax for k in range(n) for ax in (k, n + k)]
        return tensor.transpose(order).reshape(-1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def reduced_a(self) -> np.ndarray:
        return self.coefficients @ self.coefficients.conj().T


def build_state(p, n: int, local=None, caps: OracleCaps = DEFAULT_CAPS) -> DenseBipartiteState:
    """``n`` copies of ``Σ sqrt(p_i)|i i>``, optionally rotated by per-copy ``(U, V)``."""
    arr = as_spectrum(p).as_array()
    d = arr.size
    _check_caps(d, n, caps)
    single = np.diag(np.sqrt(arr)).astype(np.complex128)
    if local is not None:
        u, v = local
        single = u @ single @ v.T
    coeff = np.ones((1, 1), dtype=np.complex128)
    for _ in range(n):
        coeff = np.kron(coeff, single)
    return DenseBipartiteState(d, n, coeff)


def random_local_unitaries(d: int, seed: int):
    rng = np.random.default_rng(seed)
    return unitary_group.rvs(d, random_state=rng), unitary_group.rvs(d, random_state=rng)


# -- symmetric group characters --------------------------------------------

def cycle_type(perm) -> tuple[int, ...]:
    seen = [False] * len(perm)
    lengths = []
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


@lru_cache(maxsize=None)
def _mn(beta: frozenset, cycles: tuple) -> int:
    # beta-set form: removing a rim hook of length r moves one bead down by r
    if not cycles:
        return 1
    r, rest = cycles[0], cycles[1:]
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in beta:
            continue
        crossed = sum(1 for x in beta if target < x < b)
        total += (-1) ** crossed * _mn((beta - {b}) | {target}, rest)
    return total


def character(lam: YoungIndex, cycles) -> int:
    """``χ_λ`` on the class with cycle lengths ``cycles`` (Murnaghan-Nakayama)."""
    parts = lam.nonzero
    if sum(cycles) != sum(parts):
        raise PreconditionError("cycle type and shape must have the same size")
    ell = len(parts)
    beta = frozenset(x + ell - 1 - i for i, x in enumerate(parts))
    return _mn(beta, tuple(sorted(cycles, reverse=True)))


# -- isotypic projectors ----------------------------------------------------

@dataclass(frozen=True)
class IsotypicProjector:
    index: YoungIndex
    matrix: np.ndarray


@lru_cache(maxsize=16)
def _permutation_maps(d: int, n: int):
    # for each cycle type: list of basis index maps of the permutations in that class
    dim = d ** n
    grid = np.arange(dim).reshape([d] * n)
    classes = defaultdict(list)
    for perm in itertools.permutations(range(n)):
        classes[cycle_type(perm)].append(grid.transpose(perm).reshape(-1))
    return dict(classes)


def isotypic_projector(lam: YoungIndex, d: int, n: int, caps: OracleCaps = DEFAULT_CAPS) -> IsotypicProjector:
    """``(dim V / n!) Σ_σ χ_λ(σ) σ`` on ``(C^d)^{⊗n}``."""
    _check_caps(d, n, caps)
    lam = YoungIndex.of(lam.parts, d)
    if lam.n != n:
        raise PreconditionError("shape size must equal n")
    dim = d ** n
    matrix = np.zeros((dim, dim))
    cols = np.arange(dim)
    scale = dim_v(lam) / math.factorial(n)
    for cycles, maps in _permutation_maps(d, n).items():
        chi = character(lam, cycles)
        if chi == 0:
            continue
        for image in maps:
            matrix[image, cols] += scale * chi
    return IsotypicProjector(lam, matrix)


def projector_family(d: int, n: int, caps: OracleCaps = DEFAULT_CAPS) -> list[IsotypicProjector]:
    return [isotypic_projector(lam, d, n, caps) for lam in enumerate_young_indices(n, d)]


def verify_projectors(d: int, n: int, caps: OracleCaps = DEFAULT_CAPS) -> dict:
    """Largest violations of idempotence, self-adjointness, trace and completeness."""
    family = projector_family(d, n, caps)
    dim = d ** n
    total = np.zeros((dim, dim))
    idem = adj = trace = 0.0
    for proj in family:
        m = proj.matrix
        total += m
        idem = max(idem, float(np.abs(m @ m - m).max()))
        adj = max(adj, float(np.abs(m - m.T).max()))
        trace = max(trace, abs(float(np.trace(m)) - dim_u(proj.index) * dim_v(proj.index)))
    return {
        "idempotence": idem,
        "self_adjoint": adj,
        "trace": trace,
        "completeness": float(np.abs(total - np.eye(dim)).max()),
    }


def verify_outcome_law(p, n: int, local=None, caps: OracleCaps = DEFAULT_CAPS) -> float:
    """Max ``|Tr(P_λ ρ_A) - a_λ|`` over all shapes."""
    spec = as_spectrum(p)
    state = build_state(spec, n, local, caps)
    rho = state.reduced_a()
    worst = 0.0
    for proj in projector_family(spec.d, n, caps):
        traced = float(np.real(np.trace(proj.matrix @ rho)))
        worst = max(worst, abs(traced - float(outcome_probability(proj.index, spec))))
    return worst


@dataclass(frozen=True)
class ExtractionCheck:
    index: YoungIndex
    probability: float
    rank: int
    rank_ok: bool
    group_residual: float
    entropy_residual: float
    extracted_bits: float
    u_spectrum: tuple


def verify_extracted_entanglement(p, n: int, lam: YoungIndex, local=None,
                                  caps: OracleCaps = DEFAULT_CAPS,
                                  zero_tol: float = 1e-12) -> ExtractionCheck:
    """Project both parties onto shape ``lam`` and inspect A's reduced spectrum.

    The spectrum must split into blocks of ``dim V`` equal eigenvalues, so
    the entanglement entropy is the entropy of the block weights plus
    ``log2 dim V``.
    """
    spec = as_spectrum(p)
    state = build_state(spec, n, local, caps)
    proj = isotypic_projector(lam, spec.d, n, caps).matrix
    projected = proj @ state.coefficients @ proj.T
    weight = float(np.linalg.norm(projected) ** 2)
    if weight <= zero_tol:
        raise PreconditionError(f"outcome {lam} has zero probability")
    projected = projected / math.sqrt(weight)
    eig = np.sort(np.linalg.eigvalsh(projected @ projected.conj().T))[::-1]
    eig = eig[eig > zero_tol * max(1.0, float(eig[0]))]
    block = dim_v(lam)
    rank = int(eig.size)
    rank_ok = rank % block == 0 and rank // block <= dim_u(lam)
    if not rank_ok:
        return ExtractionCheck(lam, weight, rank, False, math.inf, math.inf, math.log2(block), ())
    groups = eig.reshape(-1, block)
    residual = float((groups.max(axis=1) - groups.min(axis=1)).max())
    u_spec = groups.sum(axis=1)
    entropy = shannon_entropy(eig / eig.sum())
    predicted = shannon_entropy(u_spec / u_spec.sum()) + math.log2(block)
    return ExtractionCheck(lam, weight, rank, True, residual, abs(entropy - predicted),
                           math.log2(block), tuple(float(x) for x in u_spec))
