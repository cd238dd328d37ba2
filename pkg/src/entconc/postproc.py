"""Classical relabelling of claimed yields and the optimal relabellings.

A kernel moves an observed yield ``x`` to a claimed yield ``y``. Claiming
more than was extracted (``y > x``) costs distortion ``1 - 2^{-n(y-x)}``.
Claiming less is free. Kernels live on a finite support that contains
the observed yields and the ceiling ``log2 d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import PreconditionError
from .lp import solve_lp
from .rates import rate_function, shannon_entropy
from .schur_measure import YieldDistribution

__all__ = [
    "TransitionKernel",
    "DistortionReport",
    "YieldLaw",
    "step_utility",
    "linear_utility",
    "validate_utility",
    "kernel_support",
    "identity_kernel",
    "apply_kernel",
    "generalized_yield",
    "optimize_weighted_sum",
    "lp_weighted_sum",
    "lp_distortion_free",
    "optimal_under_worst_constraint",
    "optimal_under_average_constraint",
    "average_improvement_bounds",
    "lagrangian_bound_holds",
    "shift_tail_bound_check",
    "random_kernel",
    "format_kernel",
    "parse_kernel",
    "LP_SUPPORT_MAX",
]

SUPPORT_TOL = 1e-9
TIE_TOL = 1e-12
ROW_SUM_TOL = 1e-9
LP_SUPPORT_MAX = 12

Utility = Callable[[float], float]


@dataclass(frozen=True)
class YieldLaw:
    """A finite law over claimed yields (sorted, distinct)."""

    values: np.ndarray
    probs: np.ndarray

    @classmethod
    def of(cls, dist) -> "YieldLaw":
        if isinstance(dist, YieldLaw):
            return dist
        values, probs = dist.yield_law()
        return cls(values, probs)


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic matrix on ``support``: ``rows[i][j] = Q(support[j] | support[i])``."""

    n: int
    d: int
    support: tuple
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "support", tuple(float(x) for x in self.support))
        size = len(self.support)
        if rows.shape != (size, size):
            raise PreconditionError(f"kernel rows must be {size}x{size}, got {rows.shape}")
        if np.any(rows < -ROW_SUM_TOL) or np.any(np.abs(rows.sum(axis=1) - 1) > ROW_SUM_TOL):
            raise PreconditionError("kernel rows must be probability vectors")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise PreconditionError("kernel support must be strictly increasing")

    def index(self, value: float) -> int:
        pos = int(np.argmin(np.abs(np.asarray(self.support) - value)))
        if abs(self.support[pos] - value) > SUPPORT_TOL:
            raise PreconditionError(f"yield {value} not in kernel support")
        return pos

    @property
    def is_identity(self) -> bool:
        return bool(np.allclose(self.rows, np.eye(len(self.support)), atol=1e-15))

    @property
    def is_upper_triangular(self) -> bool:
        return bool(np.all(np.tril(self.rows, -1) == 0))


@dataclass(frozen=True)
class DistortionReport:
    worst_case: float
    average: float


def step_utility(threshold: float) -> Utility:
    """``x -> 1`` if ``x >= threshold`` else ``0`` (success indicator)."""
    def utility(x):
        return 1.0 if x >= threshold - TIE_TOL else 0.0
    utility.label = f"step@{threshold}"
    return utility


def linear_utility(d: int) -> Utility:
    """``x -> x / log2 d`` (normalised yield)."""
    ceiling = math.log2(d)

    def utility(x):
        return x / ceiling
    utility.label = "linear"
    return utility


def validate_utility(utility: Utility, support, d: int) -> None:
    vals = [utility(x) for x in support]
    if any(b < a - TIE_TOL for a, b in zip(vals, vals[1:])):
        raise PreconditionError("utility must be non-decreasing on the support")
    if abs(utility(0.0)) > TIE_TOL or abs(utility(math.log2(d)) - 1) > TIE_TOL:
        raise PreconditionError("utility must satisfy utility(0) = 0 and utility(log2 d) = 1")


def _merge_support(values) -> tuple:
    out: list[float] = []
    for v in sorted(float(x) for x in values):
        if not out or v - out[-1] > SUPPORT_TOL:
            out.append(v)
    return tuple(out)


def kernel_support(dist, extra=()) -> tuple:
    law = YieldLaw.of(dist)
    d = dist.d if isinstance(dist, YieldDistribution) else None
    points = list(law.values) + list(extra)
    if d is not None:
        points.append(math.log2(d))
    return _merge_support(points)


def identity_kernel(dist: YieldDistribution, extra=()) -> TransitionKernel:
    support = kernel_support(dist, extra)
    return TransitionKernel(dist.n, dist.d, support, np.eye(len(support)))


def _input_weights(law: YieldLaw, kernel: TransitionKernel) -> np.ndarray:
    weights = np.zeros(len(kernel.support))
    for v, pr in zip(law.values, law.probs):
        weights[kernel.index(v)] += pr
    return weights


def _distortion_matrix(kernel: TransitionKernel) -> np.ndarray:
    s = np.asarray(kernel.support)
    shift = s[None, :] - s[:, None]
    return np.where(shift > 0, -np.expm1(-kernel.n * shift * math.log(2)), 0.0)


def apply_kernel(dist, kernel: TransitionKernel) -> tuple[YieldLaw, DistortionReport]:
    """Push the observed law through ``kernel``; report worst-case and mean distortion."""
    law = YieldLaw.of(dist)
    weights = _input_weights(law, kernel)
    out = weights @ kernel.rows
    cost = _distortion_matrix(kernel)
    used = (weights[:, None] > 0) & (kernel.rows > 0)
    worst = float(cost[used].max()) if np.any(used) else 0.0
    average = math.fsum((weights[:, None] * kernel.rows * cost).ravel())
    keep = out > 0
    return (YieldLaw(np.asarray(kernel.support)[keep], out[keep]),
            DistortionReport(worst, min(average, worst)))


def generalized_yield(dist, utility: Utility) -> float:
    """``E[utility(X)]`` over the (claimed) yield law."""
    law = YieldLaw.of(dist)
    return math.fsum(pr * utility(v) for v, pr in zip(law.values, law.probs))


def _row_objectives(kernel_support_: tuple, utility: Utility, weight: float, n: int):
    s = np.asarray(kernel_support_)
    fv = np.array([utility(v) for v in s])
    shift = s[None, :] - s[:, None]
    cost = np.where(shift > 0, -np.expm1(-n * shift * math.log(2)), 0.0)
    obj = fv[None, :] - weight * cost
    obj[shift < -SUPPORT_TOL] = -np.inf  # only upward (or stay) targets
    return obj


def optimize_weighted_sum(dist: YieldDistribution, utility: Utility, weight: float, n: int | None = None):
    """Maximise ``E[utility(Y)] - weight * mean distortion`` over relabellings.

    Each observed yield independently picks its best target ``y >= x``;
    ties go to the smallest ``y``. Returns ``(kernel, value)``.
    """
    if weight <= 1:
        raise PreconditionError("weight must exceed 1")
    n = dist.n if n is None else n
    law = YieldLaw.of(dist)
    support = kernel_support(dist)
    obj = _row_objectives(support, utility, weight, n)
    rows = np.zeros((len(support), len(support)))
    best = np.empty(len(support))
    for i in range(len(support)):
        top = np.max(obj[i])
        j = int(np.argmax(obj[i] >= top - TIE_TOL))
        rows[i, j] = 1.0
        best[i] = obj[i, j]
    kernel = TransitionKernel(n, dist.d, support, rows)
    weights = _input_weights(law, kernel)
    return kernel, math.fsum(weights * best)


def lp_weighted_sum(dist: YieldDistribution, utility: Utility, weight: float, n: int | None = None):
    """Same optimum via an exact linear program over all upper-triangular kernels.

    Independent check for :func:`optimize_weighted_sum`; the float inputs
    are converted to their exact binary rationals. Returns ``(value, x)``.
    """
    n = dist.n if n is None else n
    support = kernel_support(dist)
    size = len(support)
    if size > LP_SUPPORT_MAX:
        raise PreconditionError(f"LP oracle limited to {LP_SUPPORT_MAX} support points")
    law = YieldLaw.of(dist)
    weights = _input_weights(law, TransitionKernel(n, dist.d, support, np.eye(size)))
    obj = _row_objectives(support, utility, weight, n)
    pairs = [(i, j) for i in range(size) for j in range(size) if np.isfinite(obj[i, j])]
    c = [Fraction(float(weights[i])) * Fraction(float(obj[i, j])) for i, j in pairs]
    a_eq = [[1 if pi == i else 0 for pi, _ in pairs] for i in range(size)]
    result = solve_lp(c, a_eq, [1] * size)
    return result.value, dict(zip(pairs, result.x))


def lp_distortion_free(dist: YieldDistribution, utility: Utility):
    """Best ``E[utility(Y)]`` over kernels that never claim more than observed (exact LP)."""
    support = kernel_support(dist)
    size = len(support)
    if size > LP_SUPPORT_MAX:
        raise PreconditionError(f"LP oracle limited to {LP_SUPPORT_MAX} support points")
    law = YieldLaw.of(dist)
    weights = _input_weights(law, TransitionKernel(dist.n, dist.d, support, np.eye(size)))
    # every target allowed, but upward moves are pinned to zero mass
    pairs = [(i, j) for i in range(size) for j in range(size)]
    c = [Fraction(float(weights[i])) * Fraction(float(utility(support[j]))) for i, j in pairs]
    a_eq = [[1 if pi == i else 0 for pi, _ in pairs] for i in range(size)]
    b_eq = [1] * size
    a_eq += [[1 if (pi, pj) == (i, j) else 0 for pi, pj in pairs]
             for i, j in pairs if support[j] > support[i] + SUPPORT_TOL]
    b_eq += [0] * (len(a_eq) - size)
    result = solve_lp(c, a_eq, b_eq)
    return result.value, dict(zip(pairs, result.x))


def optimal_under_worst_constraint(dist: YieldDistribution, utility: Utility, budget: float, n: int | None = None):
    """Uniform uplift by the largest shift whose distortion stays within ``budget``.

    The shift is ``-log2(1 - budget) / n``, capped at ``log2 d``; shifted yields
    may fall between lattice points and are kept as claimed labels.
    """
    if not 0 <= budget < 1:
        raise PreconditionError("need 0 <= budget < 1")
    n = dist.n if n is None else n
    ceiling = math.log2(dist.d)
    shift = -math.log2(1 - budget) / n
    law = YieldLaw.of(dist)
    if shift == 0:
        kernel = identity_kernel(dist)
        return kernel, generalized_yield(law, utility)
    targets = {float(x): min(float(x) + shift, ceiling) for x in law.values}
    support = kernel_support(dist, targets.values())
    rows = np.eye(len(support))
    kernel_tmp = TransitionKernel(n, dist.d, support, rows)
    for x, y in targets.items():
        i, j = kernel_tmp.index(x), kernel_tmp.index(y)
        rows[i] = 0.0
        rows[i, j] = 1.0
    kernel = TransitionKernel(n, dist.d, support, rows)
    value = math.fsum(pr * utility(targets[float(x)]) for x, pr in zip(law.values, law.probs))
    return kernel, value


def optimal_under_average_constraint(dist: YieldDistribution, utility: Utility, budget: float, n: int | None = None):
    """Send mass ``budget`` of every row to ``log2 d``; mean distortion is at most ``budget``."""
    if not 0 <= budget < 1:
        raise PreconditionError("need 0 <= budget < 1")
    n = dist.n if n is None else n
    support = kernel_support(dist)
    size = len(support)
    rows = (1 - budget) * np.eye(size)
    rows[:, -1] += budget
    kernel = TransitionKernel(n, dist.d, support, rows)
    law, _ = apply_kernel(dist, kernel)
    return kernel, generalized_yield(law, utility)


def average_improvement_bounds(dist: YieldDistribution, utility: Utility, budget: float, margin: float) -> dict:
    """Lower bounds on the gain of the average-constrained uplift.

    ``exact_tail`` uses the true ``Pr{X <= H + margin}``; ``exponential``
    replaces it with ``1 - 2^{-n D(H + margin || p)}``.
    """
    h = shannon_entropy(dist.spectrum)
    level = h + margin
    law = YieldLaw.of(dist)
    below = math.fsum(pr for v, pr in zip(law.values, law.probs) if v <= level + TIE_TOL)
    head = budget * (1 - utility(level))
    ceiling = math.log2(dist.d)
    rate = rate_function(dist.spectrum, min(level, ceiling))
    return {
        "exact_tail": head * below,
        "exponential": head * (1 - 2.0 ** (-dist.n * rate)) if math.isfinite(rate) else head,
    }


def lagrangian_bound_holds(value: float, identity_value: float, weight: float, budget: float) -> bool:
    """``value <= identity_value + weight * budget`` (with rounding slack)."""
    return value <= identity_value + weight * budget + 1e-12


def shift_tail_bound_check(dist, kernel: TransitionKernel, c: float, budget: float):
    """Check ``Pr{shift >= c/n} <= budget / (1 - 2^{-c})`` for a kernel with mean distortion ``<= budget``.

    Returns ``(holds, probability, bound)``.
    """
    law = YieldLaw.of(dist)
    _, report = apply_kernel(law, kernel)
    if report.average > budget + 1e-12:
        raise PreconditionError("kernel mean distortion exceeds r")
    weights = _input_weights(law, kernel)
    s = np.asarray(kernel.support)
    shift = s[None, :] - s[:, None]
    mass = weights[:, None] * kernel.rows
    prob = math.fsum(mass[shift >= c / kernel.n - SUPPORT_TOL])
    bound = budget / (-math.expm1(-c * math.log(2)))
    return prob <= bound + 1e-12, prob, bound


def random_kernel(dist: YieldDistribution, budget: float, rng: np.random.Generator) -> TransitionKernel:
    """Random upper-triangular kernel mixed with the identity so mean distortion is ``<= budget``."""
    support = kernel_support(dist)
    size = len(support)
    raw = np.triu(rng.random((size, size)) ** 3)
    raw /= raw.sum(axis=1, keepdims=True)
    candidate = TransitionKernel(dist.n, dist.d, support, raw)
    _, report = apply_kernel(dist, candidate)
    mix = 1.0 if report.average <= budget else budget / report.average
    rows = (1 - mix) * np.eye(size) + mix * raw
    return TransitionKernel(dist.n, dist.d, support, rows)


def format_kernel(kernel: TransitionKernel) -> str:
    """Plain-text kernel: ``n``, ``d`` and ``support`` header lines, then one ``row`` per input."""
    lines = [
        "# entconc transition kernel v1",
        f"n {kernel.n}",
        f"d {kernel.d}",
        "support " + " ".join(repr(x) for x in kernel.support),
    ]
    lines += ["row " + " ".join(repr(float(v)) for v in row) for row in kernel.rows]
    return "\n".join(lines) + "\n"


def parse_kernel(text: str) -> TransitionKernel:
    n = d = None
    support: list[float] = []
    rows: list[list[float]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "n":
                n = int(rest)
            elif key == "d":
                d = int(rest)
            elif key == "support":
                support = [float(v) for v in rest.split()]
            elif key == "row":
                rows.append([float(v) for v in rest.split()])
            else:
                raise PreconditionError(f"unknown kernel line {line!r}")
        except ValueError as exc:
            raise PreconditionError(f"bad kernel line {line!r}: {exc}") from None
    if n is None or d is None or not support:
        raise PreconditionError("kernel text needs n, d and support lines")
    return TransitionKernel(n, d, tuple(support), np.array(rows))
