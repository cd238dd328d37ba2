"""Schmidt spectra, tagged exact (``Fraction``) or floating point."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import PreconditionError

FLOAT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Sorted (non-increasing) Schmidt coefficients of a bipartite pure state.

    ``exact`` is True when every entry is a ``Fraction``; such spectra select
    the exact rational code paths downstream.
    """

    probs: tuple
    exact: bool

    def __post_init__(self):
        probs = self.probs
        if len(probs) < 1:
            raise PreconditionError("empty spectrum")
        if any(x < 0 for x in probs):
            raise PreconditionError(f"negative Schmidt coefficient in {probs}")
        if any(a < b for a, b in zip(probs, probs[1:])):
            raise PreconditionError("spectrum must be sorted non-increasing")
        if self.exact:
            if sum(probs) != 1:
                raise PreconditionError(f"exact spectrum sums to {sum(probs)}, not 1")
        elif abs(math.fsum(probs) - 1.0) > FLOAT_SUM_TOL:
            raise PreconditionError(f"spectrum sums to {math.fsum(probs)!r}, not 1")

    @classmethod
    def from_values(cls, values, exact: bool | None = None) -> "SchmidtSpectrum":
        values = list(values)
        if exact is None:
            exact = all(isinstance(v, Rational) for v in values)
        if exact:
            vals = sorted((Fraction(v) for v in values), reverse=True)
        else:
            vals = sorted((float(v) for v in values), reverse=True)
        return cls(tuple(vals), bool(exact))

    @classmethod
    def parse(cls, text: str) -> "SchmidtSpectrum":
        """Parse ``"3/4,1/4"`` (exact) or ``"0.6,0.4"`` (float)."""
        tokens = [t.strip() for t in text.split(",") if t.strip()]
        if not tokens:
            raise PreconditionError("empty spectrum string")
        decimal = any(ch in t for t in tokens for ch in ".eE")
        try:
            values = [float(t) for t in tokens] if decimal else [Fraction(t) for t in tokens]
        except (ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"cannot parse spectrum {text!r}: {exc}") from None
        return cls.from_values(values, exact=not decimal)

    @classmethod
    def uniform(cls, d: int) -> "SchmidtSpectrum":
        return cls(tuple(Fraction(1, d) for _ in range(d)), True)

    @property
    def d(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.probs], dtype=np.float64)

    def as_fractions(self) -> tuple[Fraction, ...]:
        # floats convert to their exact binary value
        return tuple(Fraction(x) for x in self.probs)

    @property
    def is_degenerate(self) -> bool:
        return any(a == b for a, b in zip(self.probs, self.probs[1:]))

    @property
    def strictly_positive(self) -> bool:
        return self.probs[-1] > 0

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.probs)


def as_spectrum(p) -> SchmidtSpectrum:
    if isinstance(p, SchmidtSpectrum):
        return p
    if isinstance(p, str):
        return SchmidtSpectrum.parse(p)
    return SchmidtSpectrum.from_values(p)
