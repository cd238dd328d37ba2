"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code raises them
instead of generic ``ValueError``/``RuntimeError`` when a caller-facing
precondition or resource limit is involved.
"""


class PreconditionError(ValueError):
    """An input violates a documented precondition of an operation."""


class DegenerateSpectrumError(PreconditionError):
    """A routine that divides by a Vandermonde got repeated (or zero) entries."""


class ResourceCapError(RuntimeError):
    """A computation would exceed a configured size cap and was refused."""


class InvariantError(AssertionError):
    """A numerical invariant that should always hold was violated."""
