"""Universal entanglement concentration: outcome laws, exponents, postprocessing and checks."""
from ._core import BACKEND
from .errors import DegenerateSpectrumError, InvariantError, PreconditionError, ResourceCapError
from .partitions import YoungIndex, dim_u, dim_v, enumerate_young_indices
from .schur_measure import YieldDistribution, outcome_probability, schur_polynomial, yield_distribution
from .spectrum import SchmidtSpectrum

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DegenerateSpectrumError",
    "InvariantError",
    "PreconditionError",
    "ResourceCapError",
    "SchmidtSpectrum",
    "YieldDistribution",
    "YoungIndex",
    "dim_u",
    "dim_v",
    "enumerate_young_indices",
    "outcome_probability",
    "schur_polynomial",
    "yield_distribution",
]
