"""cusplab: indicial calculus, tensor tomography and dyadic norms on
hyperbolic cusp surfaces."""

__version__ = "0.1.0"

from .errors import (
    CoverageError,
    CusplabError,
    DegenerateOperatorError,
    InvalidInputError,
    InvalidWeightError,
    NumericFailureError,
    ReductionError,
    ResolutionError,
)

__all__ = [
    "CoverageError",
    "CusplabError",
    "DegenerateOperatorError",
    "InvalidInputError",
    "InvalidWeightError",
    "NumericFailureError",
    "ReductionError",
    "ResolutionError",
    "__version__",
]
