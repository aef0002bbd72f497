"""Numerical toolkit for a Rössler-type flow: fixed points, return maps,
invariant manifolds and the comparison with real quadratic maps."""

from .errors import DomainError, NumericalFailure, RosslerLabError
from .model import CLASSIC_CHAOTIC, Params, RosslerField

__all__ = ["CLASSIC_CHAOTIC", "DomainError", "NumericalFailure", "Params", "RosslerField",
           "RosslerLabError"]
__version__ = "0.1.0"
