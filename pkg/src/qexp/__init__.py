"""Greedy and lazy double-base expansions, their transfer operators and invariant densities."""

from .base import BasePair, new_base, random_bases, reference_base, solve_base
from .density import DensityPair, invariant_densities, jump_function
from .errors import QexpError
from .stepfn import StepFunction
from .transfer import FPOperator

__all__ = [
    "BasePair",
    "DensityPair",
    "FPOperator",
    "QexpError",
    "StepFunction",
    "invariant_densities",
    "jump_function",
    "new_base",
    "random_bases",
    "reference_base",
    "solve_base",
]
