"""Exact gadgets for lattice and code hardness reductions, with brute-force oracles."""

from .errors import (
    ForgeError,
    FormatError,
    GenerationError,
    InfeasibleParametersError,
    ParameterError,
    SizeError,
    StageError,
)

__version__ = "0.1.0"

__all__ = [
    "ForgeError",
    "FormatError",
    "GenerationError",
    "InfeasibleParametersError",
    "ParameterError",
    "SizeError",
    "StageError",
]
