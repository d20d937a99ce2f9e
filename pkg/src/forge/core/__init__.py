from .gf2 import (
    BinaryField,
    FieldElement,
    FieldMatrix,
    build_field,
    field_cast,
    field_vandermonde,
)
from .intmatrix import IntMatrix, left_kernel_basis, matrix_tensor, tensor_power
from .primes import find_prime_in_range
from .vandermonde import reduced_vandermonde

__all__ = [
    "BinaryField",
    "FieldElement",
    "FieldMatrix",
    "IntMatrix",
    "build_field",
    "field_cast",
    "field_vandermonde",
    "find_prime_in_range",
    "left_kernel_basis",
    "matrix_tensor",
    "reduced_vandermonde",
    "tensor_power",
]
