"""Deterministic dense linear algebra: matrices, kernels, seeded streams."""

from .io import (
    matrix_from_bytes,
    matrix_to_bytes,
    read_matrix_binary,
    read_matrix_csv,
    write_matrix_binary,
    write_matrix_csv,
)
from .kernel import ConvKernel
from .linalg import (
    DEFAULT_RANK_TOL,
    as_matrix,
    frobenius_sq,
    hadamard,
    is_finite,
    matmul,
    numerical_rank,
    singular_values,
)
from .rng import Rng, gaussian_matrix, uniform_matrix

__all__ = [
    "ConvKernel",
    "DEFAULT_RANK_TOL",
    "Rng",
    "as_matrix",
    "frobenius_sq",
    "gaussian_matrix",
    "hadamard",
    "is_finite",
    "matmul",
    "matrix_from_bytes",
    "matrix_to_bytes",
    "numerical_rank",
    "read_matrix_binary",
    "read_matrix_csv",
    "singular_values",
    "uniform_matrix",
    "write_matrix_binary",
    "write_matrix_csv",
]
