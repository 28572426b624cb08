"""Dense linear algebra primitives."""

import math
from typing import Literal

import numpy as np

from ..utils import ShapeError, UnsupportedSizeError, get_logger

logger = get_logger(__name__)

DEFAULT_RANK_TOL = 1e-8
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60

SvdMethod = Literal["jacobi", "lapack"]


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array.

    Raises:
        ShapeError: If the input is not two-dimensional
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got array with shape {arr.shape}")
    return arr


def matmul(a, b) -> np.ndarray:
    """Matrix product ``a @ b``.

    Raises:
        ShapeError: If ``a.cols != b.rows``
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"matmul: inner dimensions differ ({a.shape[0]}x{a.shape[1]} @ "
            f"{b.shape[0]}x{b.shape[1]})"
        )
    return a @ b


def singular_values(
    a,
    method: SvdMethod = "jacobi",
    tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> np.ndarray:
    """Singular values in descending order.

    The default path is one-sided cyclic Jacobi: columns are rotated pairwise
    until every pair is orthogonal to ``tol`` (relative to the column norms);
    the column norms are then the singular values. ``method="lapack"`` defers
    to ``numpy.linalg.svd`` for matrices too large for the Python sweep.

    Args:
        a: Matrix (rows x cols)
        method: "jacobi" or "lapack"
        tol: Relative orthogonality threshold for a rotation to be skipped
        max_sweeps: Sweep limit for the Jacobi path

    Returns:
        Array of length min(rows, cols)
    """
    a = as_matrix(a)
    if a.size == 0:
        return np.empty(0)
    if method == "lapack":
        return np.linalg.svd(a, compute_uv=False)
    if method != "jacobi":
        raise ValueError(f"Unknown SVD method: {method}")

    # Work on the tall orientation so there are min(rows, cols) columns.
    work = a.T.copy() if a.shape[1] > a.shape[0] else a.copy()
    n = work.shape[1]

    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                col_p = work[:, p]
                col_q = work[:, q]
                alpha = col_p @ col_p
                beta = col_q @ col_q
                gamma = col_p @ col_q
                # Square roots taken separately: alpha * beta underflows for tiny columns.
                if gamma == 0.0 or abs(gamma) <= tol * math.sqrt(alpha) * math.sqrt(beta):
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                if t == 0.0:
                    continue
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                new_p = c * col_p - s * col_q
                new_q = s * col_p + c * col_q
                work[:, p] = new_p
                work[:, q] = new_q
                rotated = True
        if not rotated:
            break
    else:
        logger.warning(f"Jacobi SVD hit the sweep limit ({max_sweeps}) on a {a.shape} matrix")

    values = np.linalg.norm(work, axis=0)
    return np.sort(values)[::-1]


def numerical_rank(a, rel_tol: float = DEFAULT_RANK_TOL, method: SvdMethod = "jacobi") -> int:
    """Number of singular values above ``rel_tol * sigma_max``."""
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    values = singular_values(a, method=method)
    if values.size == 0 or values[0] == 0.0:
        return 0
    return int(np.count_nonzero(values > rel_tol * values[0]))


def hadamard(n: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order ``n`` (entries +-1, H H^T = n I).

    Raises:
        UnsupportedSizeError: If ``n`` is not a power of two
    """
    if n < 1 or n & (n - 1):
        raise UnsupportedSizeError(f"size must be a power of two, got {n}")
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


def frobenius_sq(a) -> float:
    """Squared Frobenius norm."""
    a = as_matrix(a)
    return float(np.sum(a * a))


def is_finite(a) -> bool:
    return bool(np.all(np.isfinite(np.asarray(a))))
