"""Comparison initializers: Xavier, Kaiming, orthogonal, Hadamard, zero, partial identity."""

import math
from typing import Optional

import numpy as np

from ..tensor_core import ConvKernel, Rng, gaussian_matrix, hadamard, uniform_matrix
from ..utils import UnsupportedSizeError, get_logger
from .spec import InitMethod, InitSpec

logger = get_logger(__name__)

RELU_GAIN = math.sqrt(2.0)


def xavier_uniform(d_out: int, d_in: int, rng: Rng) -> np.ndarray:
    bound = math.sqrt(6.0 / (d_in + d_out))
    return uniform_matrix(rng, d_out, d_in, -bound, bound)


def kaiming_normal(d_out: int, d_in: int, rng: Rng, gain: float = RELU_GAIN) -> np.ndarray:
    """Fan-in normal: N(0, gain**2 / d_in)."""
    return gaussian_matrix(rng, d_out, d_in, 0.0, gain / math.sqrt(d_in))


def orthogonal(d_out: int, d_in: int, rng: Rng) -> np.ndarray:
    """Orthonormal rows or columns from the QR of a Gaussian matrix.

    The diagonal of R is forced positive so the result is a deterministic
    function of the Gaussian draw.
    """
    tall, short = max(d_out, d_in), min(d_out, d_in)
    q, r = np.linalg.qr(gaussian_matrix(rng, tall, short))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    return q if d_out >= d_in else q.T


def partial_identity(d_out: int, d_in: int) -> np.ndarray:
    """Identity block padded with zeros."""
    return np.eye(d_out, d_in)


def normalized_hadamard(n: int) -> np.ndarray:
    return hadamard(n) / math.sqrt(n)


def partial_hadamard(d_out: int, d_in: int) -> np.ndarray:
    """Normalized Hadamard on the output side times a partial identity.

    With ``n`` the next power of two >= ``d_out``, column ``j < min(n, d_in)``
    is column ``j`` of ``H_n / sqrt(n)`` cut to ``d_out`` rows; later columns are
    zero. Growing layers spread each input over every output, shrinking
    layers read their leading inputs only, so a grow-then-shrink pair does not
    share one column space.
    """
    n = 1
    while n < d_out:
        n *= 2
    w = np.zeros((d_out, d_in))
    k = min(n, d_in)
    w[:, :k] = normalized_hadamard(n)[:d_out, :k]
    return w


def baseline(spec: InitSpec, d_out: int, d_in: int, rng: Optional[Rng] = None) -> np.ndarray:
    """Construct a baseline weight.

    Args:
        spec: Initializer spec with a baseline method
        d_out: Rows
        d_in: Columns
        rng: Stream for random baselines; defaults to ``Rng(spec.seed)``

    Raises:
        UnsupportedSizeError: Hadamard on a non-square or non power-of-two shape
        ValueError: If the method is not a baseline
    """
    rng = rng or Rng(spec.seed)
    method = spec.method
    if method == InitMethod.XAVIER:
        return xavier_uniform(d_out, d_in, rng)
    if method == InitMethod.KAIMING:
        return kaiming_normal(d_out, d_in, rng)
    if method == InitMethod.ORTHOGONAL:
        return orthogonal(d_out, d_in, rng)
    if method == InitMethod.ZERO:
        return np.zeros((d_out, d_in))
    if method == InitMethod.PARTIAL_IDENTITY:
        return partial_identity(d_out, d_in)
    if method == InitMethod.HADAMARD:
        if d_out != d_in:
            raise UnsupportedSizeError(f"Hadamard needs a square shape, got {d_out}x{d_in}")
        return normalized_hadamard(d_out)
    raise ValueError(f"{method.value} is not a baseline method")


def baseline_kernel(
    spec: InitSpec, k: int, c_in: int, c_out: int, rng: Optional[Rng] = None
) -> ConvKernel:
    """Baseline on the kernel's matrix view (fan-in = k*k*c_in)."""
    return ConvKernel.from_matrix(baseline(spec, c_out, k * k * c_in, rng), k, k, c_in)
