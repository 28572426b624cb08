"""Convolution kernels: patch-maintain (IDIC / IDIZC) and channel-maintain."""

from typing import Optional

from ..tensor_core import ConvKernel, Rng
from ..utils import UnsupportedShapeError
from .identity import idi, idiz


def idic(
    k: int,
    c_in: int,
    c_out: int,
    tau: float = 1.0,
    loose_eps: float = 0.0,
    rng: Optional[Rng] = None,
) -> ConvKernel:
    """Patch-maintain kernel: IDI_tau over the flattened (tap, channel) axis.

    Output channel ``m`` copies input column ``m % (k*k*c_in)``, i.e. a
    spatially shifted tap of some input channel, so features get shifted
    rather than passed through one-to-one.
    """
    matrix = idi(c_out, k * k * c_in, tau, loose_eps, rng)
    return ConvKernel.from_matrix(matrix, k, k, c_in)


def idizc(k: int, c_in: int, c_out: int, epsilon: float = 1e-6) -> ConvKernel:
    """Patch-maintain form of IDIZ_epsilon."""
    return ConvKernel.from_matrix(idiz(c_out, k * k * c_in, epsilon), k, k, c_in)


def channel_maintain(k: int, c_in: int, c_out: int, tau: float = 1.0) -> ConvKernel:
    """Dirac-style kernel: IDI_tau on the center tap, zero elsewhere.

    Raises:
        UnsupportedShapeError: If ``k`` is even (no center tap)
    """
    if k < 1 or k % 2 == 0:
        raise UnsupportedShapeError(f"channel-maintain needs an odd kernel size, got k={k}")
    kernel = ConvKernel.zeros(k, k, c_in, c_out)
    center = (k - 1) // 2
    kernel.data[center, center] = idi(c_out, c_in, tau).T
    return kernel
