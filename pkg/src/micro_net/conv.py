"""Forward-only 2-D convolution (stride 1, zero 'same' padding)."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..tensor_core import ConvKernel
from ..utils import ShapeError


def conv2d_forward(kernel: ConvKernel, x: np.ndarray) -> np.ndarray:
    """Cross-correlate ``x`` with ``kernel``.

    Args:
        kernel: (k_h, k_w, c_in, c_out) kernel
        x: (c_in, H, W) image or (n, c_in, H, W) batch

    Returns:
        (c_out, H, W) or (n, c_out, H, W); output pixel (r, c) sees input rows
        ``r - (k_h - 1) // 2`` onwards, so odd kernels are centered
    """
    x = np.asarray(x, dtype=np.float64)
    batched = x.ndim == 4
    if x.ndim == 3:
        x = x[np.newaxis]
    elif not batched:
        raise ShapeError(f"conv input must be (c, H, W) or (n, c, H, W), got shape {x.shape}")
    if x.shape[1] != kernel.c_in:
        raise ShapeError(f"kernel expects {kernel.c_in} input channels, got {x.shape[1]}")

    top, left = (kernel.k_h - 1) // 2, (kernel.k_w - 1) // 2
    padded = np.pad(
        x,
        ((0, 0), (0, 0), (top, kernel.k_h - 1 - top), (left, kernel.k_w - 1 - left)),
    )
    windows = sliding_window_view(padded, (kernel.k_h, kernel.k_w), axis=(2, 3))
    out = np.einsum("nchwij,ijco->nohw", windows, kernel.data, optimize=True)
    return out if batched else out[0]
