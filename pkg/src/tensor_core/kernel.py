"""Four-dimensional convolution kernels and their matrix view."""

from dataclasses import dataclass

import numpy as np

from ..utils import ShapeError


@dataclass(frozen=True)
class ConvKernel:
    """Convolution kernel stored as ``data[row_offset, col_offset, c_in, c_out]``.

    The matrix view has one row per output channel; its columns flatten
    (row offset, col offset, input channel) with the input channel varying
    fastest. ``from_matrix(k.to_matrix(), ...)`` reproduces ``k`` bit for bit.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 4:
            raise ShapeError(f"ConvKernel needs a 4-D array, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ShapeError(f"ConvKernel dimensions must be positive, got {arr.shape}")
        object.__setattr__(self, "data", arr)

    @property
    def k_h(self) -> int:
        return self.data.shape[0]

    @property
    def k_w(self) -> int:
        return self.data.shape[1]

    @property
    def c_in(self) -> int:
        return self.data.shape[2]

    @property
    def c_out(self) -> int:
        return self.data.shape[3]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def to_matrix(self) -> np.ndarray:
        """(c_out, k_h * k_w * c_in) matrix view."""
        return self.data.reshape(self.k_h * self.k_w * self.c_in, self.c_out).T.copy()

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, k_h: int, k_w: int, c_in: int) -> "ConvKernel":
        """Inverse of ``to_matrix``.

        Raises:
            ShapeError: If the column count is not ``k_h * k_w * c_in``
        """
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[1] != k_h * k_w * c_in:
            raise ShapeError(
                f"matrix of shape {m.shape} cannot be reshaped to a "
                f"{k_h}x{k_w}x{c_in}x? kernel"
            )
        return cls(m.T.reshape(k_h, k_w, c_in, m.shape[0]).copy())

    @classmethod
    def zeros(cls, k_h: int, k_w: int, c_in: int, c_out: int) -> "ConvKernel":
        return cls(np.zeros((k_h, k_w, c_in, c_out)))

    def tap(self, row: int, col: int) -> np.ndarray:
        """(c_out, c_in) weight matrix of one spatial tap."""
        return self.data[row, col].T.copy()
