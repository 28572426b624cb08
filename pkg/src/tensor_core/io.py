"""Matrix text and binary export.

CSV: one matrix row per line, comma separated, 17 significant digits (exact
float64 round trip). Binary: two little-endian uint64 dimensions (rows, cols)
followed by rows*cols little-endian float64 values in row-major order.
"""

from pathlib import Path
from typing import Union

import numpy as np

from ..utils import FormatError, get_logger
from .linalg import as_matrix

logger = get_logger(__name__)

PathLike = Union[str, Path]

CSV_FLOAT_FORMAT = "%.17g"
_HEADER_BYTES = 16


def write_matrix_csv(path: PathLike, matrix) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, as_matrix(matrix), delimiter=",", fmt=CSV_FLOAT_FORMAT)
    logger.debug(f"Wrote matrix CSV {path}")
    return path


def read_matrix_csv(path: PathLike) -> np.ndarray:
    return np.loadtxt(Path(path), delimiter=",", dtype=np.float64, ndmin=2)


def matrix_to_bytes(matrix) -> bytes:
    m = as_matrix(matrix)
    header = np.array(m.shape, dtype="<u8").tobytes()
    return header + np.ascontiguousarray(m, dtype="<f8").tobytes()


def matrix_from_bytes(raw: bytes) -> np.ndarray:
    """Decode the binary matrix format.

    Raises:
        FormatError: On a short header or a body whose length disagrees with the dims
    """
    if len(raw) < _HEADER_BYTES:
        raise FormatError(
            f"binary matrix header needs {_HEADER_BYTES} bytes, got {len(raw)}",
            field="dims",
            offset=0,
        )
    rows, cols = (int(v) for v in np.frombuffer(raw[:_HEADER_BYTES], dtype="<u8"))
    expected = _HEADER_BYTES + 8 * rows * cols
    if len(raw) != expected:
        raise FormatError(
            f"binary matrix body has {len(raw) - _HEADER_BYTES} bytes, expected {8 * rows * cols} "
            f"for {rows}x{cols}",
            field="data",
            offset=_HEADER_BYTES,
        )
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER_BYTES)
    return data.reshape(rows, cols).astype(np.float64)


def write_matrix_binary(path: PathLike, matrix) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(matrix_to_bytes(matrix))
    logger.debug(f"Wrote matrix binary {path}")
    return path


def read_matrix_binary(path: PathLike) -> np.ndarray:
    return matrix_from_bytes(Path(path).read_bytes())
