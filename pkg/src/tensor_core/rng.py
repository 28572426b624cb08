"""Seeded random streams.

Every stochastic routine takes an explicit ``Rng``; there is no global state.
The bit generator is Philox-4x64 (counter-based) keyed directly by the seed,
so identical seeds give identical streams on every platform.
"""

from typing import List, Tuple, Union

import numpy as np

from ..utils import get_logger

logger = get_logger(__name__)

MASK64 = (1 << 64) - 1

Shape = Union[int, Tuple[int, ...]]


class Rng:
    """Single-owner random stream keyed by a 64-bit seed."""

    def __init__(self, seed: int):
        """Initialize the stream.

        Args:
            seed: Any integer; reduced modulo 2**64
        """
        self.seed = int(seed) & MASK64
        self._generator = np.random.Generator(np.random.Philox(key=self.seed))

    def normal(self, mean: float = 0.0, std: float = 1.0, size: Shape = 1) -> np.ndarray:
        return self._generator.normal(mean, std, size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size: Shape = 1) -> np.ndarray:
        return self._generator.uniform(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def spawn(self, n: int) -> List["Rng"]:
        """Derive ``n`` independent child streams for concurrent trials.

        Child seeds are drawn from this stream, so the parent advances.
        """
        seeds = self._generator.integers(0, MASK64, size=n, dtype=np.uint64, endpoint=True)
        return [Rng(int(s)) for s in seeds]

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed})"


def gaussian_matrix(rng: Rng, rows: int, cols: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
    """Matrix with i.i.d. N(mean, std**2) entries.

    Args:
        rng: Random stream (advanced in place)
        rows: Row count
        cols: Column count
        mean: Entry mean
        std: Entry standard deviation, must be >= 0

    Returns:
        (rows, cols) float64 array
    """
    if std < 0:
        raise ValueError(f"std must be non-negative, got {std}")
    if std == 0:
        return np.full((rows, cols), float(mean))
    return rng.normal(mean, std, (rows, cols))


def uniform_matrix(rng: Rng, rows: int, cols: int, low: float, high: float) -> np.ndarray:
    """Matrix with i.i.d. U(low, high) entries."""
    if high < low:
        raise ValueError(f"high ({high}) must not be below low ({low})")
    return rng.uniform(low, high, (rows, cols))


