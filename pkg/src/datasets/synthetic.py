"""Seeded synthetic data: linear maps with noise and linearly independent batches."""

import math
from typing import Callable, Optional

import numpy as np

from ..tensor_core import Rng, as_matrix, gaussian_matrix, numerical_rank
from ..utils import get_logger
from .dataset import Dataset

logger = get_logger(__name__)

Sampler = Callable[[Rng, int, int], np.ndarray]
MAX_REDRAWS = 100


def synth_linear_map(
    n: int,
    d: int,
    mapping: np.ndarray,
    noise_std: float = 0.0,
    seed: int = 0,
    split: str = "train",
    rng: Optional[Rng] = None,
) -> Dataset:
    """Samples ``x ~ N(0, I_d)`` with targets ``y = mapping @ x + xi``, ``xi ~ N(0, noise_std^2)``.

    ``mapping`` is (k, d); inputs and targets are stored one sample per row.
    """
    mapping = as_matrix(mapping)
    if mapping.shape[1] != d:
        raise ValueError(f"mapping has {mapping.shape[1]} columns, expected d={d}")
    rng = rng or Rng(seed)
    x = gaussian_matrix(rng, n, d)
    noise = gaussian_matrix(rng, n, mapping.shape[0], 0.0, noise_std)
    return Dataset(inputs=x, targets=x @ mapping.T + noise, split=split)


def synth_regression(
    n: int,
    d_in: int,
    d_out: int,
    noise_std: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Regression against a random linear map with N(0, 1/d_in) entries."""
    rng = Rng(seed)
    mapping = gaussian_matrix(rng, d_out, d_in, 0.0, 1.0 / math.sqrt(d_in))
    return synth_linear_map(n, d_in, mapping, noise_std, rng=rng)


def independent_batch(
    d: int,
    n: int,
    seed: int = 0,
    sampler: Optional[Sampler] = None,
    rng: Optional[Rng] = None,
) -> np.ndarray:
    """``n`` linearly independent Gaussian vectors of dimension ``d``, one per row.

    Draws are repeated until the batch has full rank ``n``. ``sampler`` replaces
    the Gaussian draw (used to exercise the re-draw path).

    Raises:
        ValueError: If ``n > d`` or ``n < 1``
        RuntimeError: If no full-rank draw appears within the re-draw limit
    """
    if n < 1:
        raise ValueError(f"batch size must be positive, got {n}")
    if n > d:
        raise ValueError(f"cannot draw {n} linearly independent vectors in dimension {d}")
    rng = rng or Rng(seed)
    sampler = sampler or (lambda r, rows, cols: gaussian_matrix(r, rows, cols))

    for attempt in range(MAX_REDRAWS):
        batch = as_matrix(sampler(rng, n, d))
        if numerical_rank(batch) == n:
            return batch
        logger.warning(f"independent_batch: draw {attempt} is rank deficient, re-drawing")
    raise RuntimeError(f"no full-rank {n}x{d} batch after {MAX_REDRAWS} draws")
