"""Identity-like matrices: IDI (identity transition) and IDIZ (zero transition)."""

from typing import Optional

import numpy as np

from ..tensor_core import Rng
from ..utils import get_logger

logger = get_logger(__name__)


def _check_dims(d_out: int, d_in: int) -> None:
    if d_out < 1 or d_in < 1:
        raise ValueError(f"dimensions must be positive, got d_out={d_out}, d_in={d_in}")


def idi(
    d_out: int,
    d_in: int,
    tau: float = 1.0,
    loose_eps: float = 0.0,
    rng: Optional[Rng] = None,
) -> np.ndarray:
    """IDI_tau: tau wherever m = j (mod d_in), zero elsewhere.

    Every row holds exactly one tau at column ``m % d_in``, so a tall matrix
    stacks copies of the identity and a wide one is a partial identity. With
    ``loose_eps > 0`` each tau entry is drawn from N(tau, loose_eps**2); the
    structural zeros stay exact.

    Args:
        d_out: Output dimension (rows)
        d_in: Input dimension (columns)
        tau: Identity scale
        loose_eps: Std of the loose-condition noise
        rng: Stream for the loose noise; required when loose_eps > 0

    Returns:
        (d_out, d_in) matrix
    """
    _check_dims(d_out, d_in)
    if loose_eps < 0:
        raise ValueError(f"loose_eps must be non-negative, got {loose_eps}")

    rows = np.arange(d_out)
    if loose_eps > 0:
        if rng is None:
            raise ValueError("the loose condition needs an Rng")
        values = rng.normal(tau, loose_eps, d_out)
    else:
        values = np.full(d_out, float(tau))

    weight = np.zeros((d_out, d_in))
    weight[rows, rows % d_in] = values
    return weight


def idiz(d_out: int, d_in: int, epsilon: float = 1e-6) -> np.ndarray:
    """IDIZ_epsilon: +epsilon / -epsilon pairs so every row sums to zero.

    Starts from IDI_epsilon. For ``d_out < d_in`` the trailing
    ``d_in - d_out`` columns are overwritten with an IDI_{-epsilon} block;
    otherwise -epsilon goes to the wrapped adjacent column
    ``(m % d_in + 1) % d_in``. With ``d_in == 1`` both entries of a row land
    on the single column and cancel.
    """
    _check_dims(d_out, d_in)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")

    weight = idi(d_out, d_in, epsilon)
    if d_out < d_in:
        weight[:, d_out:] = idi(d_out, d_in - d_out, -epsilon)
    else:
        rows = np.arange(d_out)
        weight[rows, (rows % d_in + 1) % d_in] -= epsilon
    return weight
