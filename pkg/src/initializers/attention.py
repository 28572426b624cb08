"""Attention projections: IDI on Q/K/V, IDIZ on the output projection."""

from typing import NamedTuple, Optional

import numpy as np

from ..tensor_core import Rng
from .identity import idi, idiz
from .spec import DEFAULT_EPSILON, DEFAULT_LOOSE_EPS


class AttentionWeights(NamedTuple):
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray


def init_attention(
    d_model: int,
    tau: float = 1.0,
    epsilon: float = DEFAULT_EPSILON,
    loose_eps: float = DEFAULT_LOOSE_EPS,
    rng: Optional[Rng] = None,
) -> AttentionWeights:
    """Initialize the four projections of a single attention block.

    Q, K and V share the IDI_tau pattern but get independent loose draws;
    W_O is IDIZ_epsilon so the block starts as a near-identity ``x + Att(x)``.
    """
    if d_model < 1:
        raise ValueError(f"d_model must be positive, got {d_model}")
    rng = rng or Rng(0)
    w_q, w_k, w_v = (idi(d_model, d_model, tau, loose_eps, rng) for _ in range(3))
    return AttentionWeights(w_q, w_k, w_v, idiz(d_model, d_model, epsilon))
