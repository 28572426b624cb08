"""Identity-preserving initializers and comparison baselines."""

from .attention import AttentionWeights, init_attention
from .baselines import (
    baseline,
    baseline_kernel,
    kaiming_normal,
    normalized_hadamard,
    orthogonal,
    partial_hadamard,
    partial_identity,
    xavier_uniform,
)
from .conv import channel_maintain, idic, idizc
from .identity import idi, idiz
from .network import IDINIT, InitPolicy, construct, construct_kernel, init_network, tau_for
from .spec import DEFAULT_EPSILON, DEFAULT_LOOSE_EPS, DEFAULT_TAU, InitMethod, InitSpec

__all__ = [
    "AttentionWeights",
    "DEFAULT_EPSILON",
    "DEFAULT_LOOSE_EPS",
    "DEFAULT_TAU",
    "IDINIT",
    "InitMethod",
    "InitPolicy",
    "InitSpec",
    "baseline",
    "baseline_kernel",
    "channel_maintain",
    "construct",
    "construct_kernel",
    "idi",
    "idic",
    "idiz",
    "idizc",
    "init_attention",
    "init_network",
    "kaiming_normal",
    "normalized_hadamard",
    "orthogonal",
    "partial_hadamard",
    "partial_identity",
    "tau_for",
    "xavier_uniform",
]
