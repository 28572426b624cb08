"""Whole-network initialization policies and single-weight dispatch."""

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..micro_net.params import ParamSet, gate_name, kernel_name, stem_name, weight_name
from ..micro_net.spec import (
    Activation,
    Conv2D,
    ConvResidualBlock,
    Dense,
    NetworkSpec,
    ResidualBlock,
)
from ..tensor_core import ConvKernel, Rng
from ..utils import get_logger
from .baselines import baseline, baseline_kernel
from .conv import channel_maintain, idic, idizc
from .identity import idi, idiz
from .spec import DEFAULT_EPSILON, DEFAULT_LOOSE_EPS, InitMethod, InitSpec

logger = get_logger(__name__)

IDINIT = "idinit"
POLICY_METHODS = (IDINIT,) + tuple(
    m.value for m in InitMethod if m.is_baseline
)


def tau_for(activation: Activation, is_first: bool) -> float:
    """sqrt(2) for the first layer of a ReLU network, 1 otherwise."""
    if is_first and Activation(activation) == Activation.RELU:
        return math.sqrt(2.0)
    return 1.0


@dataclass(frozen=True)
class InitPolicy:
    """How to initialize every weight of a network.

    Attributes:
        method: ``"idinit"`` or a baseline method applied uniformly
        first_tau: Override of the first-layer tau (IDInit only)
        epsilon: IDIZ magnitude on stem ends and the final classifier
        loose_eps: Loose-condition noise on IDI entries
        zero_stems: Put exact zeros (instead of IDIZ) on stem ends
        conv_scheme: ``"patch"`` (IDIC) or ``"channel"`` (channel-maintain)
        seed: Seed of the stream shared by all random draws
    """

    method: str = IDINIT
    first_tau: Optional[float] = None
    epsilon: float = DEFAULT_EPSILON
    loose_eps: float = DEFAULT_LOOSE_EPS
    zero_stems: bool = False
    conv_scheme: str = "patch"
    seed: int = 0

    def __post_init__(self):
        if self.method not in POLICY_METHODS:
            raise ValueError(f"unknown init policy {self.method!r}; expected one of {POLICY_METHODS}")
        if self.conv_scheme not in ("patch", "channel"):
            raise ValueError(f"conv_scheme must be 'patch' or 'channel', got {self.conv_scheme!r}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.loose_eps < 0:
            raise ValueError(f"loose_eps must be non-negative, got {self.loose_eps}")

    @property
    def is_idinit(self) -> bool:
        return self.method == IDINIT


class _Builder:
    """Walks a NetworkSpec and fills a ParamSet for one policy."""

    def __init__(self, net: NetworkSpec, policy: InitPolicy):
        self.net = net
        self.policy = policy
        self.rng = Rng(policy.seed)
        self.arrays: Dict[str, np.ndarray] = {}
        self.kernels: Dict[str, ConvKernel] = {}
        self.roles: Dict[str, str] = {}
        self._baseline_spec = (
            None if policy.is_idinit else InitSpec(method=InitMethod(policy.method), seed=policy.seed)
        )

    def _tau(self, is_first: bool) -> float:
        if is_first and self.policy.first_tau is not None:
            return self.policy.first_tau
        return tau_for(self.net.first_activation, is_first)

    def _identity(self, d_out: int, d_in: int, is_first: bool) -> np.ndarray:
        if self._baseline_spec is not None:
            return baseline(self._baseline_spec, d_out, d_in, self.rng)
        return idi(d_out, d_in, self._tau(is_first), self.policy.loose_eps, self.rng)

    def _zero_transition(self, d_out: int, d_in: int) -> np.ndarray:
        if self._baseline_spec is not None:
            return baseline(self._baseline_spec, d_out, d_in, self.rng)
        if self.policy.zero_stems:
            return np.zeros((d_out, d_in))
        return idiz(d_out, d_in, self.policy.epsilon)

    def _identity_kernel(self, k: int, c_in: int, c_out: int, is_first: bool) -> ConvKernel:
        if self._baseline_spec is not None:
            return baseline_kernel(self._baseline_spec, k, c_in, c_out, self.rng)
        tau = self._tau(is_first)
        if self.policy.conv_scheme == "channel":
            return channel_maintain(k, c_in, c_out, tau)
        return idic(k, c_in, c_out, tau, self.policy.loose_eps, self.rng)

    def _zero_kernel(self, k: int, c_in: int, c_out: int) -> ConvKernel:
        if self._baseline_spec is not None:
            return baseline_kernel(self._baseline_spec, k, c_in, c_out, self.rng)
        if self.policy.zero_stems:
            return ConvKernel.zeros(k, k, c_in, c_out)
        return idizc(k, c_in, c_out, self.policy.epsilon)

    def build(self) -> ParamSet:
        last = len(self.net.layers) - 1
        residual = self.net.is_residual
        for i, layer in enumerate(self.net.layers):
            is_first = i == 0
            if isinstance(layer, Dense):
                name = weight_name(i)
                if residual and i == last:
                    self.arrays[name] = self._zero_transition(layer.d_out, layer.d_in)
                else:
                    self.arrays[name] = self._identity(layer.d_out, layer.d_in, is_first)
                self.roles[name] = "dense"
            elif isinstance(layer, ResidualBlock):
                for j in range(layer.stem_depth):
                    name = stem_name(i, j)
                    if j == layer.stem_depth - 1:
                        self.arrays[name] = self._zero_transition(layer.width, layer.width)
                        self.roles[name] = "stem_last"
                    else:
                        self.arrays[name] = self._identity(layer.width, layer.width, is_first and j == 0)
                        self.roles[name] = "stem"
                if layer.gate is not None:
                    self.arrays[gate_name(i)] = np.array(float(layer.gate))
                    self.roles[gate_name(i)] = "gate"
            elif isinstance(layer, Conv2D):
                self.kernels[kernel_name(i)] = self._identity_kernel(
                    layer.k, layer.c_in, layer.c_out, is_first
                )
                self.roles[kernel_name(i)] = "conv"
            elif isinstance(layer, ConvResidualBlock):
                c = layer.channels
                for j in range(layer.stem_depth):
                    name = stem_name(i, j)
                    if j == layer.stem_depth - 1:
                        self.kernels[name] = self._zero_kernel(layer.k, c, c)
                    else:
                        self.kernels[name] = self._identity_kernel(layer.k, c, c, is_first and j == 0)
                    self.roles[name] = "conv_stem"
        return ParamSet(arrays=self.arrays, kernels=self.kernels, roles=self.roles)


def init_network(net: NetworkSpec, policy: Optional[InitPolicy] = None) -> ParamSet:
    """Initialize every weight of ``net``.

    Under IDInit, identity-transition weights get IDI (IDIC for convolutions)
    and, in residual networks, the last weight of every stem plus the final
    dense classifier get IDIZ (IDIZC). Baseline policies apply their method
    to every weight; gates keep the value declared on the block.
    """
    policy = policy or InitPolicy()
    params = _Builder(net, policy).build()
    logger.info(
        f"Initialized {len(net.layers)}-layer network with policy={policy.method} "
        f"(residual={net.is_residual}, seed={policy.seed})"
    )
    return params


def construct(spec: InitSpec, d_out: int, d_in: int, rng: Optional[Rng] = None) -> np.ndarray:
    """Build one weight matrix for any matrix method."""
    rng = rng or Rng(spec.seed)
    if spec.method == InitMethod.IDI:
        return idi(d_out, d_in, spec.tau, spec.loose_eps, rng)
    if spec.method == InitMethod.IDIZ:
        return idiz(d_out, d_in, spec.epsilon)
    if spec.method.is_kernel:
        raise ValueError(f"{spec.method.value} builds a kernel; use construct_kernel")
    return baseline(spec, d_out, d_in, rng)


def construct_kernel(
    spec: InitSpec, k: int, c_in: int, c_out: int, rng: Optional[Rng] = None
) -> ConvKernel:
    """Build one convolution kernel; baselines act on the kernel's matrix view."""
    rng = rng or Rng(spec.seed)
    if spec.method == InitMethod.IDIC:
        return idic(k, c_in, c_out, spec.tau, spec.loose_eps, rng)
    if spec.method == InitMethod.IDIZC:
        return idizc(k, c_in, c_out, spec.epsilon)
    if spec.method == InitMethod.CHANNEL_MAINTAIN:
        return channel_maintain(k, c_in, c_out, spec.tau)
    if spec.method in (InitMethod.IDI, InitMethod.IDIZ):
        raise ValueError(f"{spec.method.value} builds a matrix; use construct")
    return baseline_kernel(spec, k, c_in, c_out, rng)
