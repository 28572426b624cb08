"""Forward variance propagation through plain and residual networks."""

from typing import List, Tuple

import numpy as np

from ..initializers import InitPolicy, init_network
from ..micro_net import (
    Activation,
    Conv2D,
    ConvResidualBlock,
    NetworkSpec,
    ResidualBlock,
    forward,
)
from ..micro_net.spec import Layer
from ..tensor_core import Rng, is_finite
from ..utils import ExperimentReport, get_logger

logger = get_logger(__name__)

NET_KINDS = ("fc", "resfc", "conv", "resconv")
FC_WIDTHS = (96, 200, 400, 600, 800, 1000, 1000, 800, 600, 400, 200)
DEFAULT_INIT = {"fc": "xavier", "resfc": "xavier", "conv": "kaiming", "resconv": "kaiming"}


def build_probe_net(kind: str, blocks: int = 10, width: int = 96, channels: int = 16) -> NetworkSpec:
    """The four probe architectures.

    fc: ten dense layers through ``FC_WIDTHS``; resfc: ``blocks`` residual
    blocks of ``width``; conv: nine 3x3 ReLU convolutions (3 -> channels, then
    channels -> channels); resconv: a 3 -> channels convolution followed by
    ``blocks`` residual blocks of two 3x3 convolutions with ReLU in the stem.
    Dense probes use no activation.
    """
    if kind == "fc":
        return NetworkSpec.mlp(FC_WIDTHS)
    if kind == "resfc":
        return NetworkSpec.residual_mlp(width, blocks)
    layers: List[Layer]
    if kind == "conv":
        layers = [Conv2D(3, 3, channels, Activation.RELU)]
        layers += [Conv2D(3, channels, channels, Activation.RELU) for _ in range(8)]
        return NetworkSpec(tuple(layers))
    if kind == "resconv":
        layers = [Conv2D(3, 3, channels)]
        layers += [ConvResidualBlock(channels, 3, 2, Activation.RELU) for _ in range(blocks)]
        return NetworkSpec(tuple(layers))
    raise ValueError(f"net_kind must be one of {NET_KINDS}, got {kind!r}")


def _draw_inputs(
    kind: str, rng: Rng, batch: int, image_size: int, noise_std: float, d_in: int
) -> np.ndarray:
    if kind in ("fc", "resfc"):
        shape: Tuple[int, ...] = (batch, d_in)
    else:
        shape = (batch, 3, image_size, image_size)
    x = rng.normal(0.0, 1.0, shape)
    if noise_std > 0:
        x = x + rng.normal(0.0, noise_std, shape)
    return x


def variance_probe(
    net_kind: str = "resfc",
    init: str = "idinit",
    noise_std: float = 0.0,
    n_rounds: int = 500,
    seed: int = 0,
    batch: int = 32,
    blocks: int = 10,
    image_size: int = 16,
    loose_eps: float = 1e-6,
) -> ExperimentReport:
    """Per-layer activation std and mean, averaged over ``n_rounds`` input draws.

    ``init`` is ``"idinit"``, ``"default"`` (Xavier for dense kinds, Kaiming for
    convolutional kinds) or any baseline policy name. Inputs are standard
    Gaussian batches with additive N(0, noise_std^2) noise. Trace steps are
    layer indices, 0 being the input.
    """
    if net_kind not in NET_KINDS:
        raise ValueError(f"net_kind must be one of {NET_KINDS}, got {net_kind!r}")
    if n_rounds < 1:
        raise ValueError(f"n_rounds must be positive, got {n_rounds}")

    method = DEFAULT_INIT[net_kind] if init == "default" else init
    net = build_probe_net(net_kind, blocks)
    params = init_network(net, InitPolicy(method=method, loose_eps=loose_eps, seed=seed))
    rng = Rng(seed).spawn(1)[0]

    n_layers = len(net.layers) + 1
    stds = np.zeros(n_layers)
    means = np.zeros(n_layers)
    for _ in range(n_rounds):
        x = _draw_inputs(net_kind, rng, batch, image_size, noise_std, net.input_dim)
        trace = forward(net, params, x)
        stds += [float(np.std(a)) for a in trace.activations]
        means += [float(np.mean(a)) for a in trace.activations]
    stds /= n_rounds
    means /= n_rounds

    report = ExperimentReport(
        name="variance",
        metadata={
            "net_kind": net_kind,
            "init": method,
            "noise_std": noise_std,
            "n_rounds": n_rounds,
            "seed": seed,
            "batch": batch,
            "blocks": blocks,
            "image_size": image_size,
        },
    )
    for layer in range(n_layers):
        report.record("std", layer, stds[layer])
        report.record("mean", layer, means[layer])

    ratio = stds[-1] / stds[0]
    report.summary.update(
        {
            "input_std": stds[0],
            "output_std": stds[-1],
            "output_ratio": ratio,
            "max_std": float(stds.max()),
        }
    )
    if not is_finite(stds):
        report.mark_diverged(0, "non-finite activation std")
    logger.info(f"variance[{net_kind}/{method}] noise={noise_std}: output/input std = {ratio:.4g}")
    return report
