"""Dead-neuron accounting for a stem whose last weight sits behind a zero gate."""

from typing import Iterator

import numpy as np

from ..datasets import synth_regression
from ..initializers import idi, idiz
from ..micro_net import (
    Activation,
    Dense,
    NetworkSpec,
    ParamSet,
    ResidualBlock,
    TrainConfig,
    gate_name,
    loss_and_gradients,
    sgd_step,
    stem_name,
    weight_name,
)
from ..tensor_core import Rng
from ..utils import ExperimentReport, get_logger

logger = get_logger(__name__)

DEAD_VARIANTS = ("zero", "idiz")
UPDATE_FLOOR = 1e-15


def _batches(rng: Rng, n: int, batch: int) -> Iterator[np.ndarray]:
    while True:
        order = rng.permutation(n)
        for start in range(0, n - batch + 1, batch):
            yield order[start:start + batch]


def dead_neuron_experiment(
    variant: str = "idiz",
    steps: int = 100,
    seed: int = 0,
    width: int = 16,
    d_out: int = 4,
    n_samples: int = 512,
    learning_rate: float = 0.1,
    momentum: float = 0.9,
    batch_size: int = 32,
    epsilon: float = 1e-6,
) -> ExperimentReport:
    """Fraction of the stem's last weight that never moves during training.

    The network is one ReLU residual block ``x + g * W1 relu(W0 x)`` with the
    gate ``g`` starting at 0, followed by an IDI readout. ``W1`` is all zeros
    (``variant="zero"``) or IDIZ_epsilon (``"idiz"``). An entry is dead when
    its cumulative absolute update stays below 1e-15.
    """
    if variant not in DEAD_VARIANTS:
        raise ValueError(f"variant must be one of {DEAD_VARIANTS}, got {variant!r}")
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")

    net = NetworkSpec((ResidualBlock(width, 2, Activation.RELU, gate=0.0), Dense(width, d_out)))
    last = stem_name(0, 1)
    params = ParamSet(
        arrays={
            stem_name(0, 0): idi(width, width),
            last: np.zeros((width, width)) if variant == "zero" else idiz(width, width, epsilon),
            gate_name(0): np.array(0.0),
            weight_name(1): idi(d_out, width),
        },
        roles={
            stem_name(0, 0): "stem",
            last: "stem_last",
            gate_name(0): "gate",
            weight_name(1): "dense",
        },
    )
    data_rng, batch_rng = Rng(seed).spawn(2)
    data = synth_regression(n_samples, width, d_out, noise_std=0.0, seed=int(data_rng.seed))
    config = TrainConfig(learning_rate=learning_rate, momentum=momentum, batch_size=batch_size)

    moved = np.zeros((width, width))
    report = ExperimentReport(
        name="deadneuron",
        metadata={
            "variant": variant,
            "steps": steps,
            "seed": seed,
            "width": width,
            "learning_rate": learning_rate,
            "momentum": momentum,
            "batch_size": batch_size,
            "epsilon": epsilon,
        },
    )
    report.record("dead_fraction", 0, 1.0)

    batches = _batches(batch_rng, n_samples, batch_size)
    for step in range(1, steps + 1):
        idx = next(batches)
        loss, grads, _ = loss_and_gradients(net, params, data.inputs[idx], data.targets[idx])
        before = params[last]
        sgd_step(params, grads, config)
        moved += np.abs(params[last] - before)
        report.record("dead_fraction", step, float(np.mean(moved < UPDATE_FLOOR)))
        report.record("loss", step, loss)

    fraction = report.last("dead_fraction")
    report.summary.update({"dead_fraction": fraction, "final_gate": float(params[gate_name(0)])})
    logger.info(f"deadneuron[{variant}] after {steps} steps: dead fraction {fraction:.4f}")
    return report
