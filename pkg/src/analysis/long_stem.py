"""Output-scale stability of a residual block with a very deep stem."""

import math
from typing import Optional, Sequence

import numpy as np

from ..datasets import synth_regression
from ..initializers import InitPolicy, init_network
from ..micro_net import (
    Activation,
    Dense,
    NetworkSpec,
    ParamSet,
    ResidualBlock,
    TrainConfig,
    predict,
    save_weights,
    train,
)
from ..tensor_core import Rng
from ..utils import ExperimentReport, get_logger

logger = get_logger(__name__)

EXPLOSION_FACTOR = 1e3


def long_stem_probe(
    stem_depth: int = 32,
    init: str = "idinit",
    epochs: int = 35,
    seed: int = 0,
    width: int = 16,
    n_samples: int = 512,
    learning_rate: float = 1e-3,
    momentum: float = 0.9,
    batch_size: int = 32,
    activation: Activation = Activation.IDENTITY,
    snapshot_epochs: Sequence[int] = (),
    weights_dir: Optional[str] = None,
) -> ExperimentReport:
    """Train ``x + stem(x)`` (``stem_depth`` dense layers) plus a readout.

    The output std on a fixed probe batch is traced per epoch. The run is
    flagged as exploded when that std exceeds 1e3 times the input std or
    becomes non-finite. Baseline policies keep their own scaling inside the
    stem even when it has no matching activation.
    """
    if stem_depth < 1:
        raise ValueError(f"stem_depth must be positive, got {stem_depth}")

    net = NetworkSpec(
        (ResidualBlock(width, stem_depth, Activation(activation)), Dense(width, width))
    )
    params = init_network(net, InitPolicy(method=init, seed=seed))
    data_rng, probe_rng = Rng(seed).spawn(2)
    data = synth_regression(n_samples, width, width, noise_std=0.0, seed=int(data_rng.seed))
    probe_x = probe_rng.normal(0.0, 1.0, (256, width))
    input_std = float(np.std(probe_x))

    def output_std(p: ParamSet) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            return float(np.std(predict(net, p, probe_x)))

    config = TrainConfig(
        learning_rate=learning_rate,
        momentum=momentum,
        batch_size=batch_size,
        epochs=epochs,
        seed=seed,
        snapshot_epochs=tuple(snapshot_epochs),
    )
    with np.errstate(over="ignore", invalid="ignore"):
        result = train(
            net, params, data, config, probes={"output_std": output_std}, name=f"longstem-{init}"
        )
    if weights_dir is not None:
        save_weights(result.params, result.snapshots, weights_dir)

    report = result.report
    report.name = "longstem"
    report.metadata.update(
        {
            "stem_depth": stem_depth,
            "init": init,
            "width": width,
            "seed": seed,
            "activation": Activation(activation).value,
        }
    )
    stds = report.values("output_std")
    limit = EXPLOSION_FACTOR * input_std
    exploded = result.diverged or any(not math.isfinite(s) or s > limit for s in stds)
    report.summary.update(
        {
            "input_std": input_std,
            "initial_output_std": stds[0],
            "final_output_std": stds[-1],
            "max_output_std": max((s for s in stds if math.isfinite(s)), default=float("nan")),
            "exploded": exploded,
        }
    )
    logger.info(f"longstem[{init}] depth={stem_depth}: exploded={exploded}")
    return report
