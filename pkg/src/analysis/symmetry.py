"""Symmetry breaking in a deep linear network started at the identity."""

from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from ..datasets import synth_linear_map
from ..initializers import InitPolicy, init_network
from ..micro_net import (
    NetworkSpec,
    ParamSet,
    TrainConfig,
    TrainMode,
    save_weights,
    train,
    weight_name,
)
from ..tensor_core import Rng
from ..utils import ExperimentReport, ShapeError, get_logger

logger = get_logger(__name__)

SYMMETRY_MODES = ("gd", "gd_momentum", "sgd", "sgd_momentum")


def layer_distance(layers: Union[ParamSet, Sequence[np.ndarray]]) -> float:
    """Mean over layer pairs of the elementwise mean absolute difference.

    A ParamSet contributes its dense ``layer{i}.weight`` arrays in layer order.
    """
    if isinstance(layers, ParamSet):
        names = sorted(
            (n for n in layers.names() if n.endswith(".weight")),
            key=lambda n: int(n.split(".")[0][len("layer"):]),
        )
        layers = [layers[n] for n in names]
    weights = [np.asarray(w, dtype=np.float64) for w in layers]
    if len(weights) < 2:
        raise ValueError(f"layer distance needs at least two layers, got {len(weights)}")
    shape = weights[0].shape
    for i, w in enumerate(weights):
        if w.shape != shape:
            raise ShapeError(f"layer {i} has shape {w.shape}, expected {shape}")
    return float(np.mean([np.mean(np.abs(a - b)) for a, b in combinations(weights, 2)]))


def symmetry_experiment(
    mode: str = "sgd_momentum",
    seed: int = 0,
    dim: int = 10,
    depth: int = 4,
    n_train: int = 2000,
    n_test: int = 2000,
    noise_std: float = 1e-2,
    epochs: int = 200,
    learning_rate: float = 2.5e-4,
    momentum: float = 0.9,
    batch_size: int = 4,
    snapshot_epochs: Sequence[int] = (),
    weights_dir: Optional[str] = None,
    progress: bool = False,
) -> ExperimentReport:
    """Fit ``Y = -X + noise`` with ``depth`` square layers all initialized to I.

    GD modes use the full batch, SGD modes minibatches of ``batch_size``; the
    momentum modes use heavy-ball momentum. Layer distance and test loss are
    traced per epoch. With ``weights_dir`` the final weights and the
    ``snapshot_epochs`` snapshots are written there.
    """
    if mode not in SYMMETRY_MODES:
        raise ValueError(f"mode must be one of {SYMMETRY_MODES}, got {mode!r}")

    data_rng, test_rng = Rng(seed).spawn(2)
    target_map = -np.eye(dim)
    train_set = synth_linear_map(n_train, dim, target_map, noise_std, rng=data_rng)
    test_set = synth_linear_map(n_test, dim, target_map, noise_std, split="test", rng=test_rng)

    net = NetworkSpec.mlp([dim] * (depth + 1))
    params = init_network(net, InitPolicy(loose_eps=0.0, seed=seed))

    config = TrainConfig(
        learning_rate=learning_rate,
        momentum=momentum if mode.endswith("momentum") else 0.0,
        batch_size=batch_size,
        epochs=epochs,
        mode=TrainMode.GD if mode.startswith("gd") else TrainMode.SGD,
        seed=seed,
        snapshot_epochs=tuple(snapshot_epochs),
        progress=progress,
    )
    result = train(
        net,
        params,
        train_set,
        config,
        eval_dataset=test_set,
        probes={"layer_distance": layer_distance},
        name=f"symmetry-{mode}",
    )
    if weights_dir is not None:
        save_weights(result.params, result.snapshots, weights_dir)

    report = result.report
    report.name = "symmetry"
    report.metadata.update(
        {
            "mode": mode,
            "seed": seed,
            "dim": dim,
            "depth": depth,
            "n_train": n_train,
            "n_test": n_test,
            "noise_std": noise_std,
        }
    )
    initial, final = report.first("test_loss"), report.last("test_loss")
    report.summary.update(
        {
            "final_layer_distance": report.last("layer_distance"),
            "initial_test_loss": initial,
            "test_loss_ratio": final / initial if initial else float("nan"),
            "product_to_target": float(
                np.max(np.abs(_product(params, depth) - target_map))
            ),
        }
    )
    logger.info(
        f"symmetry[{mode}] seed={seed}: distance={report.summary['final_layer_distance']:.4g}, "
        f"test loss ratio={report.summary['test_loss_ratio']:.4g}"
    )
    return report


def _product(params: ParamSet, depth: int) -> np.ndarray:
    product = params[weight_name(0)]
    for i in range(1, depth):
        product = params[weight_name(i)] @ product
    return product
