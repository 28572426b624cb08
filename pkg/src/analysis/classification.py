"""Linear-5 classification on MNIST."""

from typing import Optional, Sequence

from ..datasets import load_mnist
from ..initializers import InitPolicy, init_network
from ..micro_net import (
    Activation,
    LossKind,
    LRSchedule,
    NetworkSpec,
    TrainConfig,
    TrainMode,
    save_weights,
    train,
)
from ..utils import ExperimentReport, get_logger

logger = get_logger(__name__)

NETS = {"linear5relu": Activation.RELU, "linear5tanh": Activation.TANH}
LINEAR5_WIDTHS = (784, 512, 512, 512, 512, 10)


def linear5(activation: Activation) -> NetworkSpec:
    """Five bias-free dense layers 784 -> 512 x 4 -> 10."""
    return NetworkSpec.mlp(LINEAR5_WIDTHS, activation)


def mnist_experiment(
    net: str = "linear5relu",
    init: str = "idinit",
    epochs: int = 30,
    batch_size: int = 128,
    learning_rate: float = 0.1,
    momentum: float = 0.9,
    weight_decay: float = 5e-4,
    train_limit: Optional[int] = 10000,
    test_limit: Optional[int] = None,
    data_dir: Optional[str] = None,
    seed: int = 0,
    snapshot_epochs: Sequence[int] = (),
    weights_dir: Optional[str] = None,
    progress: bool = False,
) -> ExperimentReport:
    """Train Linear-5 with SGD, momentum, coupled weight decay and a cosine schedule.

    Raises:
        FileNotFoundError: If the MNIST files are missing
    """
    if net not in NETS:
        raise ValueError(f"net must be one of {tuple(NETS)}, got {net!r}")

    train_set, test_set = load_mnist(data_dir, train_limit, test_limit)
    spec = linear5(NETS[net])
    params = init_network(spec, InitPolicy(method=init, seed=seed))
    config = TrainConfig(
        learning_rate=learning_rate,
        momentum=momentum,
        weight_decay=weight_decay,
        batch_size=batch_size,
        epochs=epochs,
        loss=LossKind.CROSS_ENTROPY,
        mode=TrainMode.SGD,
        lr_schedule=LRSchedule.COSINE,
        seed=seed,
        snapshot_epochs=tuple(snapshot_epochs),
        progress=progress,
    )
    result = train(spec, params, train_set, config, eval_dataset=test_set, name=f"mnist-{net}-{init}")
    if weights_dir is not None:
        save_weights(result.params, result.snapshots, weights_dir)

    report = result.report
    report.name = "mnist"
    report.metadata.update(
        {
            "net": net,
            "init": init,
            "seed": seed,
            "n_train": train_set.n_samples,
            "n_test": test_set.n_samples,
            "pixel_mean": train_set.normalization.mean,
        }
    )
    accuracy = report.summary.get("final_test_accuracy", float("nan"))
    logger.info(f"mnist[{net}/{init}]: test accuracy {accuracy:.4f}")
    return report
