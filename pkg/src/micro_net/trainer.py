"""Deterministic training loop."""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional

import numpy as np
from tqdm import tqdm

from ..tensor_core import Rng
from ..utils import ExperimentReport, get_logger, to_jsonable
from .network import evaluate, loss_and_gradients
from .optimizer import learning_rate_at, sgd_step
from .params import ParamSet
from .spec import NetworkSpec, TrainConfig, TrainMode

logger = get_logger(__name__)

DIVERGENCE_LIMIT = 1e12

Probe = Callable[[ParamSet], float]


def is_diverged(loss: float) -> bool:
    return not math.isfinite(loss) or loss > DIVERGENCE_LIMIT


@dataclass
class TrainResult:
    """Final parameters, the report of the run and requested weight snapshots."""

    params: ParamSet
    report: ExperimentReport
    steps: int = 0
    snapshots: Dict[int, ParamSet] = field(default_factory=dict)

    @property
    def diverged(self) -> bool:
        return self.report.diverged


def train(
    net: NetworkSpec,
    params: ParamSet,
    dataset,
    config: TrainConfig,
    eval_dataset=None,
    probes: Optional[Mapping[str, Probe]] = None,
    name: str = "train",
) -> TrainResult:
    """Train ``params`` in place on ``dataset``.

    Traces (all keyed by epoch, epoch 0 being the initial state):
    ``train_loss``, ``test_loss`` / ``test_accuracy`` when ``eval_dataset`` is
    given, ``train_accuracy`` for labelled data, and one trace per probe.
    With ``config.record_every > 0`` the minibatch loss is also traced as
    ``batch_loss`` keyed by optimizer step.

    The shuffle order depends only on ``config.seed``. A non-finite loss or
    one above 1e12 halts the run and marks the report diverged.
    """
    probes = probes or {}
    report = ExperimentReport(name=name, metadata={"train_config": to_jsonable(config.__dict__)})
    rng = Rng(config.seed)
    targets = dataset.targets_for(config.loss)
    n = dataset.n_samples
    batch_size = config.effective_batch_size(n)
    snapshots: Dict[int, ParamSet] = {}

    def record_epoch(epoch: int) -> bool:
        metrics = evaluate(net, params, dataset, config.loss)
        report.record("train_loss", epoch, metrics["loss"])
        if "accuracy" in metrics:
            report.record("train_accuracy", epoch, metrics["accuracy"])
        if eval_dataset is not None:
            test = evaluate(net, params, eval_dataset, config.loss)
            report.record("test_loss", epoch, test["loss"])
            if "accuracy" in test:
                report.record("test_accuracy", epoch, test["accuracy"])
        for probe_name, probe in probes.items():
            report.record(probe_name, epoch, probe(params))
        if is_diverged(metrics["loss"]):
            report.mark_diverged(step, f"train loss {metrics['loss']!r} at epoch {epoch}")
            return False
        return True

    step = 0
    logger.info(
        f"Training {name}: {n} samples, batch={batch_size}, epochs={config.epochs}, "
        f"lr={config.learning_rate}, momentum={config.momentum}, mode={config.mode.value}"
    )
    healthy = record_epoch(0)

    epochs = range(1, config.epochs + 1)
    bar = tqdm(epochs, desc=name, disable=not config.progress, leave=False)
    for epoch in bar:
        if not healthy:
            break
        lr = learning_rate_at(config, epoch - 1)
        order = rng.permutation(n) if config.mode == TrainMode.SGD else np.arange(n)

        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            loss, grads, _ = loss_and_gradients(
                net, params, dataset.inputs[idx], targets[idx], config.loss
            )
            if is_diverged(loss):
                report.mark_diverged(step, f"batch loss {loss!r}")
                healthy = False
                break
            sgd_step(params, grads, config, lr)
            step += 1
            if config.record_every and step % config.record_every == 0:
                report.record("batch_loss", step, loss)

        if not healthy:
            break
        healthy = record_epoch(epoch)
        if epoch in config.snapshot_epochs:
            snapshots[epoch] = params.copy()
        bar.set_postfix(loss=f"{report.last('train_loss'):.4g}")
        logger.debug(f"{name} epoch {epoch}: train_loss={report.last('train_loss'):.6g}")

    report.summary.update(
        {
            "steps": step,
            "final_train_loss": report.last("train_loss"),
            "initial_train_loss": report.first("train_loss"),
        }
    )
    if "test_loss" in report.traces:
        report.summary["final_test_loss"] = report.last("test_loss")
    if "test_accuracy" in report.traces:
        report.summary["final_test_accuracy"] = report.last("test_accuracy")
    logger.info(f"Finished {name} after {step} steps (diverged={report.diverged})")
    return TrainResult(params=params, report=report, steps=step, snapshots=snapshots)
