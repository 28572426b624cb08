"""Dynamical isometry of deep residual MLPs at initialization."""

import numpy as np

from ..initializers import InitPolicy, init_network
from ..micro_net import Activation, NetworkSpec, chi, io_jacobian, log_singular_values
from ..tensor_core import Rng, is_finite
from ..utils import ExperimentReport, get_logger

logger = get_logger(__name__)


def isometry_experiment(
    init: str = "idinit",
    blocks: int = 64,
    width: int = 16,
    activation: Activation = Activation.RELU,
    seed: int = 0,
    method: str = "auto",
    loose_eps: float = 1e-6,
) -> ExperimentReport:
    """chi and the log singular values of the input-output Jacobian at one input.

    The trace ``log_singular_value`` is indexed by singular value rank.
    """
    net = NetworkSpec.residual_mlp(width, blocks, Activation(activation))
    params = init_network(net, InitPolicy(method=init, loose_eps=loose_eps, seed=seed))
    x = Rng(seed).spawn(1)[0].normal(0.0, 1.0, width)

    with np.errstate(over="ignore", invalid="ignore"):
        jac = io_jacobian(net, params, x, method=method)

    report = ExperimentReport(
        name="isometry",
        metadata={
            "init": init,
            "blocks": blocks,
            "width": width,
            "activation": Activation(activation).value,
            "seed": seed,
            "method": method,
        },
    )
    if not is_finite(jac):
        report.mark_diverged(0, "non-finite Jacobian")
        report.summary["chi"] = float("inf")
        return report

    logs = log_singular_values(jac)
    for i, value in enumerate(logs):
        report.record("log_singular_value", i, value)
    value = chi(jac)
    report.summary.update(
        {
            "chi": value,
            "chi_deviation": abs(value - 1.0),
            "max_log_singular_value": float(logs.max()),
            "min_log_singular_value": float(logs.min()),
        }
    )
    logger.info(f"isometry[{init}] {blocks} blocks: chi={value:.6g}")
    return report
