"""Rank of the middle-layer update in a dimension-increasing linear network."""

from typing import List

import numpy as np

from ..datasets import independent_batch
from ..initializers import idi, partial_hadamard, partial_identity
from ..micro_net import NetworkSpec, ParamSet, TrainConfig, loss_and_gradients, sgd_step, weight_name
from ..tensor_core import Rng, gaussian_matrix, numerical_rank
from ..utils import ExperimentReport, get_logger

logger = get_logger(__name__)

RANK_MODES = ("idinit", "zero_pad", "hadamard")
LAPACK_THRESHOLD = 256


def rank_schedule(steps: int) -> List[int]:
    """Step 0, every step up to 10, then every 10th step."""
    return [s for s in range(steps + 1) if s <= 10 or s % 10 == 0]


def _initial_params(mode: str, d0: int, dh: int, dl: int, loose_eps: float, rng: Rng) -> ParamSet:
    if mode == "idinit":
        first = idi(dh, d0, 1.0, loose_eps, rng)
        last = idi(dl, dh, 1.0, loose_eps, rng)
    elif mode == "zero_pad":
        first, last = partial_identity(dh, d0), partial_identity(dl, dh)
    else:
        first, last = partial_hadamard(dh, d0), partial_hadamard(dl, dh)
    return ParamSet(
        arrays={weight_name(0): first, weight_name(1): np.eye(dh), weight_name(2): last},
        roles={weight_name(0): "dense", weight_name(1): "dense", weight_name(2): "dense"},
    )


def rank_experiment(
    init_mode: str = "idinit",
    d0: int = 8,
    dh: int = 32,
    dl: int = 8,
    steps: int = 100,
    seed: int = 0,
    learning_rate: float = 0.1,
    loose_eps: float = 0.0,
    rel_tol: float = 1e-8,
) -> ExperimentReport:
    """Track rank(theta1 - I) while SGD trains ``x -> theta2 theta1 theta0 x``.

    ``theta1`` is the (dh x dh) identity. ``theta0`` and ``theta2`` are IDI
    (optionally loose), a zero-padded partial identity, or a partial
    normalized Hadamard. Every step uses a fresh batch of ``d0`` linearly
    independent inputs with Gaussian targets.

    Raises:
        ValueError: If ``dh`` does not exceed both ``d0`` and ``dl``
    """
    if init_mode not in RANK_MODES:
        raise ValueError(f"init_mode must be one of {RANK_MODES}, got {init_mode!r}")
    if dh <= d0 or dh <= dl:
        raise ValueError(f"hidden width {dh} must exceed d0={d0} and dl={dl}")

    init_rng, data_rng = Rng(seed).spawn(2)
    net = NetworkSpec.mlp([d0, dh, dh, dl])
    params = _initial_params(init_mode, d0, dh, dl, loose_eps, init_rng)
    config = TrainConfig(learning_rate=learning_rate, momentum=0.0, batch_size=d0, epochs=1)
    svd_method = "lapack" if dh > LAPACK_THRESHOLD else "jacobi"
    identity = np.eye(dh)
    schedule = set(rank_schedule(steps))

    report = ExperimentReport(
        name="rank",
        metadata={
            "init_mode": init_mode,
            "d0": d0,
            "dh": dh,
            "dl": dl,
            "steps": steps,
            "seed": seed,
            "learning_rate": learning_rate,
            "loose_eps": loose_eps,
            "rel_tol": rel_tol,
        },
    )
    report.record("rank", 0, 0)

    for step in range(1, steps + 1):
        x = independent_batch(d0, d0, rng=data_rng)
        y = gaussian_matrix(data_rng, d0, dl)
        loss, grads, _ = loss_and_gradients(net, params, x, y)
        sgd_step(params, grads, config)
        if step in schedule:
            delta = params[weight_name(1)] - identity
            rank = numerical_rank(delta, rel_tol, method=svd_method) if np.any(delta) else 0
            report.record("rank", step, rank)
            report.record("loss", step, loss)

    ranks = report.values("rank")
    report.summary.update(
        {
            "final_rank": int(ranks[-1]),
            "max_rank": int(max(ranks)),
            "d0": d0,
            "exceeds_d0": max(ranks) > d0,
            "reaches_d0": max(ranks) >= d0,
        }
    )
    logger.info(f"rank[{init_mode}] d0={d0} dh={dh} dl={dl}: final rank {ranks[-1]}")
    return report


def loose_rank_comparison(
    d0: int = 8,
    dh: int = 32,
    dl: int = 8,
    steps: int = 100,
    seed: int = 0,
    loose_eps: float = 1e-6,
    learning_rate: float = 0.1,
) -> ExperimentReport:
    """IDInit with exact versus loose identity entries on identical data."""
    exact = rank_experiment("idinit", d0, dh, dl, steps, seed, learning_rate, 0.0)
    loose = rank_experiment("idinit", d0, dh, dl, steps, seed, learning_rate, loose_eps)
    report = ExperimentReport(
        name="rank-loose",
        metadata={"d0": d0, "dh": dh, "dl": dl, "steps": steps, "seed": seed, "loose_eps": loose_eps},
    )
    report.merge(exact, "exact")
    report.merge(loose, "loose")
    return report
