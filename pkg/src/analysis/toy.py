"""Scalar toy model ``x_L = (r + w1 w2)^L x_0`` trained by gradient descent."""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..utils import ExperimentReport, get_logger

logger = get_logger(__name__)

DEFAULT_INPUTS = tuple(round(1.0 + 0.1 * i, 1) for i in range(9))
POOR_POINT = (-1.0, 1.0)


@dataclass(frozen=True)
class ToyConfig:
    """Residual switch r, depth, learning rate, start point, inputs and target scale."""

    r: int = 1
    depth: int = 5
    lr: float = 1e-5
    w1: float = 1.0
    w2: float = 0.0
    inputs: Tuple[float, ...] = DEFAULT_INPUTS
    target_scale: float = 50.0
    steps: int = 5000

    def __post_init__(self):
        if self.r not in (0, 1):
            raise ValueError(f"r must be 0 or 1, got {self.r}")
        if self.depth < 1:
            raise ValueError(f"depth must be at least 1, got {self.depth}")
        if self.lr < 0:
            raise ValueError(f"lr must be non-negative, got {self.lr}")
        if not self.inputs:
            raise ValueError("the training set needs at least one input")
        object.__setattr__(self, "inputs", tuple(float(x) for x in self.inputs))

    @classmethod
    def default_start(cls, r: int, **kwargs) -> "ToyConfig":
        """Identity-transition start: (1, 0) with the residual, (1, 1) without."""
        return cls(r=r, w1=1.0, w2=0.0 if r == 1 else 1.0, **kwargs)


def fixed_point(r: int, depth: int, target_scale: float) -> float:
    """Product w1 * w2 solving ``(r + w1 w2)^L = target_scale``."""
    return target_scale ** (1.0 / depth) - r


def toy_loss(cfg: ToyConfig, w1: float, w2: float) -> float:
    x = np.asarray(cfg.inputs)
    c = cfg.r + w1 * w2
    return 0.5 * float(np.mean((c ** cfg.depth * x - cfg.target_scale * x) ** 2))


def toy_dynamics(cfg: ToyConfig) -> ExperimentReport:
    """Gradient descent on ``1/2 mean (x_L - s x_0)^2`` over (w1, w2).

    Traces ``w1``, ``w2``, ``product`` and ``loss`` per step; a non-finite or
    exploding state halts the run and marks it diverged.
    """
    x = np.asarray(cfg.inputs)
    mean_sq = float(np.mean(x * x))
    w1, w2 = cfg.w1, cfg.w2
    L, s = cfg.depth, cfg.target_scale

    report = ExperimentReport(
        name="toy",
        metadata={
            "r": cfg.r,
            "depth": L,
            "lr": cfg.lr,
            "w1_0": cfg.w1,
            "w2_0": cfg.w2,
            "inputs": list(cfg.inputs),
            "target_scale": s,
            "steps": cfg.steps,
        },
    )
    min_dist = math.inf

    for step in range(cfg.steps + 1):
        c = cfg.r + w1 * w2
        loss = 0.5 * (c ** L - s) ** 2 * mean_sq
        report.record_many(step, {"w1": w1, "w2": w2, "product": w1 * w2, "loss": loss})
        min_dist = min(min_dist, math.hypot(w1 - POOR_POINT[0], w2 - POOR_POINT[1]))
        if not math.isfinite(loss) or abs(c) > 1e6:
            report.mark_diverged(step, f"state w1={w1!r}, w2={w2!r}")
            break
        if step == cfg.steps:
            break
        # dL/dc = L c^(L-1) (c^L - s) mean(x^2)
        dc = L * c ** (L - 1) * (c ** L - s) * mean_sq
        w1, w2 = w1 - cfg.lr * dc * w2, w2 - cfg.lr * dc * w1

    product = report.last("product")
    target = fixed_point(cfg.r, L, s)
    report.summary.update(
        {
            "final_w1": report.last("w1"),
            "final_w2": report.last("w2"),
            "final_product": product,
            "fixed_point": target,
            "error": abs(product - target),
            "min_distance_to_poor_point": min_dist,
        }
    )
    logger.info(f"toy r={cfg.r} L={L}: w1*w2 -> {product:.6f} (fixed point {target:.6f})")
    return report
