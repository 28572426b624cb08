"""SGD with heavy-ball momentum and coupled weight decay."""

import math
from typing import Dict, Optional

import numpy as np

from .params import ParamSet
from .spec import LRSchedule, TrainConfig


def learning_rate_at(config: TrainConfig, epoch: int) -> float:
    """Learning rate for the zero-based ``epoch``.

    The cosine schedule is ``lr / 2 * (1 + cos(pi * epoch / epochs))``.
    """
    if config.lr_schedule == LRSchedule.COSINE and config.epochs > 0:
        return 0.5 * config.learning_rate * (1.0 + math.cos(math.pi * epoch / config.epochs))
    return config.learning_rate


def sgd_step(
    params: ParamSet,
    grads: Dict[str, np.ndarray],
    config: TrainConfig,
    learning_rate: Optional[float] = None,
) -> ParamSet:
    """``m <- momentum * m + lr * (g + weight_decay * theta)``; ``theta <- theta - m``.

    Parameters without a gradient are left untouched. Arrays are replaced,
    not mutated, so earlier snapshots stay valid.
    """
    lr = config.learning_rate if learning_rate is None else learning_rate
    for name, grad in grads.items():
        theta = params.arrays[name]
        if config.weight_decay:
            grad = grad + config.weight_decay * theta
        m = config.momentum * params.momentum[name] + lr * grad
        params.momentum[name] = m
        params.arrays[name] = theta - m
    return params
