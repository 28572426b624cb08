"""Losses returning (value, gradient w.r.t. the network output)."""

from typing import Tuple

import numpy as np

from ..utils import ShapeError
from .spec import LossKind


def mse(output: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """Half squared error summed over outputs, averaged over the batch.

    A single pair therefore has gradient ``(y_hat - y) x^T`` on a linear layer.
    """
    if output.shape != targets.shape:
        raise ShapeError(f"output shape {output.shape} does not match targets {targets.shape}")
    n = output.shape[0]
    diff = output - targets
    return 0.5 * float(np.sum(diff * diff)) / n, diff / n


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Softmax cross-entropy averaged over the batch; ``labels`` are class indices."""
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    n = logits.shape[0]
    if labels.shape[0] != n:
        raise ShapeError(f"{labels.shape[0]} labels for a batch of {n}")
    probs = softmax(logits)
    rows = np.arange(n)
    picked = np.clip(probs[rows, labels], np.finfo(np.float64).tiny, None)
    loss = -float(np.mean(np.log(picked)))
    grad = probs.copy()
    grad[rows, labels] -= 1.0
    return loss, grad / n


def loss_and_grad(kind: LossKind, output: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    if LossKind(kind) == LossKind.CROSS_ENTROPY:
        return cross_entropy(output, targets)
    return mse(output, targets)
