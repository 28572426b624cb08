"""Elementwise activations and their derivatives."""

import numpy as np

from .spec import Activation


def activate(activation: Activation, z: np.ndarray) -> np.ndarray:
    if activation == Activation.IDENTITY:
        return z
    if activation == Activation.TANH:
        return np.tanh(z)
    if activation == Activation.RELU:
        return np.maximum(z, 0.0)
    raise ValueError(f"unknown activation {activation!r}")


def derivative(activation: Activation, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """d a / d z given the pre-activation ``z`` and the output ``a``."""
    if activation == Activation.IDENTITY:
        return np.ones_like(z)
    if activation == Activation.TANH:
        return 1.0 - a * a
    if activation == Activation.RELU:
        return (z > 0).astype(np.float64)
    raise ValueError(f"unknown activation {activation!r}")
