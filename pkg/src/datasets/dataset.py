"""In-memory datasets with their normalization metadata."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..utils import ShapeError

SPLITS = ("train", "test")


@dataclass(frozen=True)
class Normalization:
    """``x = raw * scale - mean``; ``mean`` is computed on the training split."""

    scale: float = 1.0
    mean: float = 0.0

    def apply(self, raw: np.ndarray) -> np.ndarray:
        return raw.astype(np.float64) * self.scale - self.mean

    def invert(self, x: np.ndarray) -> np.ndarray:
        return (x + self.mean) / self.scale


@dataclass(frozen=True)
class Dataset:
    """Inputs with regression targets and/or class labels.

    Attributes:
        inputs: (n, d) matrix, or (n, c, h, w) images for convolutional probes
        targets: (n, k) regression targets
        labels: (n,) integer class labels
        split: "train" or "test"
        normalization: Transform that produced ``inputs`` from raw values
        num_classes: Label range
    """

    inputs: np.ndarray
    targets: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    split: str = "train"
    normalization: Optional[Normalization] = None
    num_classes: Optional[int] = None

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=np.float64)
        if inputs.ndim < 2:
            raise ShapeError(f"inputs must have a sample axis and features, got shape {inputs.shape}")
        object.__setattr__(self, "inputs", inputs)
        n = inputs.shape[0]

        if self.targets is not None:
            targets = np.asarray(self.targets, dtype=np.float64)
            if targets.ndim == 1:
                targets = targets.reshape(-1, 1)
            if targets.shape[0] != n:
                raise ShapeError(f"{targets.shape[0]} targets for {n} inputs")
            object.__setattr__(self, "targets", targets)

        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
            if labels.shape[0] != n:
                raise ShapeError(f"{labels.shape[0]} labels for {n} inputs")
            num_classes = self.num_classes
            if num_classes is None:
                num_classes = int(labels.max()) + 1 if n else 0
                object.__setattr__(self, "num_classes", num_classes)
            if n and (labels.min() < 0 or labels.max() >= num_classes):
                raise ValueError(f"labels must lie in [0, {num_classes})")
            object.__setattr__(self, "labels", labels)

        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def input_dim(self) -> int:
        return int(np.prod(self.inputs.shape[1:]))

    def one_hot(self, num_classes: Optional[int] = None) -> np.ndarray:
        if self.labels is None:
            raise ValueError("dataset has no labels")
        k = num_classes or self.num_classes
        encoded = np.zeros((self.n_samples, k))
        encoded[np.arange(self.n_samples), self.labels] = 1.0
        return encoded

    def targets_for(self, loss: str) -> np.ndarray:
        """Labels for cross-entropy, regression targets (or one-hot labels) for MSE."""
        if str(getattr(loss, "value", loss)) == "cross_entropy":
            if self.labels is None:
                raise ValueError("cross-entropy needs class labels")
            return self.labels
        if self.targets is not None:
            return self.targets
        return self.one_hot()

    def take(self, indices: np.ndarray, split: Optional[str] = None) -> "Dataset":
        return Dataset(
            inputs=self.inputs[indices],
            targets=None if self.targets is None else self.targets[indices],
            labels=None if self.labels is None else self.labels[indices],
            split=split or self.split,
            normalization=self.normalization,
            num_classes=self.num_classes,
        )

    def subset(self, n: Optional[int]) -> "Dataset":
        """First ``n`` samples (all when ``n`` is None or too large)."""
        if n is None or n >= self.n_samples:
            return self
        if n < 1:
            raise ValueError(f"subset size must be positive, got {n}")
        return self.take(np.arange(n))

    def raw_pixels(self) -> np.ndarray:
        """Invert the normalization back to the original byte values."""
        if self.normalization is None:
            raise ValueError("dataset carries no normalization metadata")
        return np.rint(self.normalization.invert(self.inputs)).astype(np.uint8)
