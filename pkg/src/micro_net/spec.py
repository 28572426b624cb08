"""Network topology and training configuration."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

from ..utils import ShapeError


class Activation(str, Enum):
    IDENTITY = "identity"
    TANH = "tanh"
    RELU = "relu"


@dataclass(frozen=True)
class Dense:
    """Bias-free fully-connected layer ``a(W x)``."""

    d_in: int
    d_out: int
    activation: Activation = Activation.IDENTITY


@dataclass(frozen=True)
class ResidualBlock:
    """``x + g * stem(x)``; the stem applies ``activation`` after every weight but the last.

    ``stem_depth = 2`` gives ``x + g * W_last a(W_first x)``. The main branch is
    always linear. ``gate=None`` means no gate (g fixed at 1); a float adds a
    trainable scalar gate with that initial value.
    """

    width: int
    stem_depth: int = 2
    activation: Activation = Activation.IDENTITY
    gate: Optional[float] = None


@dataclass(frozen=True)
class Conv2D:
    """Forward-only convolution (stride 1, zero 'same' padding)."""

    k: int
    c_in: int
    c_out: int
    activation: Activation = Activation.IDENTITY


@dataclass(frozen=True)
class ConvResidualBlock:
    """Forward-only residual block of ``stem_depth`` k x k convolutions."""

    channels: int
    k: int = 3
    stem_depth: int = 2
    activation: Activation = Activation.RELU


Layer = Union[Dense, ResidualBlock, Conv2D, ConvResidualBlock]
DENSE_LAYERS = (Dense, ResidualBlock)
CONV_LAYERS = (Conv2D, ConvResidualBlock)


def layer_dims(layer: Layer) -> Tuple[int, int]:
    """(input, output) feature or channel count."""
    if isinstance(layer, Dense):
        return layer.d_in, layer.d_out
    if isinstance(layer, ResidualBlock):
        return layer.width, layer.width
    if isinstance(layer, Conv2D):
        return layer.c_in, layer.c_out
    return layer.channels, layer.channels


@dataclass(frozen=True)
class NetworkSpec:
    """Ordered layer list; dense and convolutional layers are not mixed."""

    layers: Tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers:
            raise ShapeError("a network needs at least one layer")

        kinds = {isinstance(layer, CONV_LAYERS) for layer in layers}
        if len(kinds) > 1:
            raise ShapeError("dense and convolutional layers cannot be mixed in one network")

        for i, layer in enumerate(layers):
            d_in, d_out = layer_dims(layer)
            if d_in < 1 or d_out < 1:
                raise ShapeError(f"layer {i} has non-positive dimensions ({d_in}, {d_out})")
            if isinstance(layer, (ResidualBlock, ConvResidualBlock)) and layer.stem_depth < 1:
                raise ShapeError(f"layer {i} needs stem_depth >= 1, got {layer.stem_depth}")
            if isinstance(layer, (Conv2D, ConvResidualBlock)) and layer.k < 1:
                raise ShapeError(f"layer {i} needs a positive kernel size, got {layer.k}")
            if i > 0:
                prev_out = layer_dims(layers[i - 1])[1]
                if prev_out != d_in:
                    raise ShapeError(
                        f"layer {i} expects {d_in} inputs but layer {i - 1} produces {prev_out}"
                    )

    @property
    def input_dim(self) -> int:
        return layer_dims(self.layers[0])[0]

    @property
    def output_dim(self) -> int:
        return layer_dims(self.layers[-1])[1]

    @property
    def is_residual(self) -> bool:
        return any(isinstance(layer, (ResidualBlock, ConvResidualBlock)) for layer in self.layers)

    @property
    def is_convolutional(self) -> bool:
        return isinstance(self.layers[0], CONV_LAYERS)

    @property
    def first_activation(self) -> Activation:
        return self.layers[0].activation

    @classmethod
    def mlp(cls, widths: Sequence[int], activation: Activation = Activation.IDENTITY,
            last_activation: Activation = Activation.IDENTITY) -> "NetworkSpec":
        """Plain MLP through ``widths``; the last layer uses ``last_activation``."""
        if len(widths) < 2:
            raise ShapeError("an MLP needs at least input and output widths")
        n = len(widths) - 1
        layers = [
            Dense(widths[i], widths[i + 1], activation if i < n - 1 else last_activation)
            for i in range(n)
        ]
        return cls(tuple(layers))

    @classmethod
    def residual_mlp(
        cls,
        width: int,
        blocks: int,
        activation: Activation = Activation.IDENTITY,
        stem_depth: int = 2,
        gate: Optional[float] = None,
        d_in: Optional[int] = None,
        d_out: Optional[int] = None,
    ) -> "NetworkSpec":
        """Optional input projection, ``blocks`` residual blocks, optional readout."""
        layers: List[Layer] = []
        if d_in is not None:
            layers.append(Dense(d_in, width, activation))
        layers.extend(ResidualBlock(width, stem_depth, activation, gate) for _ in range(blocks))
        if d_out is not None:
            layers.append(Dense(width, d_out))
        return cls(tuple(layers))


class LossKind(str, Enum):
    MSE = "mse"
    CROSS_ENTROPY = "cross_entropy"


class TrainMode(str, Enum):
    GD = "gd"
    SGD = "sgd"


class LRSchedule(str, Enum):
    CONSTANT = "constant"
    COSINE = "cosine"


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and loop settings.

    Attributes:
        learning_rate: Step size (0 allowed for frozen-weight controls)
        momentum: Heavy-ball coefficient in [0, 1)
        weight_decay: Coupled L2 coefficient folded into the gradient
        batch_size: Minibatch size (ignored in GD mode)
        epochs: Passes over the dataset
        loss: Loss function
        mode: Full-batch GD or shuffled minibatch SGD
        lr_schedule: Constant or per-epoch cosine decay
        seed: Shuffle seed
        record_every: Probe interval in optimizer steps (0 disables step probes)
        snapshot_epochs: Epoch indices (1-based, after the epoch) to snapshot weights
        progress: Show a progress bar
    """

    learning_rate: float = 0.1
    momentum: float = 0.0
    weight_decay: float = 0.0
    batch_size: int = 32
    epochs: int = 1
    loss: LossKind = LossKind.MSE
    mode: TrainMode = TrainMode.SGD
    lr_schedule: LRSchedule = LRSchedule.CONSTANT
    seed: int = 0
    record_every: int = 0
    snapshot_epochs: Tuple[int, ...] = field(default_factory=tuple)
    progress: bool = False

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be non-negative, got {self.weight_decay}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be positive, got {self.batch_size}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")
        if self.record_every < 0:
            raise ValueError(f"record_every must be non-negative, got {self.record_every}")
        object.__setattr__(self, "loss", LossKind(self.loss))
        object.__setattr__(self, "mode", TrainMode(self.mode))
        object.__setattr__(self, "lr_schedule", LRSchedule(self.lr_schedule))
        object.__setattr__(self, "snapshot_epochs", tuple(self.snapshot_epochs))

    def effective_batch_size(self, n_samples: int) -> int:
        """GD always uses the whole dataset; SGD is capped at the dataset size."""
        if self.mode == TrainMode.GD:
            return n_samples
        return min(self.batch_size, n_samples)
