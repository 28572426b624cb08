"""Deterministic dense / residual network engine with manual backprop."""

from .activations import activate, derivative
from .conv import conv2d_forward
from .jacobian import chi, io_jacobian, log_singular_values
from .losses import cross_entropy, loss_and_grad, mse, softmax
from .network import (
    ForwardTrace,
    backward,
    evaluate,
    forward,
    identity_activation,
    loss_and_gradients,
    predict,
)
from .optimizer import learning_rate_at, sgd_step
from .params import ParamSet, gate_name, kernel_name, parse_name, stem_name, weight_name
from .snapshot import export_weights_csv, load_snapshot, save_snapshot, save_weights
from .spec import (
    Activation,
    Conv2D,
    ConvResidualBlock,
    Dense,
    LossKind,
    LRSchedule,
    NetworkSpec,
    ResidualBlock,
    TrainConfig,
    TrainMode,
)
from .trainer import DIVERGENCE_LIMIT, TrainResult, is_diverged, train

__all__ = [
    "Activation",
    "Conv2D",
    "ConvResidualBlock",
    "DIVERGENCE_LIMIT",
    "Dense",
    "ForwardTrace",
    "LRSchedule",
    "LossKind",
    "NetworkSpec",
    "ParamSet",
    "ResidualBlock",
    "TrainConfig",
    "TrainMode",
    "TrainResult",
    "activate",
    "backward",
    "chi",
    "conv2d_forward",
    "cross_entropy",
    "derivative",
    "evaluate",
    "export_weights_csv",
    "forward",
    "gate_name",
    "identity_activation",
    "io_jacobian",
    "is_diverged",
    "kernel_name",
    "learning_rate_at",
    "load_snapshot",
    "loss_and_grad",
    "loss_and_gradients",
    "mse",
    "parse_name",
    "predict",
    "save_snapshot",
    "save_weights",
    "sgd_step",
    "softmax",
    "stem_name",
    "train",
    "weight_name",
]
