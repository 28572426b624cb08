"""Forward pass, manual backpropagation and evaluation."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..utils import ShapeError, TrainingUnsupportedError
from .activations import activate, derivative
from .conv import conv2d_forward
from .losses import loss_and_grad
from .params import ParamSet, gate_name, kernel_name, stem_name, weight_name
from .spec import (
    CONV_LAYERS,
    Activation,
    Conv2D,
    ConvResidualBlock,
    Dense,
    LossKind,
    NetworkSpec,
    ResidualBlock,
)


@dataclass
class DenseCache:
    inputs: np.ndarray
    pre: np.ndarray
    out: np.ndarray


@dataclass
class ResidualCache:
    inputs: np.ndarray
    stem_inputs: List[np.ndarray]
    stem_pre: List[np.ndarray]
    stem_out: np.ndarray
    gate: float


@dataclass
class ForwardTrace:
    """Everything computed by ``forward``.

    ``activations[0]`` is the input and ``activations[i + 1]`` the output of
    layer ``i``.
    """

    activations: List[np.ndarray]
    caches: List[Any] = field(default_factory=list)

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


def _prepare_input(net: NetworkSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if net.is_convolutional:
        if x.ndim == 3:
            x = x[np.newaxis]
        if x.ndim != 4 or x.shape[1] != net.input_dim:
            raise ShapeError(
                f"expected (n, {net.input_dim}, H, W) images, got shape {x.shape}"
            )
        return x
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise ShapeError(f"expected (n, {net.input_dim}) inputs, got shape {x.shape}")
    return x


def _gate_value(params: ParamSet, index: int) -> float:
    gate = params.gate(index)
    return 1.0 if gate is None else float(gate)


def forward(net: NetworkSpec, params: ParamSet, x: np.ndarray) -> ForwardTrace:
    """Run ``x`` (one sample per row) through the network.

    Residual blocks compute ``h + g * stem(h)``; the activation sits inside the
    stem only, the main branch stays linear.
    """
    h = _prepare_input(net, x)
    trace = ForwardTrace(activations=[h])

    for i, layer in enumerate(net.layers):
        if isinstance(layer, Dense):
            pre = h @ params[weight_name(i)].T
            out = activate(layer.activation, pre)
            trace.caches.append(DenseCache(h, pre, out))
        elif isinstance(layer, ResidualBlock):
            u = h
            stem_inputs, stem_pre = [], []
            for j in range(layer.stem_depth):
                stem_inputs.append(u)
                z = u @ params[stem_name(i, j)].T
                stem_pre.append(z)
                u = activate(layer.activation, z) if j < layer.stem_depth - 1 else z
            g = _gate_value(params, i)
            out = h + g * u
            trace.caches.append(ResidualCache(h, stem_inputs, stem_pre, u, g))
        elif isinstance(layer, Conv2D):
            out = activate(layer.activation, conv2d_forward(params.kernels[kernel_name(i)], h))
            trace.caches.append(None)
        elif isinstance(layer, ConvResidualBlock):
            u = h
            for j in range(layer.stem_depth):
                u = conv2d_forward(params.kernels[stem_name(i, j)], u)
                if j < layer.stem_depth - 1:
                    u = activate(layer.activation, u)
            out = h + u
            trace.caches.append(None)
        else:
            raise TypeError(f"unsupported layer {layer!r}")
        trace.activations.append(out)
        h = out

    return trace


def predict(net: NetworkSpec, params: ParamSet, x: np.ndarray) -> np.ndarray:
    return forward(net, params, x).output


def backward(
    net: NetworkSpec, params: ParamSet, trace: ForwardTrace, output_grad: np.ndarray
) -> Dict[str, np.ndarray]:
    """Gradients of every trainable array given d(loss)/d(output).

    Raises:
        TrainingUnsupportedError: If the network contains convolutions
    """
    if any(isinstance(layer, CONV_LAYERS) for layer in net.layers):
        raise TrainingUnsupportedError("convolutional layers are forward-only")

    grads: Dict[str, np.ndarray] = {}
    delta = output_grad
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        cache = trace.caches[i]
        if isinstance(layer, Dense):
            dz = delta * derivative(layer.activation, cache.pre, cache.out)
            w = params[weight_name(i)]
            grads[weight_name(i)] = dz.T @ cache.inputs
            delta = dz @ w
        else:
            if gate_name(i) in params.arrays:
                grads[gate_name(i)] = np.asarray(np.sum(delta * cache.stem_out))
            dz = cache.gate * delta
            for j in range(layer.stem_depth - 1, -1, -1):
                s = params[stem_name(i, j)]
                grads[stem_name(i, j)] = dz.T @ cache.stem_inputs[j]
                du = dz @ s
                if j > 0:
                    z_prev = cache.stem_pre[j - 1]
                    dz = du * derivative(layer.activation, z_prev, cache.stem_inputs[j])
            delta = delta + du
    return grads


def loss_and_gradients(
    net: NetworkSpec,
    params: ParamSet,
    x: np.ndarray,
    targets: np.ndarray,
    loss: LossKind = LossKind.MSE,
) -> Tuple[float, Dict[str, np.ndarray], ForwardTrace]:
    """Forward, loss and backward for one batch."""
    trace = forward(net, params, x)
    value, output_grad = loss_and_grad(loss, trace.output, targets)
    return value, backward(net, params, trace, output_grad), trace


def evaluate(
    net: NetworkSpec,
    params: ParamSet,
    dataset,
    loss: LossKind = LossKind.MSE,
    batch_size: Optional[int] = None,
) -> Dict[str, float]:
    """Mean loss (and accuracy when the dataset has labels) over a dataset."""
    loss = LossKind(loss)
    targets = dataset.targets_for(loss)
    n = dataset.n_samples
    step = batch_size or n
    total_loss, correct = 0.0, 0
    for start in range(0, n, step):
        stop = min(start + step, n)
        output = predict(net, params, dataset.inputs[start:stop])
        value, _ = loss_and_grad(loss, output, targets[start:stop])
        total_loss += value * (stop - start)
        if dataset.labels is not None:
            correct += int(np.sum(np.argmax(output, axis=1) == dataset.labels[start:stop]))

    metrics = {"loss": total_loss / n}
    if dataset.labels is not None:
        metrics["accuracy"] = correct / n
    return metrics


def identity_activation(net: NetworkSpec) -> bool:
    return all(layer.activation == Activation.IDENTITY for layer in net.layers)
