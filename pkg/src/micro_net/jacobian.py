"""Input-output Jacobians and the dynamical-isometry statistics built on them."""

from typing import Literal

import numpy as np

from ..tensor_core import singular_values
from ..utils import get_logger
from .activations import derivative
from .network import ResidualCache, forward, identity_activation, predict
from .params import ParamSet, stem_name, weight_name
from .spec import Dense, NetworkSpec

logger = get_logger(__name__)

JacobianMethod = Literal["auto", "analytic", "finite_difference"]
FD_STEP = 1e-5


def _analytic(net: NetworkSpec, params: ParamSet, x: np.ndarray) -> np.ndarray:
    trace = forward(net, params, x.reshape(1, -1))
    jac = np.eye(net.input_dim)
    for i, layer in enumerate(net.layers):
        cache = trace.caches[i]
        if isinstance(layer, Dense):
            d = derivative(layer.activation, cache.pre[0], cache.out[0])
            jac = d[:, np.newaxis] * (params[weight_name(i)] @ jac)
        else:
            assert isinstance(cache, ResidualCache)
            branch = jac
            for j in range(layer.stem_depth):
                branch = params[stem_name(i, j)] @ branch
                if j < layer.stem_depth - 1:
                    d = derivative(layer.activation, cache.stem_pre[j][0], cache.stem_inputs[j + 1][0])
                    branch = d[:, np.newaxis] * branch
            jac = jac + cache.gate * branch
    return jac


def _finite_difference(net: NetworkSpec, params: ParamSet, x: np.ndarray, h: float) -> np.ndarray:
    """Central differences; all 2 * d perturbed inputs go through one batched forward."""
    shape = x.shape
    flat = x.reshape(-1)
    d = flat.size
    perturbed = np.concatenate([flat + h * np.eye(d), flat - h * np.eye(d)])
    out = predict(net, params, perturbed.reshape((2 * d,) + shape))
    out = out.reshape(2 * d, -1)
    return ((out[:d] - out[d:]) / (2.0 * h)).T


def io_jacobian(
    net: NetworkSpec,
    params: ParamSet,
    x: np.ndarray,
    method: JacobianMethod = "auto",
    h: float = FD_STEP,
) -> np.ndarray:
    """d(output)/d(input) at one input sample, as a dense (d_out, d_in) matrix.

    ``auto`` uses the exact chain-rule product for identity-activation dense
    networks and central finite differences otherwise. Convolutional networks
    only support finite differences; ``x`` is then one (c, H, W) image and the
    Jacobian is taken over its flattened pixels.
    """
    x = np.asarray(x, dtype=np.float64)
    if method == "auto":
        method = (
            "analytic"
            if not net.is_convolutional and identity_activation(net)
            else "finite_difference"
        )
    if method == "analytic":
        if net.is_convolutional:
            raise ValueError("analytic Jacobians are only available for dense networks")
        return _analytic(net, params, x.reshape(-1))
    if method == "finite_difference":
        return _finite_difference(net, params, x, h)
    raise ValueError(f"unknown Jacobian method {method!r}")


def chi(jacobian: np.ndarray) -> float:
    """Mean squared singular value; 1 on the critical line."""
    sv = singular_values(jacobian)
    return float(np.mean(sv ** 2)) if sv.size else 0.0


def log_singular_values(jacobian: np.ndarray) -> np.ndarray:
    """Natural log of the singular values (zero values map to -inf)."""
    with np.errstate(divide="ignore"):
        return np.log(singular_values(jacobian))
