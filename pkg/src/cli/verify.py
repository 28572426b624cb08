"""Verification suites: named property checks with a JSON verdict."""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from ..analysis import two_step_gradient
from ..initializers import InitPolicy, channel_maintain, idic, init_attention, init_network
from ..initializers import identity as identity_module
from ..micro_net import (
    Activation,
    Dense,
    NetworkSpec,
    ParamSet,
    ResidualBlock,
    TrainConfig,
    backward,
    chi,
    conv2d_forward,
    forward,
    gate_name,
    io_jacobian,
    loss_and_grad,
    loss_and_gradients,
    sgd_step,
    weight_name,
)
from ..tensor_core import Rng, gaussian_matrix, numerical_rank
from ..utils import get_logger

logger = get_logger(__name__)

CheckResult = Tuple[bool, Dict[str, Any]]


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    description: str
    run: Callable[[], CheckResult]


@dataclass
class Verdict:
    suite: str
    results: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.results)

    def to_dict(self) -> Dict[str, Any]:
        return {"suite": self.suite, "passed": self.passed, "checks": self.results}


# -- initializers -------------------------------------------------------------


def check_identity_transition() -> CheckResult:
    rng = Rng(1)
    worst_loose = 0.0
    for d_in in (1, 3, 16, 64):
        for q in (1, 2, 4):
            d_out = q * d_in
            if d_out > 256:
                continue
            x = gaussian_matrix(rng, d_in, 100)
            exact = identity_module.idi(d_out, d_in, 1.0, 0.0) @ x
            if not np.array_equal(exact, np.tile(x, (q, 1))):
                return False, {"d_out": d_out, "d_in": d_in, "reason": "stacked copies differ"}
            loose = identity_module.idi(d_out, d_in, 1.0, 1e-6, rng)
            deviation = float(np.max(np.abs(loose - identity_module.idi(d_out, d_in))))
            worst_loose = max(worst_loose, deviation)
    return worst_loose < 1e-5, {"max_loose_deviation": worst_loose}


def check_idi_rank() -> CheckResult:
    shapes = [(6, 4), (4, 6), (32, 8), (8, 32), (5, 5)]
    ranks = {f"{a}x{b}": numerical_rank(identity_module.idi(a, b)) for a, b in shapes}
    ok = all(ranks[f"{a}x{b}"] == min(a, b) for a, b in shapes)
    return ok, {"ranks": ranks}


def check_idiz_rows() -> CheckResult:
    eps = 1e-6
    for d in (2, 3, 8, 17):
        w = identity_module.idiz(d, d, eps)
        if np.any(w.sum(axis=1) != 0.0):
            return False, {"d": d, "reason": "row sum not zero"}
        if not set(np.unique(w)) <= {0.0, eps, -eps}:
            return False, {"d": d, "reason": "entries outside {0, +eps, -eps}"}
    return True, {}


def check_zero_transition() -> CheckResult:
    eps, d, n = 1e-3, 8, 100000
    w = identity_module.idiz(d, d, eps)
    x = Rng(2).normal(0.0, 1.0, (n // d + 1, d))[: n // d]
    v = (x @ w.T).reshape(-1)
    mean, var = float(np.mean(v)), float(np.var(v))
    se = math.sqrt(var / v.size)
    ok = abs(mean) < 4 * se and abs(var - 2 * eps ** 2) <= 0.05 * 2 * eps ** 2
    return ok, {"mean": mean, "variance": var, "expected_variance": 2 * eps ** 2}


def check_channel_maintain() -> CheckResult:
    x = Rng(3).normal(0.0, 1.0, (4, 7, 5))
    out = conv2d_forward(channel_maintain(3, 4, 4), x)
    return bool(np.array_equal(out, x)), {}


def check_patch_roundtrip() -> CheckResult:
    kernel = idic(3, 2, 5, 1.0)
    return bool(np.array_equal(kernel.to_matrix(), identity_module.idi(5, 18))), {}


def check_attention() -> CheckResult:
    eps = 1e-6
    w = init_attention(6, epsilon=eps, rng=Rng(4))
    ok = (
        np.all(w.w_o.sum(axis=1) == 0.0)
        and float(np.max(np.abs(w.w_o))) == eps
        and float(np.max(np.abs(w.w_q - np.eye(6)))) < 1e-5
    )
    return bool(ok), {}


# -- gradients ----------------------------------------------------------------


def _random_net(seed: int) -> Tuple[NetworkSpec, ParamSet]:
    width = 3 + seed % 3
    if seed % 2 == 0:
        net = NetworkSpec.mlp([4, width, 3], Activation.TANH)
    else:
        net = NetworkSpec(
            (
                Dense(4, width, Activation.TANH),
                ResidualBlock(width, 2, Activation.TANH, gate=0.5),
                Dense(width, 3),
            )
        )
    params = init_network(net, InitPolicy(method="xavier", seed=seed))
    if net.is_residual:
        params.arrays[gate_name(1)] = np.array(0.7)
    return net, params


def _numeric_gradient(net, params, x, y, name: str, h: float = 1e-5) -> np.ndarray:
    original = params.arrays[name]
    grad = np.zeros_like(original)
    for idx in np.ndindex(original.shape):
        values = []
        for sign in (1.0, -1.0):
            bumped = original.copy()
            bumped[idx] += sign * h
            params.arrays[name] = bumped
            values.append(loss_and_grad("mse", forward(net, params, x).output, y)[0])
        grad[idx] = (values[0] - values[1]) / (2 * h)
    params.arrays[name] = original
    return grad


def check_gradients() -> CheckResult:
    worst = 0.0
    for seed in range(20):
        rng = Rng(100 + seed)
        net, params = _random_net(seed)
        x = rng.normal(0.0, 1.0, (5, 4))
        y = rng.normal(0.0, 1.0, (5, 3))
        trace = forward(net, params, x)
        _, out_grad = loss_and_grad("mse", trace.output, y)
        grads = backward(net, params, trace, out_grad)
        for name in params.names():
            numeric = _numeric_gradient(net, params, x, y, name)
            err = np.abs(grads[name] - numeric)
            tol = 1e-6 * np.maximum(np.abs(grads[name]), np.abs(numeric)) + 1e-8
            if np.any(err > tol):
                return False, {"seed": seed, "parameter": name, "max_error": float(err.max())}
            worst = max(worst, float(err.max()))
    return True, {"max_abs_error": worst}


def check_two_step_gradient() -> CheckResult:
    worst = 0.0
    eta = 0.1
    for seed in range(50):
        rng = Rng(200 + seed)
        d = 4
        x1, y1, x2, y2 = (rng.normal(0.0, 1.0, d) for _ in range(4))
        net = NetworkSpec.mlp([d, d])
        params = ParamSet(arrays={weight_name(0): np.eye(d)})
        _, grads, _ = loss_and_gradients(net, params, x1[None], y1[None])
        sgd_step(params, grads, TrainConfig(learning_rate=eta))
        _, grads, _ = loss_and_gradients(net, params, x2[None], y2[None])
        diff = np.abs(grads[weight_name(0)] - two_step_gradient(x1, y1, x2, y2, eta))
        worst = max(worst, float(diff.max()))
    return worst <= 1e-12, {"max_abs_error": worst}


def check_momentum_recurrence() -> CheckResult:
    config = TrainConfig(learning_rate=0.05, momentum=0.9)
    params = ParamSet(arrays={"layer0.weight": np.array([[1.0]])})
    theta, m = 1.0, 0.0
    for t in range(10):
        g = 0.3 * (t + 1) - theta
        m = 0.9 * m + 0.05 * g
        theta = theta - m
        sgd_step(params, {"layer0.weight": np.array([[g]])}, config)
    err = abs(float(params["layer0.weight"][0, 0]) - theta)
    return err <= 1e-12, {"error": err}


# -- isometry -----------------------------------------------------------------


def _isometry_chi(method: str) -> float:
    net = NetworkSpec.residual_mlp(16, 64, Activation.RELU)
    params = init_network(net, InitPolicy(method=method, seed=5))
    with np.errstate(over="ignore", invalid="ignore"):
        return chi(io_jacobian(net, params, Rng(5).normal(0.0, 1.0, 16), method="analytic"))


def check_idinit_chi() -> CheckResult:
    value = _isometry_chi("idinit")
    return abs(value - 1.0) < 1e-3, {"chi": value}


def check_kaiming_chi() -> CheckResult:
    value = _isometry_chi("kaiming")
    return value > 10, {"chi": value}


def check_identity_forward() -> CheckResult:
    net = NetworkSpec.residual_mlp(8, 10, Activation.RELU)
    params = init_network(net, InitPolicy(zero_stems=True, seed=6))
    x = Rng(6).normal(0.0, 1.0, (5, 8))
    return bool(np.array_equal(forward(net, params, x).output, x)), {}


_INITIALIZER_CHECKS = [
    ("idi_identity_transition", "IDI stacks exact copies of its input", check_identity_transition),
    ("idi_full_rank", "IDI has full rank min(d_out, d_in)", check_idi_rank),
    ("idiz_row_sums", "IDIZ rows sum to zero, entries in {0, +eps, -eps}", check_idiz_rows),
    ("idiz_zero_transition", "IDIZ output variance is 2 * phi * eps^2", check_zero_transition),
    ("channel_maintain_identity", "channel-maintain conv is the identity", check_channel_maintain),
    ("patch_maintain_roundtrip", "IDIC reshapes to the IDI matrix", check_patch_roundtrip),
    ("attention_init", "W_O rows sum to zero with max |entry| = eps", check_attention),
]
_GRADIENT_CHECKS = [
    ("gradient_check", "backprop matches central differences on 20 nets", check_gradients),
    ("two_step_gradient", "closed-form second gradient matches the engine", check_two_step_gradient),
    ("momentum_recurrence", "sgd_step matches a scalar momentum recurrence", check_momentum_recurrence),
]
_ISOMETRY_CHECKS = [
    ("idinit_chi", "IDInit 64-block residual MLP has |chi - 1| < 1e-3", check_idinit_chi),
    ("kaiming_chi", "Kaiming 64-block residual MLP has chi > 10", check_kaiming_chi),
    ("residual_identity_forward", "zero-stem residual net is the identity", check_identity_forward),
]

CHECKS: List[Check] = [
    Check(name, suite, description, run)
    for suite, entries in (
        ("initializers", _INITIALIZER_CHECKS),
        ("gradients", _GRADIENT_CHECKS),
        ("isometry", _ISOMETRY_CHECKS),
    )
    for name, description, run in entries
]

SUITES = ("all", "initializers", "gradients", "isometry")


def list_checks(suite: str = "all") -> List[Check]:
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {SUITES}, got {suite!r}")
    return [c for c in CHECKS if suite == "all" or c.suite == suite]


def run_suite(suite: str = "all") -> Verdict:
    """Run every check of ``suite``; a raising check counts as failed."""
    verdict = Verdict(suite=suite)
    for check in list_checks(suite):
        try:
            passed, detail = check.run()
        except Exception as e:  # noqa: BLE001
            passed, detail = False, {"error": f"{type(e).__name__}: {e}"}
        verdict.results.append(
            {"name": check.name, "suite": check.suite, "passed": bool(passed), "detail": detail}
        )
        log = logger.info if passed else logger.error
        log(f"verify {check.name}: {'PASS' if passed else 'FAIL'}")
    return verdict
