"""Two-step gradient asymmetry under SGD from an identity start."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..tensor_core import Rng, as_matrix
from ..utils import ExperimentReport, ShapeError, get_logger

logger = get_logger(__name__)

CHUNK = 4096


def _vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be a vector, got shape {arr.shape}")
    return arr


def two_step_gradient(x1, y1, x2, y2, eta: float) -> np.ndarray:
    """Second-step gradient of a single linear layer started at the identity.

    After one SGD step on (x1, y1) the gradient on (x2, y2) is
    ``x2 x2^T - eta x1 x1^T x2 x2^T + eta y1 x1^T x2 x2^T - y2 x2^T``.
    """
    x1, y1, x2, y2 = (_vector(v, n) for v, n in ((x1, "x1"), (y1, "y1"), (x2, "x2"), (y2, "y2")))
    if not x1.shape == y1.shape == x2.shape == y2.shape:
        raise ShapeError(
            f"vectors must share one dimension, got {x1.shape}, {y1.shape}, {x2.shape}, {y2.shape}"
        )
    s = float(x1 @ x2)
    return np.outer(x2 + eta * s * (y1 - x1) - y2, x2)


def asymmetry_magnitude(m) -> float:
    """Squared Frobenius norm of ``m - m^T``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"asymmetry needs a square matrix, got {m.shape}")
    diff = m - m.T
    return float(np.sum(diff * diff))


def asymmetry_bounds(d: int, sigma: float, eta: float) -> Tuple[float, float]:
    """Closed-form lower and upper bounds on E||Omega - Omega^T||_F^2.

    ``4 eta^2 d^3 s^8 - 4 eta^2 d^2 s^8 + 2 d^2 s^4`` and
    ``6 eta^2 d^3 s^8 + 3 d^2 s^4``. The lower bound rests on an independence
    approximation and can sit slightly above the exact value for small d.
    """
    s4, s8 = sigma ** 4, sigma ** 8
    lower = 4 * eta ** 2 * d ** 3 * s8 - 4 * eta ** 2 * d ** 2 * s8 + 2 * d ** 2 * s4
    upper = 6 * eta ** 2 * d ** 3 * s8 + 3 * d ** 2 * s4
    return lower, upper


def exact_asymmetry_expectation(d: int, sigma: float, eta: float) -> float:
    """E||Omega - Omega^T||_F^2 for i.i.d. N(0, sigma^2) entries, computed exactly."""
    return 4 * eta ** 2 * sigma ** 8 * d * (d + 2) * (d - 1) + 2 * sigma ** 4 * d * (d - 1)


@dataclass(frozen=True)
class AsymmetryProbe:
    """Monte-Carlo setting: dimension, entry std, learning rate, sample count, seed."""

    d: int = 64
    sigma: float = 1.0
    eta: float = 0.1
    n_samples: int = 20000
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be positive, got {self.n_samples}")
        if self.sigma < 0 or self.eta < 0:
            raise ValueError("sigma and eta must be non-negative")


@dataclass(frozen=True)
class AsymmetryEstimate:
    mean: float
    std_error: float
    lower_bound: float
    upper_bound: float
    exact: float
    n_samples: int

    def within(self, n_se: float = 4.0, value: Optional[float] = None) -> bool:
        target = self.exact if value is None else value
        return abs(self.mean - target) <= n_se * self.std_error


def _magnitudes(x1, y1, x2, y2, eta: float) -> np.ndarray:
    # Omega = w x2^T, and ||a b^T - b a^T||^2 = 2|a|^2|b|^2 - 2(a.b)^2
    s = np.einsum("nd,nd->n", x1, x2)
    w = eta * s[:, np.newaxis] * (y1 - x1) - y2
    ww = np.einsum("nd,nd->n", w, w)
    xx = np.einsum("nd,nd->n", x2, x2)
    wx = np.einsum("nd,nd->n", w, x2)
    return 2.0 * ww * xx - 2.0 * wx * wx


def monte_carlo_asymmetry(probe: AsymmetryProbe) -> AsymmetryEstimate:
    """Average ||Omega - Omega^T||_F^2 over i.i.d. Gaussian quadruples (x1, y1, x2, y2)."""
    rng = Rng(probe.seed)
    values = []
    remaining = probe.n_samples
    while remaining > 0:
        n = min(CHUNK, remaining)
        x1, y1, x2, y2 = (rng.normal(0.0, probe.sigma, (n, probe.d)) for _ in range(4))
        values.append(_magnitudes(x1, y1, x2, y2, probe.eta))
        remaining -= n
    samples = np.concatenate(values)

    mean = float(np.mean(samples))
    std_error = float(np.std(samples, ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
    lower, upper = asymmetry_bounds(probe.d, probe.sigma, probe.eta)
    estimate = AsymmetryEstimate(
        mean=mean,
        std_error=std_error,
        lower_bound=lower,
        upper_bound=upper,
        exact=exact_asymmetry_expectation(probe.d, probe.sigma, probe.eta),
        n_samples=probe.n_samples,
    )
    logger.info(
        f"Asymmetry d={probe.d} sigma={probe.sigma} eta={probe.eta}: "
        f"{mean:.6g} +/- {std_error:.3g} (bounds {lower:.6g}..{upper:.6g})"
    )
    return estimate


def asymmetry_experiment(
    d: int = 64,
    sigma: float = 1.0,
    eta: float = 0.1,
    n_samples: int = 20000,
    seed: int = 0,
    scaling_dims: Tuple[int, ...] = (),
) -> ExperimentReport:
    """Estimate plus bounds, and optionally the estimate across ``scaling_dims``."""
    probe = AsymmetryProbe(d, sigma, eta, n_samples, seed)
    estimate = monte_carlo_asymmetry(probe)
    control = monte_carlo_asymmetry(AsymmetryProbe(d, sigma, 0.0, n_samples, seed + 1))

    report = ExperimentReport(
        name="asymmetry",
        metadata={"d": d, "sigma": sigma, "eta": eta, "n_samples": n_samples, "seed": seed},
    )
    report.summary.update(
        {
            "estimate": estimate.mean,
            "std_error": estimate.std_error,
            "lower_bound": estimate.lower_bound,
            "upper_bound": estimate.upper_bound,
            "exact": estimate.exact,
            "within_bounds": 0.95 * estimate.lower_bound <= estimate.mean <= 1.05 * estimate.upper_bound,
            "control_estimate": control.mean,
            "control_std_error": control.std_error,
            "control_expected": 2 * d * (d - 1) * sigma ** 4,
        }
    )
    for dim in sorted(set(scaling_dims)):
        scaled = monte_carlo_asymmetry(AsymmetryProbe(dim, sigma, eta, n_samples, seed))
        report.record("estimate_by_d", dim, scaled.mean)
    return report
