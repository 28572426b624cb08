"""Probes reproducing the verifiable behaviour of identity-style initialization."""

from ..utils.report import ExperimentReport, load_report, report_stem
from .asymmetry import (
    AsymmetryEstimate,
    AsymmetryProbe,
    asymmetry_bounds,
    asymmetry_experiment,
    asymmetry_magnitude,
    exact_asymmetry_expectation,
    monte_carlo_asymmetry,
    two_step_gradient,
)
from .classification import linear5, mnist_experiment
from .dead_neuron import DEAD_VARIANTS, dead_neuron_experiment
from .isometry import isometry_experiment
from .long_stem import EXPLOSION_FACTOR, long_stem_probe
from .rank import RANK_MODES, loose_rank_comparison, rank_experiment, rank_schedule
from .symmetry import SYMMETRY_MODES, layer_distance, symmetry_experiment
from .toy import ToyConfig, fixed_point, toy_dynamics, toy_loss
from .variance import NET_KINDS, build_probe_net, variance_probe

__all__ = [
    "AsymmetryEstimate",
    "AsymmetryProbe",
    "DEAD_VARIANTS",
    "EXPLOSION_FACTOR",
    "ExperimentReport",
    "NET_KINDS",
    "RANK_MODES",
    "SYMMETRY_MODES",
    "ToyConfig",
    "asymmetry_bounds",
    "asymmetry_experiment",
    "asymmetry_magnitude",
    "build_probe_net",
    "dead_neuron_experiment",
    "exact_asymmetry_expectation",
    "fixed_point",
    "isometry_experiment",
    "layer_distance",
    "linear5",
    "load_report",
    "long_stem_probe",
    "loose_rank_comparison",
    "mnist_experiment",
    "monte_carlo_asymmetry",
    "rank_experiment",
    "rank_schedule",
    "report_stem",
    "symmetry_experiment",
    "toy_dynamics",
    "toy_loss",
    "two_step_gradient",
    "variance_probe",
]
