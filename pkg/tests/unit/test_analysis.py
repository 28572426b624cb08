"""Unit tests for the analysis experiments."""

import math

import numpy as np
import pytest

from src.analysis import (
    AsymmetryProbe,
    ToyConfig,
    asymmetry_bounds,
    asymmetry_experiment,
    asymmetry_magnitude,
    build_probe_net,
    dead_neuron_experiment,
    exact_asymmetry_expectation,
    fixed_point,
    isometry_experiment,
    layer_distance,
    long_stem_probe,
    loose_rank_comparison,
    mnist_experiment,
    monte_carlo_asymmetry,
    rank_experiment,
    rank_schedule,
    symmetry_experiment,
    toy_dynamics,
    toy_loss,
    two_step_gradient,
    variance_probe,
)
from src.datasets import mnist_available
from src.initializers import InitPolicy, init_network
from src.micro_net import (
    NetworkSpec,
    ParamSet,
    TrainConfig,
    forward,
    loss_and_gradients,
    sgd_step,
)
from src.tensor_core import Rng
from src.utils import ShapeError


class TestAsymmetry:
    """Test the two-step gradient and its asymmetry statistics."""

    def test_two_step_gradient_matches_engine(self):
        """Test the closed form against two real SGD steps."""
        rng = Rng(1)
        eta = 0.1
        x1, y1, x2, y2 = (rng.normal(0.0, 1.0, 5) for _ in range(4))
        net = NetworkSpec.mlp([5, 5])
        params = ParamSet(arrays={"layer0.weight": np.eye(5)})
        _, grads, _ = loss_and_gradients(net, params, x1[None], y1[None])
        sgd_step(params, grads, TrainConfig(learning_rate=eta))
        _, grads, _ = loss_and_gradients(net, params, x2[None], y2[None])
        np.testing.assert_allclose(grads["layer0.weight"], two_step_gradient(x1, y1, x2, y2, eta), atol=1e-12)

    def test_shape_checks(self):
        """Test mismatched vectors and non-square matrices raise ShapeError."""
        with pytest.raises(ShapeError):
            two_step_gradient(np.ones(3), np.ones(3), np.ones(3), np.ones(4), 0.1)
        with pytest.raises(ShapeError):
            asymmetry_magnitude(np.ones((2, 3)))

    def test_magnitude(self):
        """Test the asymmetry of symmetric and triangular matrices."""
        assert asymmetry_magnitude(np.eye(3)) == 0.0
        assert asymmetry_magnitude(np.array([[0.0, 1.0], [0.0, 0.0]])) == 2.0

    def test_bound_values(self):
        """Test the bounds and exact expectation at d=64."""
        lower, upper = asymmetry_bounds(64, 1.0, 0.1)
        assert lower == pytest.approx(18513.92)
        assert upper == pytest.approx(28016.64)
        assert exact_asymmetry_expectation(64, 1.0, 0.1) == pytest.approx(18708.48)

    def test_monte_carlo_within_bounds(self):
        """Test the Monte-Carlo mean falls inside the bounds."""
        estimate = monte_carlo_asymmetry(AsymmetryProbe(d=64, sigma=1.0, eta=0.1, n_samples=20000, seed=0))
        assert 0.95 * estimate.lower_bound <= estimate.mean <= 1.05 * estimate.upper_bound
        assert estimate.within(4.0)

    def test_zero_learning_rate_control(self):
        """Test the eta=0 control matches its closed form."""
        report = asymmetry_experiment(d=64, n_samples=20000, seed=3)
        s = report.summary
        assert abs(s["control_estimate"] - s["control_expected"]) <= 4 * s["control_std_error"]
        assert s["control_expected"] == 2 * 64 * 63
        assert s["within_bounds"]

    def test_scaling_with_dimension(self):
        """Test the d-scaling trace and the 32/16 ratio."""
        report = asymmetry_experiment(d=16, eta=1.0, n_samples=4000, seed=1, scaling_dims=(32, 16))
        assert report.steps("estimate_by_d") == [16, 32]
        ratio = exact_asymmetry_expectation(32, 1.0, 1.0) / exact_asymmetry_expectation(16, 1.0, 1.0)
        assert ratio == pytest.approx(7.708, abs=1e-3)

    def test_config_validation(self):
        """Test non-positive dimensions and negative eta are refused."""
        with pytest.raises(ValueError):
            AsymmetryProbe(d=0)
        with pytest.raises(ValueError):
            AsymmetryProbe(eta=-0.1)


class TestSymmetry:
    """Test symmetry breaking in deep linear networks."""

    def test_layer_distance(self):
        """Test mean pairwise layer distance and its input checks."""
        assert layer_distance([np.eye(2), np.eye(2), np.eye(2)]) == 0.0
        assert layer_distance([np.zeros((2, 2)), np.ones((2, 2))]) == 1.0
        with pytest.raises(ValueError):
            layer_distance([np.eye(2)])
        with pytest.raises(ShapeError):
            layer_distance([np.eye(2), np.eye(3)])

    def test_unknown_mode(self):
        """Test an unknown training mode is refused."""
        with pytest.raises(ValueError):
            symmetry_experiment(mode="adam")

    def test_sgd_breaks_symmetry_faster_than_gd(self):
        """Test minibatch noise separates the layers far more than GD."""
        kwargs = dict(n_train=200, n_test=200, epochs=5)
        gd = symmetry_experiment("gd", seed=0, **kwargs)
        sgd = symmetry_experiment("sgd_momentum", seed=0, **kwargs)
        assert gd.steps("layer_distance") == list(range(6))
        assert gd.first("layer_distance") == 0.0
        assert sgd.summary["final_layer_distance"] > 10 * gd.summary["final_layer_distance"]

    def test_deterministic(self):
        """Test one seed gives one report."""
        a = symmetry_experiment("sgd", seed=2, n_train=40, n_test=40, epochs=2)
        b = symmetry_experiment("sgd", seed=2, n_train=40, n_test=40, epochs=2)
        assert a.to_json() == b.to_json()

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_full_setting(self, seed):
        """Test the full-length run for several seeds."""
        gd = symmetry_experiment("gd", seed=seed)
        sgd = symmetry_experiment("sgd_momentum", seed=seed)
        assert sgd.summary["final_layer_distance"] > 10 * gd.summary["final_layer_distance"]
        assert sgd.summary["test_loss_ratio"] < 0.05
        assert gd.summary["test_loss_ratio"] > 0.5


class TestRank:
    """Test the rank of the middle-layer update."""

    def test_schedule(self):
        """Test the dense-then-sparse record schedule."""
        assert rank_schedule(30) == list(range(11)) + [20, 30]

    @pytest.mark.parametrize("seed", range(10))
    def test_two_steps(self, seed):
        """Test rank after two steps for identity and zero padding."""
        idinit = rank_experiment("idinit", steps=2, seed=seed)
        zero_pad = rank_experiment("zero_pad", steps=2, seed=seed)
        assert idinit.summary["max_rank"] >= 8
        assert max(zero_pad.values("rank")) <= 8

    def test_zero_pad_stays_bounded(self):
        """Test zero padding never passes D0."""
        report = rank_experiment("zero_pad", steps=30, seed=4)
        assert report.summary["max_rank"] <= 8
        assert not report.summary["exceeds_d0"]

    def test_hadamard_exceeds_d0(self):
        """Hadamard padding on both sides lets the update rank pass D0."""
        report = rank_experiment("hadamard", steps=10, seed=1)
        assert report.summary["max_rank"] > 8
        assert report.summary["exceeds_d0"]

    @pytest.mark.parametrize("d0, dh", [(4, 16), (16, 64)])
    def test_rank_constraint_across_widths(self, d0, dh):
        """Identity padding escapes the D0 bound; zero padding never does."""
        idinit = rank_experiment("idinit", d0=d0, dh=dh, seed=0)
        zero_pad = rank_experiment("zero_pad", d0=d0, dh=dh, seed=0)
        assert idinit.summary["max_rank"] > d0
        assert zero_pad.summary["max_rank"] <= d0

    def test_loose_identity_does_not_lower_rank(self):
        """Test loose identity noise keeps the rank at least as high."""
        report = loose_rank_comparison(steps=3, seed=0, loose_eps=1e-6)
        assert report.summary["loose/max_rank"] >= report.summary["exact/max_rank"] >= 8

    def test_hidden_width_checked(self):
        """Test a hidden width not above the ends is refused."""
        with pytest.raises(ValueError):
            rank_experiment("idinit", d0=8, dh=8, dl=8)
        with pytest.raises(ValueError):
            rank_experiment("orthogonal")


class TestIsometry:
    """Test dynamical isometry at initialization."""

    def test_idinit_is_critical(self):
        """Test chi stays at 1 through 64 IDInit blocks."""
        report = isometry_experiment("idinit", blocks=64)
        assert report.summary["chi_deviation"] < 1e-3

    def test_kaiming_is_not(self):
        """Test Kaiming blows chi up."""
        report = isometry_experiment("kaiming", blocks=64)
        assert report.summary["chi"] > 10

    def test_trace_has_one_value_per_singular_value(self):
        """Test the spectrum trace has one entry per singular value."""
        report = isometry_experiment("idinit", blocks=4, width=8)
        assert report.steps("log_singular_value") == list(range(8))


class TestVariance:
    """Test variance propagation through deep nets."""

    @pytest.mark.parametrize("noise_std", [0.0, 0.01, 0.1, 1.0])
    def test_idinit_resfc_keeps_scale(self, noise_std):
        """Test the residual FC output scale stays near the input under noise."""
        report = variance_probe("resfc", "idinit", noise_std, n_rounds=500)
        assert 0.5 <= report.summary["output_ratio"] <= 2.0

    def test_xavier_resfc_grows(self):
        """Test Xavier residual FC output grows."""
        report = variance_probe("resfc", "xavier", 0.0, n_rounds=500)
        assert report.summary["output_ratio"] > 5.0

    def test_trace_per_layer(self):
        """Test one std value per FC layer."""
        report = variance_probe("fc", "idinit", n_rounds=3)
        assert report.steps("std") == list(range(11))

    def test_conv_kinds(self):
        """Test conv stacks produce finite output."""
        for kind in ("conv", "resconv"):
            report = variance_probe(kind, "idinit", n_rounds=2, batch=2, blocks=2, image_size=6)
            assert math.isfinite(report.summary["output_std"])
        assert len(build_probe_net("resconv", blocks=3).layers) == 4

    def test_fc_identity_replicates_input(self):
        """Exact IDI through the plain FC stack copies input coordinate m % 96 to output m."""
        net = build_probe_net("fc")
        params = init_network(net, InitPolicy(loose_eps=0.0))
        x = Rng(3).normal(0.0, 1.0, (4, 96))
        output = forward(net, params, x).output
        np.testing.assert_array_equal(output, x[:, np.arange(200) % 96])

    def test_unknown_kind(self):
        """Test an unknown net kind is refused."""
        with pytest.raises(ValueError):
            variance_probe("rnn")


class TestDeadNeuron:
    """Test dead-neuron accounting."""

    def test_zero_variant_stays_dead(self):
        """Test a zero gate never receives gradient."""
        report = dead_neuron_experiment("zero", steps=100)
        assert report.summary["dead_fraction"] == 1.0
        assert report.summary["final_gate"] == 0.0

    def test_idiz_variant_recovers(self):
        """Test IDIZ starts dead and revives."""
        report = dead_neuron_experiment("idiz", steps=100)
        assert report.first("dead_fraction") == 1.0
        assert report.summary["dead_fraction"] < 0.05

    def test_unknown_variant(self):
        """Test an unknown variant is refused."""
        with pytest.raises(ValueError):
            dead_neuron_experiment("ones")


class TestToy:
    """Test the scalar toy dynamics."""

    def test_residual_converges(self):
        """Test the residual toy reaches its fixed point."""
        report = toy_dynamics(ToyConfig.default_start(1))
        assert report.summary["final_product"] == pytest.approx(50 ** 0.2 - 1, abs=1e-2)
        assert report.summary["final_product"] == pytest.approx(1.187, abs=1e-2)
        assert report.summary["min_distance_to_poor_point"] > 0.05

    def test_plain_converges(self):
        """Test the plain toy reaches its fixed point."""
        report = toy_dynamics(ToyConfig.default_start(0))
        assert report.summary["final_product"] == pytest.approx(50 ** 0.2, abs=1e-2)

    def test_fixed_point_and_loss(self):
        """Test the fixed point has zero loss."""
        assert fixed_point(1, 5, 32.0) == pytest.approx(1.0)
        cfg = ToyConfig(r=1, depth=5, target_scale=32.0)
        assert toy_loss(cfg, 1.0, 1.0) == pytest.approx(0.0)

    def test_zero_learning_rate_is_constant(self):
        """Test lr=0 leaves both weights where they started."""
        report = toy_dynamics(ToyConfig.default_start(1, lr=0.0, steps=20))
        assert set(report.values("w1")) == {1.0}
        assert set(report.values("w2")) == {0.0}
        assert not report.diverged

    def test_large_step_diverges(self):
        """Test a huge step is flagged as diverged."""
        report = toy_dynamics(ToyConfig(r=1, lr=1.0, w1=1.0, w2=1.0, steps=50))
        assert report.diverged

    def test_validation(self):
        """Test r outside {0, 1} is refused."""
        with pytest.raises(ValueError):
            ToyConfig(r=2)


class TestLongStem:
    """Test deep-stem stability."""

    def test_idinit_is_stable(self):
        """Depth-32 stem under IDInit stays bounded for the full 35 epochs."""
        report = long_stem_probe(stem_depth=32, init="idinit", epochs=35)
        assert report.steps("output_std") == list(range(36))
        assert not report.summary["exploded"]

    @pytest.mark.parametrize("init", ["idinit", "kaiming", "xavier", "orthogonal"])
    def test_single_layer_stem_never_explodes(self, init):
        """Test a depth-1 stem is stable under every policy."""
        report = long_stem_probe(stem_depth=1, init=init, epochs=35)
        assert not report.summary["exploded"]

    def test_kaiming_explodes(self):
        """Test a deep Kaiming stem explodes within an epoch."""
        report = long_stem_probe(stem_depth=32, init="kaiming", epochs=1)
        assert report.summary["exploded"]


class TestMnist:
    """Linear-5 on MNIST; needs the dataset files."""

    def test_unknown_net(self):
        """Test an unknown net name is refused."""
        with pytest.raises(ValueError):
            mnist_experiment(net="resnet")

    @pytest.mark.slow
    @pytest.mark.skipif(not mnist_available(), reason="MNIST files not found")
    def test_subset_accuracy(self):
        """Test accuracy on the 10k training subset."""
        report = mnist_experiment("linear5relu", "idinit", epochs=30, train_limit=10000)
        assert report.summary["final_test_accuracy"] >= 0.95

    @pytest.mark.slow
    @pytest.mark.skipif(not mnist_available(), reason="MNIST files not found")
    def test_full_data_matches_kaiming(self):
        """IDInit on full MNIST lands within one point of an identically trained Kaiming net."""
        idinit = mnist_experiment("linear5relu", "idinit", epochs=30, train_limit=None)
        kaiming = mnist_experiment("linear5relu", "kaiming", epochs=30, train_limit=None)
        accuracy = idinit.summary["final_test_accuracy"]
        assert accuracy >= 0.975
        assert accuracy >= kaiming.summary["final_test_accuracy"] - 0.01
