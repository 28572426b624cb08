"""Unit tests for the identity-preserving initializers and their baselines."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.initializers import (
    InitMethod,
    InitPolicy,
    InitSpec,
    baseline,
    channel_maintain,
    construct,
    construct_kernel,
    idi,
    idic,
    idiz,
    idizc,
    init_attention,
    init_network,
    kaiming_normal,
    orthogonal,
    partial_hadamard,
    tau_for,
    xavier_uniform,
)
from src.micro_net import Activation, Conv2D, NetworkSpec, conv2d_forward, forward
from src.tensor_core import Rng, gaussian_matrix, numerical_rank
from src.utils import UnsupportedShapeError, UnsupportedSizeError


class TestIdi:
    """Test the identity-transition matrix."""

    def test_stacked_identity(self):
        """Test a tall IDI stacks identities."""
        expected = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(idi(4, 2), expected)

    def test_partial_identity_when_wide(self):
        """Test a wide IDI is tau times a partial identity."""
        np.testing.assert_array_equal(idi(2, 5, tau=2.0), 2.0 * np.eye(2, 5))

    @pytest.mark.parametrize("d_in,q", [(1, 4), (3, 2), (16, 4), (64, 4), (128, 2)])
    def test_identity_transition_on_random_inputs(self, d_in, q):
        """Test IDI x replicates x exactly."""
        x = gaussian_matrix(Rng(d_in), d_in, 100)
        np.testing.assert_array_equal(idi(q * d_in, d_in) @ x, np.tile(x, (q, 1)))

    def test_loose_condition_stays_close(self):
        """Test loose noise is tiny and only touches nonzero entries."""
        w = idi(32, 8, loose_eps=1e-6, rng=Rng(1))
        assert np.max(np.abs(w - idi(32, 8))) < 1e-5
        assert np.count_nonzero(w) == 32

    def test_loose_condition_breaks_replicas(self):
        """Test loose noise makes the stacked blocks differ."""
        w = idi(16, 8, loose_eps=1e-3, rng=Rng(2))
        assert not np.array_equal(w[:8], w[8:])

    def test_loose_needs_rng(self):
        """Test loose noise without a stream is refused."""
        with pytest.raises(ValueError):
            idi(4, 4, loose_eps=1e-6)

    def test_full_rank(self):
        """Test IDI has full rank in every shape."""
        for d_out, d_in in ((6, 4), (4, 6), (9, 9)):
            assert numerical_rank(idi(d_out, d_in)) == min(d_out, d_in)

    def test_bad_dims(self):
        """Test zero dimensions are refused."""
        with pytest.raises(ValueError):
            idi(0, 3)


class TestIdiz:
    """Test the zero-transition matrix."""

    @pytest.mark.parametrize("d_out,d_in", [(4, 4), (8, 3), (3, 8), (2, 5), (7, 7)])
    def test_rows_sum_to_zero(self, d_out, d_in):
        """Test every IDIZ row cancels."""
        w = idiz(d_out, d_in, 1e-6)
        np.testing.assert_array_equal(w.sum(axis=1), np.zeros(d_out))
        assert set(np.unique(w)) <= {0.0, 1e-6, -1e-6}

    def test_square_layout(self):
        """Test the square IDIZ pattern."""
        eps = 0.5
        expected = np.array([[eps, -eps, 0.0], [0.0, eps, -eps], [-eps, 0.0, eps]])
        np.testing.assert_array_equal(idiz(3, 3, eps), expected)

    def test_wide_layout_uses_trailing_columns(self):
        """Test wide IDIZ puts the negative block in the trailing columns."""
        eps = 1.0
        w = idiz(2, 5, eps)
        np.testing.assert_array_equal(w[:, :2], np.eye(2))
        np.testing.assert_array_equal(w[:, 2:], -np.eye(2, 3))

    def test_single_input_column_cancels(self):
        """Test a single input column yields zeros."""
        np.testing.assert_array_equal(idiz(3, 1, 1e-6), np.zeros((3, 1)))

    def test_epsilon_must_be_positive(self):
        """Test a zero epsilon is refused."""
        with pytest.raises(ValueError):
            idiz(2, 2, 0.0)

    def test_output_variance(self):
        """Test IDIZ output has zero mean and 2 eps² variance."""
        eps, d = 1e-3, 8
        x = Rng(3).normal(0.0, 1.0, (12500, d))
        v = (x @ idiz(d, d, eps).T).reshape(-1)
        se = math.sqrt(np.var(v) / v.size)
        assert abs(np.mean(v)) < 4 * se
        assert np.var(v) == pytest.approx(2 * eps**2, rel=0.05)


class TestConvInitializers:
    """Test patch-maintain and channel-maintain kernels."""

    def test_idic_matrix_view(self):
        """Test the IDIC matrix view is IDI."""
        np.testing.assert_array_equal(idic(3, 2, 5).to_matrix(), idi(5, 18))

    def test_idizc_matrix_view(self):
        """Test the IDIZC matrix view is IDIZ."""
        np.testing.assert_array_equal(idizc(3, 4, 4, 1e-6).to_matrix(), idiz(4, 36, 1e-6))

    def test_channel_maintain_is_identity(self):
        """Test channel-maintain convolution is the identity map."""
        x = Rng(4).normal(0.0, 1.0, (3, 6, 5))
        np.testing.assert_array_equal(conv2d_forward(channel_maintain(3, 3, 3), x), x)

    def test_channel_maintain_center_tap(self):
        """Test only the center tap is set."""
        kernel = channel_maintain(5, 2, 4, tau=2.0)
        np.testing.assert_array_equal(kernel.tap(2, 2), 2.0 * idi(4, 2))
        assert np.count_nonzero(kernel.data) == 4

    def test_channel_maintain_even_kernel(self):
        """Test even kernel sizes are refused."""
        with pytest.raises(UnsupportedShapeError):
            channel_maintain(2, 3, 3)

    def test_patch_maintain_shifts_features(self):
        """Test patch-maintain copies shifted pixels."""
        # Output channel 0 copies tap (0, 0): the pixel up and to the left.
        x = Rng(5).normal(0.0, 1.0, (1, 5, 5))
        out = conv2d_forward(idic(3, 1, 1), x)
        np.testing.assert_array_equal(out[0, 1:, 1:], x[0, :-1, :-1])


class TestBaselines:
    """Test comparison initializers."""

    def setup_method(self):
        self.rng = Rng(6)

    def test_xavier_bound(self):
        """Test Xavier draws stay inside the Glorot bound."""
        w = xavier_uniform(30, 20, self.rng)
        assert np.max(np.abs(w)) <= math.sqrt(6.0 / 50)

    def test_kaiming_scale(self):
        """Test Kaiming std matches sqrt(2 / fan_in)."""
        w = kaiming_normal(400, 400, self.rng)
        assert np.std(w) == pytest.approx(math.sqrt(2.0 / 400), rel=0.02)

    @pytest.mark.parametrize("d_out,d_in", [(6, 4), (4, 6), (5, 5)])
    def test_orthogonal(self, d_out, d_in):
        """Test orthogonal matrices have orthonormal rows or columns."""
        w = orthogonal(d_out, d_in, self.rng)
        gram = w.T @ w if d_out >= d_in else w @ w.T
        np.testing.assert_allclose(gram, np.eye(min(d_out, d_in)), atol=1e-12)

    def test_hadamard_needs_power_of_two(self):
        """Test a Hadamard baseline of size 6 is refused."""
        with pytest.raises(UnsupportedSizeError, match="size must be a power of two"):
            baseline(InitSpec(method="hadamard"), 6, 6)

    def test_hadamard_needs_square(self):
        """Test a rectangular Hadamard baseline is refused."""
        with pytest.raises(UnsupportedSizeError):
            baseline(InitSpec(method="hadamard"), 8, 4)

    def test_partial_hadamard_block(self):
        """Hadamard sized by the output, zero columns past it."""
        w = partial_hadamard(3, 5)
        assert w.shape == (3, 5)
        assert w[0, 0] == pytest.approx(0.5)
        np.testing.assert_array_equal(w[:, 4], np.zeros(3))

    def test_partial_hadamard_growing_has_orthonormal_columns(self):
        """Test a tall partial Hadamard has orthonormal columns."""
        w = partial_hadamard(8, 2)
        np.testing.assert_allclose(w.T @ w, np.eye(2), atol=1e-12)

    def test_partial_hadamard_pair_spans_different_spaces(self):
        """Test the expanding and contracting blocks do not share a column space."""
        grow, shrink = partial_hadamard(32, 8), partial_hadamard(8, 32)
        assert numerical_rank(np.hstack([grow, shrink.T])) == 16

    def test_zero_and_partial_identity(self):
        """Test the zero and partial-identity baselines."""
        np.testing.assert_array_equal(baseline(InitSpec(method="zero"), 2, 3), np.zeros((2, 3)))
        np.testing.assert_array_equal(baseline(InitSpec(method="partial_identity"), 2, 3), np.eye(2, 3))


class TestInitSpec:
    """Test initializer spec validation and dispatch."""

    def test_unknown_keys_rejected(self):
        """Test extra InitSpec keys are refused."""
        with pytest.raises(ValidationError):
            InitSpec(method="idi", scale=2.0)

    def test_idiz_epsilon_positive(self):
        """Test IDIZ specs need a positive epsilon."""
        with pytest.raises(ValidationError):
            InitSpec(method="idiz", epsilon=0.0)

    def test_construct_matrix(self):
        """Test construct dispatches to IDI."""
        spec = InitSpec(method="idi", tau=1.0, loose_eps=0.0)
        np.testing.assert_array_equal(construct(spec, 4, 2), idi(4, 2))

    def test_construct_kernel_dispatch(self):
        """Test kernel methods go through construct_kernel only."""
        spec = InitSpec(method=InitMethod.CHANNEL_MAINTAIN)
        assert construct_kernel(spec, 3, 2, 2).shape == (3, 3, 2, 2)
        with pytest.raises(ValueError):
            construct(spec, 2, 2)

    def test_random_baselines_follow_seed(self):
        """Test seeded baselines are reproducible."""
        a = construct(InitSpec(method="xavier", seed=3), 5, 5)
        b = construct(InitSpec(method="xavier", seed=3), 5, 5)
        np.testing.assert_array_equal(a, b)


class TestAttention:
    """Test attention block initialization."""

    def test_projections(self):
        """Test Q, K and V are loose identities and the output is IDIZ."""
        w = init_attention(6, epsilon=1e-6, rng=Rng(7))
        for m in (w.w_q, w.w_k, w.w_v):
            assert np.max(np.abs(m - np.eye(6))) < 1e-5
        assert not np.array_equal(w.w_q, w.w_k)
        np.testing.assert_array_equal(w.w_o.sum(axis=1), np.zeros(6))
        assert np.max(np.abs(w.w_o)) == 1e-6


class TestInitNetwork:
    """Test whole-network policies."""

    def test_tau_for(self):
        """Test the ReLU gain applies to the first layer only."""
        assert tau_for(Activation.RELU, True) == pytest.approx(math.sqrt(2.0))
        assert tau_for(Activation.RELU, False) == 1.0
        assert tau_for(Activation.TANH, True) == 1.0

    def test_plain_mlp_gets_idi(self):
        """Test every plain MLP layer gets IDI."""
        net = NetworkSpec.mlp([4, 8, 3], Activation.TANH)
        params = init_network(net, InitPolicy(loose_eps=0.0))
        np.testing.assert_array_equal(params["layer0.weight"], idi(8, 4))
        np.testing.assert_array_equal(params["layer1.weight"], idi(3, 8))

    def test_first_relu_layer_scaled(self):
        """Test the first ReLU layer is scaled by sqrt(2)."""
        net = NetworkSpec.mlp([4, 4, 4], Activation.RELU)
        params = init_network(net, InitPolicy(loose_eps=0.0))
        np.testing.assert_array_equal(params["layer0.weight"], math.sqrt(2.0) * np.eye(4))
        assert init_network(net, InitPolicy(loose_eps=0.0, first_tau=1.0))["layer0.weight"][0, 0] == 1.0

    def test_residual_roles(self):
        """Test stem roles, IDIZ last layers and the gate."""
        net = NetworkSpec.residual_mlp(6, 2, Activation.RELU, stem_depth=3, gate=0.0, d_in=4, d_out=2)
        params = init_network(net, InitPolicy(loose_eps=0.0, epsilon=1e-6))
        assert params.roles["layer1.stem2"] == "stem_last"
        np.testing.assert_array_equal(params["layer1.stem2"], idiz(6, 6, 1e-6))
        np.testing.assert_array_equal(params["layer3.weight"], idiz(2, 6, 1e-6))
        assert float(params["layer1.gate"]) == 0.0

    def test_zero_stems_make_exact_identity(self):
        """Test zeroed stems make the net the identity."""
        net = NetworkSpec.residual_mlp(8, 5, Activation.RELU)
        params = init_network(net, InitPolicy(zero_stems=True))
        x = Rng(8).normal(0.0, 1.0, (4, 8))
        np.testing.assert_array_equal(forward(net, params, x).output, x)

    def test_baseline_policy_applies_everywhere(self):
        """Test a baseline policy reaches every weight."""
        net = NetworkSpec.residual_mlp(4, 2, Activation.RELU)
        params = init_network(net, InitPolicy(method="zero"))
        assert all(not np.any(params[n]) for n in params.names())

    def test_conv_channel_scheme(self):
        """Test the channel scheme for conv layers."""
        net = NetworkSpec((Conv2D(3, 2, 2),))
        params = init_network(net, InitPolicy(conv_scheme="channel"))
        np.testing.assert_array_equal(params.kernels["layer0.kernel"].data, channel_maintain(3, 2, 2).data)

    def test_unknown_policy(self):
        """Test an unknown policy is refused."""
        with pytest.raises(ValueError):
            InitPolicy(method="lsuv")

    def test_same_seed_same_params(self):
        """Test one seed gives one set of parameters."""
        net = NetworkSpec.mlp([5, 7, 3])
        a = init_network(net, InitPolicy(seed=4))
        b = init_network(net, InitPolicy(seed=4))
        for name in a.names():
            np.testing.assert_array_equal(a[name], b[name])
