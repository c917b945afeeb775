"""Tests for the Fourier/finite-difference field representation."""

import math

import numpy as np
import pytest

from cattaneo_layer.initial_data import random_field
from cattaneo_layer.spectral import (
    AmplificationOverflowError,
    Grid,
    SpectralField,
    apply_multiplier,
    dx,
    dy,
    dyy,
    inner_Hs0,
    integrate_from_0,
    multiply,
    norm_Hs0,
    physical_l2,
    resample,
    transform_backward,
    transform_forward,
)


class TestGrid:
    """Test grid construction and derived quantities."""

    def test_rejects_odd_n_x(self):
        """An odd number of x-points is refused."""
        with pytest.raises(ValueError, match="n_x"):
            Grid(15, 33)

    def test_rejects_too_few_y_nodes(self):
        """At least one interior y-node is required."""
        with pytest.raises(ValueError, match="n_y"):
            Grid(16, 2)

    def test_spacing_and_wavenumbers(self):
        """h_y = 1/(n_y-1) and xi_k = k on the 2 pi periodic domain."""
        grid = Grid(8, 11)
        assert grid.h_y == pytest.approx(0.1)
        assert list(grid.mode_numbers) == [0, 1, 2, 3, 4, -3, -2, -1]
        assert grid.xi_max == pytest.approx(4.0)

    def test_dealias_mask_keeps_two_thirds(self):
        """Modes with |k| <= n_x/3 survive the 2/3 rule."""
        grid = Grid(12, 5)
        kept = grid.mode_numbers[grid.dealias_mask()]
        assert set(np.abs(kept).astype(int)) == {0, 1, 2, 3, 4}


class TestTransforms:
    """Test forward and backward transforms."""

    def test_zero_row_is_x_mean(self, small_grid):
        """The k = 0 coefficient is the mean over x at each y-node."""
        X, Y = small_grid.mesh()
        values = 3.0 + np.cos(X) * Y
        f = transform_forward(values, small_grid)
        np.testing.assert_allclose(f.coeffs[0].real, 3.0, atol=1e-14)

    def test_backward_inverts_forward(self, small_grid):
        """A real field survives forward then backward to round-off."""
        X, Y = small_grid.mesh()
        values = np.sin(2 * X) * Y * (1 - Y) + np.cos(X)
        back = transform_backward(transform_forward(values, small_grid))
        np.testing.assert_allclose(back, values, atol=1e-14)

    def test_shape_mismatch_raises(self, small_grid):
        """Values of the wrong shape are rejected."""
        with pytest.raises(ValueError, match="shape"):
            transform_forward(np.zeros((4, 4)), small_grid)

    def test_grid_mismatch_in_arithmetic(self):
        """Adding fields from different grids fails."""
        a = SpectralField.zeros(Grid(16, 33))
        b = SpectralField.zeros(Grid(16, 17))
        with pytest.raises(ValueError, match="grid mismatch"):
            _ = a + b

    def test_resample_up_then_down(self, small_grid):
        """Zero padding followed by truncation restores the field."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.cos(3 * X) * Y + np.sin(X))
        back = resample(resample(f, 2 * small_grid.n_x), small_grid.n_x)
        np.testing.assert_allclose(back.coeffs, f.coeffs, atol=1e-15)

    def test_resample_preserves_values(self, small_grid):
        """The padded field interpolates the same trigonometric polynomial."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.cos(2 * X) * Y)
        wide = resample(f, 32)
        X, Y = wide.grid.mesh()
        np.testing.assert_allclose(wide.values(), np.cos(2 * X) * Y, atol=1e-14)


class TestDerivatives:
    """Test x- and y-derivatives and the y-antiderivative."""

    def test_dx_of_sine(self, small_grid):
        """d_x sin(x) = cos(x) exactly for resolved modes."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.sin(X) * Y)
        X, Y = small_grid.mesh()
        np.testing.assert_allclose(dx(f).values(), np.cos(X) * Y, atol=1e-13)

    def test_dy_exact_for_quadratics(self, small_grid):
        """Second-order differences differentiate y^2 exactly, walls included."""
        f = SpectralField.from_function(small_grid, lambda X, Y: Y**2)
        _, Y = small_grid.mesh()
        np.testing.assert_allclose(dy(f).values(), 2 * Y, atol=1e-12)

    def test_dyy_interior_and_walls(self, small_grid):
        """d_yy y^2 = 2 on interior nodes; the wall rows are zero."""
        f = SpectralField.from_function(small_grid, lambda X, Y: Y**2)
        out = dyy(f).values()
        np.testing.assert_allclose(out[:, 1:-1], 2.0, atol=1e-9)
        assert np.all(out[:, [0, -1]] == 0.0)

    @pytest.mark.parametrize(
        ("op", "exact"),
        [
            (dy, lambda Y: np.pi * np.cos(np.pi * Y)),
            (dyy, lambda Y: -(np.pi**2) * np.sin(np.pi * Y)),
        ],
    )
    def test_second_order_refinement(self, op, exact):
        """Halving h_y divides the error on sin(pi y) by about 4."""
        errors = []
        for n_y in (33, 65):
            grid = Grid(8, n_y)
            f = SpectralField.from_function(grid, lambda X, Y: np.sin(np.pi * Y) + 0 * X)
            _, Y = grid.mesh()
            diff = op(f).values() - exact(Y)
            errors.append(np.max(np.abs(diff[:, 1:-1] if op is dyy else diff)))
        assert 3.5 <= errors[0] / errors[1] <= 4.5

    def test_integrate_from_zero(self, small_grid):
        """The antiderivative of 1 is y and vanishes at the wall."""
        one = SpectralField.from_function(small_grid, lambda X, Y: np.ones_like(Y))
        _, Y = small_grid.mesh()
        out = integrate_from_0(one).values()
        np.testing.assert_allclose(out, Y, atol=1e-14)
        assert np.all(out[:, 0] == 0.0)


class TestProducts:
    """Test the dealiased product."""

    def test_resolved_product_is_exact(self, small_grid):
        """sin(x) cos(x) = sin(2x)/2 when both factors and the product are resolved."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.sin(X) * np.ones_like(Y))
        g = SpectralField.from_function(small_grid, lambda X, Y: np.cos(X) * Y)
        X, Y = small_grid.mesh()
        np.testing.assert_allclose(multiply(f, g).values(), 0.5 * np.sin(2 * X) * Y, atol=1e-14)

    def test_product_has_no_modes_beyond_band(self, small_grid):
        """Output modes above n_x/3 are zero."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.cos(5 * X) + 0 * Y)
        out = multiply(f, f)
        assert np.all(out.coeffs[~small_grid.dealias_mask()] == 0.0)


class TestNorms:
    """Test the anisotropic norms and the analytic multiplier."""

    def test_single_mode_norm(self, small_grid):
        """||cos x||_{H^{s,0}} on [0,1] is sqrt(1/2) 2^s."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.cos(X) + 0 * Y)
        for s in (0.0, 1.0, 2.5):
            assert norm_Hs0(f, s) == pytest.approx(math.sqrt(0.5) * 2.0**s, rel=1e-12)

    def test_zero_order_norm_matches_physical(self, small_grid):
        """Parseval: the s = 0 norm equals the physical L2 norm."""
        X, Y = small_grid.mesh()
        values = np.sin(X) * Y + np.cos(3 * X) * Y**2
        f = transform_forward(values, small_grid)
        assert norm_Hs0(f, 0.0) == pytest.approx(physical_l2(values, small_grid), rel=1e-12)

    def test_inner_product_consistent_with_norm(self, small_grid):
        """<f, f>_s = ||f||_s^2."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.sin(2 * X) * Y)
        assert inner_Hs0(f, f, 1.5) == pytest.approx(norm_Hs0(f, 1.5) ** 2, rel=1e-12)

    def test_distinct_modes_are_orthogonal(self, small_grid):
        f = SpectralField.from_function(small_grid, lambda X, Y: np.cos(X) * Y)
        g = SpectralField.from_function(small_grid, lambda X, Y: np.cos(2 * X) * Y)
        assert inner_Hs0(f, g, 2.0) == pytest.approx(0.0, abs=1e-14)

    def test_cauchy_schwarz(self, small_grid, rng):
        """|<f, g>_s| <= ||f||_s ||g||_s on random fields."""
        for s in (0.0, 1.5, 3.0):
            f = random_field(rng, small_grid)
            g = random_field(rng, small_grid)
            bound = norm_Hs0(f, s) * norm_Hs0(g, s)
            assert abs(inner_Hs0(f, g, s)) <= bound * (1 + 1e-12)

    def test_multiplier_semigroup(self, small_grid, rng):
        """Applying tau1 then tau2 equals applying tau1 + tau2."""
        f = random_field(rng, small_grid)
        twice = apply_multiplier(apply_multiplier(f, 0.3), 0.45)
        once = apply_multiplier(f, 0.75)
        np.testing.assert_allclose(twice.coeffs, once.coeffs, rtol=1e-12, atol=0.0)

    def test_multiplier_scales_modes(self, small_grid):
        """e^{tau(1+|D_x|)} multiplies the k = 1 mode by e^{2 tau}."""
        f = SpectralField.from_function(small_grid, lambda X, Y: np.cos(X) + 0 * Y)
        out = apply_multiplier(f, 0.5)
        np.testing.assert_allclose(out.coeffs, f.coeffs * math.e, atol=1e-14)

    def test_zero_radius_is_identity(self, small_grid):
        f = SpectralField.from_function(small_grid, lambda X, Y: np.sin(X) * Y)
        np.testing.assert_array_equal(apply_multiplier(f, 0.0).coeffs, f.coeffs)

    def test_negative_radius_refused(self, small_grid):
        """Negative radii need allow_negative."""
        f = SpectralField.zeros(small_grid)
        with pytest.raises(ValueError):
            apply_multiplier(f, -0.1)
        apply_multiplier(f, -0.1, allow_negative=True)

    def test_overflow_guard(self, small_grid):
        """tau (1 + |xi_max|) above 700 raises before any overflow."""
        f = SpectralField.zeros(small_grid)
        with pytest.raises(AmplificationOverflowError):
            apply_multiplier(f, 100.0)
