"""Tests for field reconstruction, pressure recovery and the right-hand side."""

import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid

from cattaneo_layer.boundary_layer import (
    NonFiniteStateError,
    divergence_residual,
    reconstruct,
    reconstruct_b2,
    reconstruct_e,
    reconstruct_v,
    recover_pressure,
    rhs,
)
from cattaneo_layer.models import Parameters, State
from cattaneo_layer.spectral import Grid, SpectralField, dx, dyy


def field(grid, func):
    return SpectralField.from_function(grid, func)


def manufactured_state(grid):
    """u = sin x sin(pi y), b1 = cos x sin(pi y), b1t = sin x sin(pi y) / 2."""
    u = field(grid, lambda X, Y: np.sin(X) * np.sin(np.pi * Y))
    b1 = field(grid, lambda X, Y: np.cos(X) * np.sin(np.pi * Y))
    b1t = u * 0.5
    return State(u, SpectralField.zeros(grid), b1, b1t).with_dirichlet()


class TestReconstruction:
    """Test v, b2 and e from the divergence-free relations."""

    def test_zero_input(self, small_grid):
        """Zero fields reconstruct to zero."""
        z = SpectralField.zeros(small_grid)
        for f in (reconstruct_v(z), reconstruct_b2(z), reconstruct_e(z)):
            assert np.all(f.coeffs == 0)

    def test_v_from_linear_profile(self, small_grid):
        """u = sin(x) y gives v = -cos(x) y^2 / 2 exactly."""
        u = field(small_grid, lambda X, Y: np.sin(X) * Y)
        X, Y = small_grid.mesh()
        np.testing.assert_allclose(reconstruct_v(u).values(), -np.cos(X) * Y**2 / 2, atol=1e-14)

    def test_b2_mirrors_v(self, small_grid):
        """reconstruct_b2 applies the same relation to b1."""
        b1 = field(small_grid, lambda X, Y: np.cos(2 * X) * Y)
        np.testing.assert_array_equal(reconstruct_b2(b1).coeffs, reconstruct_v(b1).coeffs)

    def test_x_independent_gives_zero(self, small_grid):
        """No x-variation means no transverse velocity."""
        u = field(small_grid, lambda X, Y: np.sin(np.pi * Y) + 0 * X)
        assert np.all(reconstruct_v(u).coeffs == 0)

    def test_e_from_constant(self, small_grid):
        """b1t = 1 gives e = -y exactly."""
        one = field(small_grid, lambda X, Y: np.ones_like(X))
        _, Y = small_grid.mesh()
        np.testing.assert_allclose(reconstruct_e(one).values(), -Y, atol=1e-14)

    def test_e_converges_second_order(self):
        """b1t = cos(pi y) gives e = -sin(pi y)/pi with O(h^2) error."""
        errors = []
        for n_y in (33, 65):
            grid = Grid(8, n_y)
            b1t = field(grid, lambda X, Y: np.cos(np.pi * Y) + 0 * X)
            _, Y = grid.mesh()
            err = np.max(np.abs(reconstruct_e(b1t).values() + np.sin(np.pi * Y) / np.pi))
            errors.append(err)
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)

    def test_traces_vanish_at_bottom(self, random_states):
        """v, b2 and e are zero at y = 0."""
        d = reconstruct(random_states[0], Parameters())
        for f in (d.v, d.b2, d.e):
            assert np.all(f.coeffs[:, 0] == 0)


class TestDivergence:
    """Test the divergence-free property of the reconstruction."""

    def test_staggered_residual_is_roundoff(self, rng):
        """The compatible form vanishes to round-off on (64, 129)."""
        from cattaneo_layer.initial_data import random_state

        grid = Grid(64, 129)
        for _ in range(3):
            state = random_state(rng, grid)
            for a in (state.u, state.b1):
                scale = np.max(np.abs(dx(a).coeffs))
                assert divergence_residual(a, reconstruct_v(a), staggered=True) <= 1e-6 * scale

    def test_collocated_residual_is_second_order(self, random_states):
        """Interior |d_x u + d_y v| <= 5 h^2 max|d_x d_yy u|."""
        for state in random_states:
            u = state.u
            h = u.grid.h_y
            scale = np.max(np.abs(dyy(dx(u)).coeffs))
            assert divergence_residual(u, reconstruct_v(u)) <= 5 * h**2 * scale


class TestPressure:
    """Test the wall-normal pressure integration."""

    def test_gauge_at_top_wall(self, random_states):
        """p vanishes identically on y = 1."""
        state = random_states[1]
        d = reconstruct(state, Parameters(H=2.0))
        assert np.all(d.p.coeffs[:, -1] == 0)

    def test_zero_b1_gives_zero_pressure(self, random_states):
        """Every term of the balance carries b1."""
        s = random_states[2]
        state = State(s.u, s.ut, SpectralField.zeros(s.grid), s.b1t)
        d = reconstruct(state, Parameters())
        assert np.max(np.abs(d.p.coeffs)) == 0
        assert np.max(np.abs(d.dpx.coeffs)) == 0

    def test_no_magnetic_coupling_gives_zero_pressure(self, random_states):
        """H = 0 switches the pressure off."""
        d = reconstruct(random_states[0], Parameters(H=0.0))
        assert np.all(d.p.coeffs == 0)

    def test_matches_dense_quadrature(self):
        """Single-mode data agrees with a fine-grid quadrature of the closed-form integrand."""
        grid = Grid(16, 129)
        state = manufactured_state(grid)
        params = Parameters(H=1.5)
        d = reconstruct(state, params)
        p, _ = recover_pressure(state, d.v, d.b2, d.e, params)

        x = grid.x_nodes[:, None]
        y = np.linspace(0.0, 1.0, 2049)[None, :]
        u = np.sin(x) * np.sin(np.pi * y)
        b1 = np.cos(x) * np.sin(np.pi * y)
        v = -np.cos(x) * (1 - np.cos(np.pi * y)) / np.pi
        b2 = np.sin(x) * (1 - np.cos(np.pi * y)) / np.pi
        e = -0.5 * np.sin(x) * (1 - np.cos(np.pi * y)) / np.pi
        q = params.H**2 * (b1 * b2 * u - b1**2 * v + b1 * e)
        primitive = cumulative_trapezoid(q, y[0], axis=1, initial=0.0)
        oracle = (primitive - primitive[:, -1:])[:, ::16]

        assert np.max(np.abs(p.values() - oracle)) <= 1e-3 * np.max(np.abs(oracle))


class TestRhs:
    """Test the right-hand side of the reduced system."""

    def test_zero_state(self, small_grid, mixed_params):
        """The zero state is a fixed point."""
        out = rhs(State.zeros(small_grid), mixed_params)
        for c in out.components():
            assert np.all(c.coeffs == 0)

    def test_first_order_form(self, random_states, unit_params):
        """du = ut and db1 = b1t."""
        state = random_states[0]
        out = rhs(state, unit_params)
        assert out.du is state.ut
        assert out.db1 is state.b1t

    def test_pure_magnetic_profile(self, mixed_params):
        """u = 0, b1 = sin(pi y) cos(x): dut = 0 and db1t = dyy(b1) / kappa."""
        grid = Grid(16, 33)
        b1 = field(grid, lambda X, Y: np.cos(X) * np.sin(np.pi * Y)).with_dirichlet()
        z = SpectralField.zeros(grid)
        out = rhs(State(z, z, b1, z), mixed_params)
        assert np.all(out.dut.coeffs == 0)
        np.testing.assert_allclose(
            out.db1t.coeffs, dyy(b1).coeffs / mixed_params.kappa, rtol=1e-12, atol=1e-14
        )

    def test_zero_b1_is_invariant(self, random_states, mixed_params):
        """With b1 = b1t = 0 the magnetic tendency vanishes."""
        s = random_states[3]
        z = SpectralField.zeros(s.grid)
        out = rhs(State(s.u, s.ut, z, z), mixed_params)
        assert np.max(np.abs(out.db1t.coeffs)) == 0

    def test_x_independent_state(self, mixed_params):
        """x-independent data feels no pressure and reduces to damped wave diffusion."""
        grid = Grid(16, 33)
        u = field(grid, lambda X, Y: np.sin(np.pi * Y) + 0 * X).with_dirichlet()
        ut = u * 0.3
        b1 = field(grid, lambda X, Y: np.sin(2 * np.pi * Y) + 0 * X).with_dirichlet()
        state = State(u, ut, b1, SpectralField.zeros(grid))
        d = reconstruct(state, mixed_params)
        assert np.all(d.dpx.coeffs == 0)
        out = rhs(state, mixed_params)
        expected = ((dyy(u) - ut) / mixed_params.J).with_dirichlet()
        np.testing.assert_allclose(out.dut.coeffs, expected.coeffs, atol=1e-12)

    def test_walls_are_zeroed(self, random_states, unit_params):
        out = rhs(random_states[4], unit_params)
        assert np.all(out.dut.coeffs[:, [0, -1]] == 0)
        assert np.all(out.db1t.coeffs[:, [0, -1]] == 0)

    def test_non_finite_state_raises(self, small_grid, unit_params):
        """NaN in the state is reported, not propagated."""
        bad = SpectralField.zeros(small_grid).coeffs.copy()
        bad[1, 5] = np.nan
        z = SpectralField.zeros(small_grid)
        with pytest.raises(NonFiniteStateError):
            rhs(State(SpectralField(small_grid, bad), z, z, z), unit_params)
