"""Pytest configuration and fixtures for the cattaneo-layer tests."""

import numpy as np
import pytest

from cattaneo_layer.energy import constants
from cattaneo_layer.initial_data import get_preset, random_state
from cattaneo_layer.integrator import simulate
from cattaneo_layer.models import EnergyParams, IntegratorConfig, Parameters
from cattaneo_layer.spectral import Grid


@pytest.fixture
def small_grid():
    """Coarse grid for fast unit tests."""
    return Grid(16, 33)


@pytest.fixture
def unit_params():
    """J = kappa = Pr_m = tau0 = H = 1, s = 3."""
    return Parameters()


@pytest.fixture
def mixed_params():
    """A parameter point where every constant differs from one."""
    return Parameters(H=0.7, J=2.0, kappa=0.5, Pr_m=1.5, tau0=0.8, s=2.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_states(rng):
    """Five random analytic states on a (32, 65) grid."""
    grid = Grid(32, 65)
    return [random_state(rng, grid, radius=rng.uniform(1.0, 2.0)) for _ in range(5)]


@pytest.fixture(scope="session")
def acceptance_run():
    """The acceptance trajectory: analytic data at half the smallness scale, t in [0, 10].

    Computed once per session and shared by every test that inspects it.
    """
    params = Parameters()
    grid = Grid(64, 129)
    initial = get_preset("analytic", grid, params, amplitude=0.5)
    cfg = IntegratorConfig(dt=0.01, t_end=10.0)
    traj = simulate(initial, params, cfg, monitor_every=10)
    return {
        "params": params,
        "ep": EnergyParams.from_parameters(params),
        "ct": constants(params),
        "initial": initial,
        "trajectory": traj,
    }
