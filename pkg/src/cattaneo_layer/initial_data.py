"""Initial data presets and seeded random analytic fields."""

import logging
from typing import Callable, Optional

import numpy as np

from .energy import constants, smallness_lhs
from .models import Parameters, State
from .spectral import Grid, SpectralField, transform_forward

logger = logging.getLogger(__name__)


def poisson_profile(grid: Grid, radius: float, shift: float = 0.0) -> np.ndarray:
    """Periodic x-profile whose coefficients are exactly e^{-radius |xi_k|} for |k| <= n_x/3."""
    x = grid.x_nodes - shift
    k_max = grid.n_x // 3
    xi = 2.0 * np.pi * np.arange(1, k_max + 1) / grid.L_x
    return 1.0 + 2.0 * np.sum(np.exp(-radius * xi)[:, None] * np.cos(np.outer(xi, x)), axis=0)


def _tensor(grid: Grid, profile_x: np.ndarray, profile_y: np.ndarray) -> SpectralField:
    return transform_forward(np.outer(profile_x, profile_y), grid)


def _zero(grid: Grid) -> State:
    return State.zeros(grid)


def _analytic(grid: Grid) -> State:
    y = grid.y_nodes / grid.L_y
    u = _tensor(grid, poisson_profile(grid, 2.0), np.sin(np.pi * y))
    ut = _tensor(grid, poisson_profile(grid, 2.0, shift=0.5), np.sin(np.pi * y)) * -0.5
    b1 = _tensor(grid, poisson_profile(grid, 2.0, shift=1.0), np.sin(2.0 * np.pi * y))
    b1t = SpectralField.zeros(grid)
    return State(u, ut, b1, b1t).with_dirichlet()


def _single_mode(grid: Grid) -> State:
    x, y = grid.x_nodes, grid.y_nodes / grid.L_y
    xi = 2.0 * np.pi / grid.L_x
    u = _tensor(grid, np.cos(xi * x), np.sin(np.pi * y))
    b1 = _tensor(grid, np.sin(xi * x), np.sin(np.pi * y))
    z = SpectralField.zeros(grid)
    return State(u, z, b1, z).with_dirichlet()


PRESETS: dict[str, Callable[[Grid], State]] = {
    "zero": _zero,
    "analytic": _analytic,
    "single_mode": _single_mode,
}


def get_preset(
    name: str,
    grid: Grid,
    params: Parameters,
    amplitude: float = 0.5,
    relative: bool = True,
) -> State:
    """Build a named initial state.

    Args:
        name: One of PRESETS.
        grid: Target grid.
        params: Model constants (used for the smallness scale).
        amplitude: Absolute factor, or fraction of delta_small when relative.
        relative: Scale so the smallness sum equals amplitude * delta_small.
    """
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    state = PRESETS[name](grid)
    if relative:
        size = smallness_lhs(state, params)
        if size == 0.0:
            return state
        target = amplitude * constants(params).delta_small
        logger.info("Scaling preset %s to %.3e (raw size %.3e)", name, target, size)
        return state.scaled(target / size)
    return state.scaled(amplitude)


# ============================================================================
# Random analytic fields
# ============================================================================


def random_field(
    rng: np.random.Generator,
    grid: Grid,
    radius: float = 1.5,
    n_y_modes: int = 4,
    walls: str = "both",
) -> SpectralField:
    """Random real field, analytic in x with the given radius.

    Args:
        rng: Source of randomness.
        grid: Target grid.
        radius: Coefficients decay like e^{-radius |xi|}.
        n_y_modes: Number of y-harmonics mixed per x-mode.
        walls: "both" vanishes at y=0 and y=L_y, "bottom" only at y=0, "none" is unrestricted.
    """
    y = grid.y_nodes / grid.L_y
    if walls == "both":
        basis = [np.sin((m + 1) * np.pi * y) for m in range(n_y_modes)]
    elif walls == "bottom":
        basis = [y * np.cos(m * np.pi * y) for m in range(n_y_modes)]
    elif walls == "none":
        basis = [np.cos(m * np.pi * y) for m in range(n_y_modes)]
    else:
        raise ValueError(f"walls must be 'both', 'bottom' or 'none', got {walls!r}")
    x = grid.x_nodes
    values = np.zeros(grid.shape)
    for k in range(grid.n_x // 3 + 1):
        xi = 2.0 * np.pi * k / grid.L_x
        weight = np.exp(-radius * xi)
        a, b = rng.standard_normal(2)
        profile = sum(c * phi for c, phi in zip(rng.standard_normal(n_y_modes), basis))
        values += weight * np.outer(a * np.cos(xi * x) + b * np.sin(xi * x), profile)
    field = transform_forward(values, grid)
    return field.with_dirichlet() if walls == "both" else field


def random_state(
    rng: np.random.Generator,
    grid: Grid,
    radius: float = 1.5,
    amplitude: Optional[float] = None,
) -> State:
    """Random state with zero wall traces; amplitude rescales every component when given."""
    u, ut, b1, b1t = (random_field(rng, grid, radius) for _ in range(4))
    state = State(u, ut, b1, b1t)
    return state.scaled(amplitude) if amplitude is not None else state
