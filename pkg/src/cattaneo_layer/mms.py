"""Manufactured solutions and observed-order convergence studies."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boundary_layer import rhs
from .integrator import ImexStepper
from .models import ForcingFn, IntegratorConfig, Parameters, Scheme, State
from .spectral import Grid, SpectralField, norm_Hs0, transform_forward

logger = logging.getLogger(__name__)


def exact_state(grid: Grid, t: float, amplitude: float = 1.0) -> State:
    """u* = A e^{-t} sin(x) sin(pi y), b1* = A e^{-t} cos(x) sin(pi y) with their t-derivatives."""
    X, Y = grid.mesh()
    xi = 2.0 * np.pi / grid.L_x
    profile = amplitude * math.exp(-t) * np.sin(np.pi * Y / grid.L_y)
    u = transform_forward(np.sin(xi * X) * profile, grid)
    b1 = transform_forward(np.cos(xi * X) * profile, grid)
    return State(u, -u, b1, -b1, t).with_dirichlet()


def _forcing_on(grid: Grid, params: Parameters, t: float, amplitude: float) -> tuple[
    SpectralField, SpectralField
]:
    """Source terms that make the exact state solve the discrete equations on `grid`."""
    exact = exact_state(grid, t, amplitude)
    tendency = rhs(exact, params)
    # second time derivatives of e^{-t} profiles equal the profiles themselves
    f_u = (exact.u - tendency.dut) * params.J
    f_b = (exact.b1 - tendency.db1t) * params.magnetic_inertia
    return f_u.with_dirichlet(), f_b.with_dirichlet()


def mms_forcing(
    params: Parameters,
    grid: Grid,
    amplitude: float = 1.0,
    reference_n_y: Optional[int] = None,
) -> ForcingFn:
    """Forcing callback for IntegratorConfig.mms_forcing.

    Without reference_n_y the source is built from the same discrete operators the
    solver uses, so only the time discretisation error remains. With reference_n_y
    the source is built on a finer y-grid and restricted, which exposes the spatial
    error of the solver grid.
    """
    if amplitude == 0.0:
        zero = SpectralField.zeros(grid)
        return lambda t: (zero, zero)
    if reference_n_y is None:
        return lambda t: _forcing_on(grid, params, t, amplitude)
    if (reference_n_y - 1) % (grid.n_y - 1):
        raise ValueError(
            f"reference n_y={reference_n_y} does not nest grid n_y={grid.n_y}"
        )
    fine = Grid(grid.n_x, reference_n_y, grid.L_x, grid.L_y)
    stride = (reference_n_y - 1) // (grid.n_y - 1)

    def restricted(t: float) -> tuple[SpectralField, SpectralField]:
        f_u, f_b = _forcing_on(fine, params, t, amplitude)
        return (
            SpectralField(grid, f_u.coeffs[:, ::stride].copy()),
            SpectralField(grid, f_b.coeffs[:, ::stride].copy()),
        )

    return restricted


def solution_error(state: State, amplitude: float = 1.0) -> float:
    """Largest L2 error of u and b1 against the manufactured solution."""
    exact = exact_state(state.grid, state.t, amplitude)
    return max(norm_Hs0(state.u - exact.u, 0.0), norm_Hs0(state.b1 - exact.b1, 0.0))


def run_manufactured(
    params: Parameters,
    grid: Grid,
    dt: float,
    t_end: float,
    scheme: Scheme = Scheme.IMEX_CN_AB2,
    amplitude: float = 1.0,
    reference_n_y: Optional[int] = None,
) -> float:
    """Integrate from the exact initial data and return the final error."""
    cfg = IntegratorConfig(
        dt=dt,
        t_end=t_end,
        scheme=scheme,
        mms_forcing=mms_forcing(params, grid, amplitude, reference_n_y),
    )
    stepper = ImexStepper(params, grid, cfg)
    state = exact_state(grid, 0.0, amplitude)
    for n in range(1, cfg.n_steps + 1):
        state = stepper.step(state).at_time(n * dt)
    return solution_error(state, amplitude)


def observed_orders(resolutions: Sequence[float], errors: Sequence[float]) -> list[float]:
    """Pairwise log(e1/e2)/log(r1/r2); nan where an error vanishes."""
    orders = []
    for (r1, e1), (r2, e2) in zip(zip(resolutions, errors), zip(resolutions[1:], errors[1:])):
        if e1 > 0 and e2 > 0:
            orders.append(math.log(e1 / e2) / math.log(r1 / r2))
        else:
            orders.append(math.nan)
    return orders


@dataclass
class ConvergenceStudy:
    kind: str
    resolutions: list[float]
    errors: list[float]
    orders: list[float] = field(default_factory=list)

    def within(self, low: float = 1.8, high: float = 2.2) -> bool:
        return bool(self.orders) and all(low <= p <= high for p in self.orders)


def temporal_study(
    params: Parameters,
    grid: Grid,
    dt_values: Sequence[float],
    t_end: float = 0.5,
    amplitude: float = 1.0,
) -> ConvergenceStudy:
    errors = [run_manufactured(params, grid, dt, t_end, amplitude=amplitude) for dt in dt_values]
    study = ConvergenceStudy("time", list(dt_values), errors, observed_orders(dt_values, errors))
    logger.info("Temporal errors %s orders %s", errors, study.orders)
    return study


def spatial_study(
    params: Parameters,
    n_y_values: Sequence[int],
    n_x: int = 16,
    dt: float = 5.0e-4,
    t_end: float = 0.25,
    reference_n_y: int = 1025,
    amplitude: float = 1.0,
) -> ConvergenceStudy:
    spacings = [1.0 / (n - 1) for n in n_y_values]
    errors = [
        run_manufactured(
            params, Grid(n_x, n), dt, t_end, amplitude=amplitude, reference_n_y=reference_n_y
        )
        for n in n_y_values
    ]
    study = ConvergenceStudy("space", spacings, errors, observed_orders(spacings, errors))
    logger.info("Spatial errors %s orders %s", errors, study.orders)
    return study
