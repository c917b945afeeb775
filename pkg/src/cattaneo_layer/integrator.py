"""IMEX time integration of the reduced boundary-layer system."""

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from .boundary_layer import explicit_terms
from .energy import energy_report
from .models import (
    EnergyParams,
    EnergyReport,
    IntegratorConfig,
    Parameters,
    Scheme,
    State,
    Trajectory,
)
from .spectral import Grid, SpectralField, dyy, norm_Hs0

logger = logging.getLogger(__name__)

ADVECTIVE_CFL = 0.5


class DivergenceError(RuntimeError):
    """The solution left the trusted range; carries the last valid state."""

    def __init__(self, message: str, last_state: State, step: int):
        super().__init__(message)
        self.last_state = last_state
        self.step = step


def dt_stability(params: Parameters, grid: Grid, state: Optional[State] = None) -> float:
    """Advisory time step: relaxation time scales and an advective CFL bound."""
    limits = [0.5 * math.sqrt(params.J), 0.5 * math.sqrt(params.magnetic_inertia)]
    if state is not None:
        u_max = float(np.max(np.abs(state.u.values())))
        if u_max > 0:
            limits.append(ADVECTIVE_CFL / (u_max * grid.xi_max))
    return min(limits)


class ImexStepper:
    """Crank-Nicolson (or backward Euler) for damping and diffusion, AB2 for the rest.

    For each of the two hyperbolic equations, written as c w' = -w + d A u + N with
    u' = w, the implicit stage reduces to one tridiagonal system in w per Fourier
    mode. The matrix is shared by all modes, so every mode is solved in a single
    banded call with the modes as right-hand-side columns.
    """

    def __init__(self, params: Parameters, grid: Grid, cfg: IntegratorConfig):
        self.params = params
        self.grid = grid
        self.cfg = cfg
        self._velocity_system = self._banded(params.J, 1.0)
        self._magnetic_system = self._banded(params.magnetic_inertia, 1.0 / params.Pr_m)
        self._history: Optional[tuple[SpectralField, SpectralField]] = None
        self.steps_taken = 0

    def reset(self) -> None:
        self._history = None
        self.steps_taken = 0

    def _banded(self, inertia: float, diffusivity: float) -> np.ndarray:
        dt, h = self.cfg.dt, self.grid.h_y
        if self.cfg.scheme is Scheme.IMEX_CN_AB2:
            diag = inertia + 0.5 * dt + 0.5 * dt**2 * diffusivity / h**2
            off = -0.25 * dt**2 * diffusivity / h**2
        else:
            diag = inertia + dt + 2.0 * dt**2 * diffusivity / h**2
            off = -(dt**2) * diffusivity / h**2
        # strictly diagonally dominant for dt > 0, h > 0
        assert diag > 2.0 * abs(off)
        m = self.grid.n_y - 2
        ab = np.zeros((3, m))
        ab[0, 1:] = off
        ab[1, :] = diag
        ab[2, :-1] = off
        return ab

    def _explicit(self, state: State) -> tuple[SpectralField, SpectralField]:
        if self.cfg.linear_only:
            mom = ind = SpectralField.zeros(self.grid)
        else:
            terms = explicit_terms(state, self.params)
            mom, ind = terms.momentum, terms.induction
        if self.cfg.mms_forcing is not None:
            f_u, f_b = self.cfg.mms_forcing(state.t)
            mom, ind = mom + f_u, ind + f_b
        return mom, ind

    def _advance(
        self,
        ab: np.ndarray,
        inertia: float,
        diffusivity: float,
        pos: SpectralField,
        vel: SpectralField,
        source: np.ndarray,
    ) -> tuple[SpectralField, SpectralField]:
        dt = self.cfg.dt
        w = vel.coeffs[:, 1:-1]
        a_pos = dyy(pos).coeffs[:, 1:-1]
        if self.cfg.scheme is Scheme.IMEX_CN_AB2:
            a_vel = dyy(vel).coeffs[:, 1:-1]
            b = (
                (inertia - 0.5 * dt) * w
                + dt * diffusivity * a_pos
                + 0.25 * dt**2 * diffusivity * a_vel
                + dt * source[:, 1:-1]
            )
        else:
            b = inertia * w + dt * diffusivity * a_pos + dt * source[:, 1:-1]
        new_vel = np.zeros_like(vel.coeffs)
        new_vel[:, 1:-1] = solve_banded((1, 1), ab, b.T).T
        vel_next = SpectralField(self.grid, new_vel)
        if self.cfg.scheme is Scheme.IMEX_CN_AB2:
            pos_next = pos + (vel_next + vel) * (0.5 * dt)
        else:
            pos_next = pos + vel_next * dt
        return pos_next.with_dirichlet(), vel_next

    def step(self, state: State) -> State:
        mom, ind = self._explicit(state)
        if not (mom.is_finite() and ind.is_finite()):
            raise DivergenceError(
                f"non-finite explicit terms at t={state.t:.6g}", state, self.steps_taken
            )
        if self.cfg.scheme is Scheme.IMEX_CN_AB2 and self._history is not None:
            prev_mom, prev_ind = self._history
            src_mom = 1.5 * mom.coeffs - 0.5 * prev_mom.coeffs
            src_ind = 1.5 * ind.coeffs - 0.5 * prev_ind.coeffs
        else:
            src_mom, src_ind = mom.coeffs, ind.coeffs
        self._history = (mom, ind)

        p = self.params
        u, ut = self._advance(self._velocity_system, p.J, 1.0, state.u, state.ut, src_mom)
        b1, b1t = self._advance(
            self._magnetic_system, p.magnetic_inertia, 1.0 / p.Pr_m, state.b1, state.b1t, src_ind
        )
        new = State(u, ut, b1, b1t, state.t + self.cfg.dt)
        self.steps_taken += 1

        if not new.is_finite():
            raise DivergenceError(
                f"non-finite state after step {self.steps_taken}", state, self.steps_taken
            )
        largest = max(norm_Hs0(c, 0.0) for c in new.components())
        if largest > self.cfg.max_norm_guard:
            raise DivergenceError(
                f"norm {largest:.3e} exceeds guard {self.cfg.max_norm_guard:.3e} "
                f"at step {self.steps_taken}",
                state,
                self.steps_taken,
            )
        return new


def step(state: State, params: Parameters, cfg: IntegratorConfig) -> State:
    """Single step from rest history (the AB2 part starts with an Euler bootstrap)."""
    return ImexStepper(params, state.grid, cfg).step(state)


def simulate(
    initial: State,
    params: Parameters,
    cfg: IntegratorConfig,
    monitor_every: int = 1,
    energy_params: Optional[EnergyParams] = None,
    on_report: Optional[Callable[[State, EnergyReport], None]] = None,
) -> Trajectory:
    """Integrate to cfg.t_end, keeping a snapshot and an EnergyReport every monitor_every steps.

    Args:
        initial: Initial state; must vanish on both walls.
        params: Model constants.
        cfg: Integrator settings.
        monitor_every: Snapshot spacing in steps; the final step is always kept.
        energy_params: Weight schedule, started at initial.t; derived from params when omitted.
        on_report: Called with every recorded snapshot and its report.
    """
    if monitor_every < 1:
        raise ValueError(f"monitor_every must be at least 1, got {monitor_every}")
    if initial.max_wall_trace() > 0:
        raise ValueError("initial data must vanish at y=0 and y=1")
    grid = initial.grid
    ep = energy_params or EnergyParams.from_parameters(params)

    advisory = dt_stability(params, grid, initial)
    if cfg.dt > advisory:
        logger.warning("dt=%.3g exceeds the stability advisory %.3g", cfg.dt, advisory)

    traj = Trajectory(params=params, grid=grid, config=cfg)

    def record(state: State) -> None:
        report = energy_report(state, params, ep, t0=initial.t)
        traj.snapshots.append(state)
        traj.reports.append(report)
        logger.debug("t=%.4f Es=%.6e Ds_half=%.6e", state.t, report.Es, report.Ds_half)
        if on_report is not None:
            on_report(state, report)

    n_steps = cfg.n_steps
    logger.info(
        "Integrating %d steps of dt=%.3g with %s on grid %dx%d",
        n_steps, cfg.dt, cfg.scheme.value, grid.n_x, grid.n_y,
    )
    stepper = ImexStepper(params, grid, cfg)
    state = initial
    record(state)
    for n in range(1, n_steps + 1):
        state = stepper.step(state).at_time(initial.t + n * cfg.dt)
        if n % monitor_every == 0 or n == n_steps:
            record(state)
    logger.info("Finished at t=%.4f with %d snapshots", state.t, len(traj.snapshots))
    return traj
