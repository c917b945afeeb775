"""Numerical checks of the weighted product law and the auxiliary inequalities."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from .energy import compute_D_suite, compute_Es, eta_weight
from .initial_data import random_field, random_state
from .models import EnergyParams, LemmaCase, Parameters, State
from .spectral import (
    Grid,
    SpectralField,
    apply_multiplier,
    dy,
    norm_Hs0,
    resample,
    transform_backward,
    transform_forward,
)

logger = logging.getLogger(__name__)

TRACE_TOLERANCE = 1.0e-12
PRODUCT_LAW_TOLERANCE = 1.0e-8

CASE_LOG_COLUMNS = ["seed", "case", "sigma1", "sigma2", "tau", "lhs", "rhs", "ratio"]


class TraceViolationError(ValueError):
    """The first factor of a product-law case does not vanish at y=0."""


def product_law_constant(sigma1: float, sigma2: float) -> float:
    return 2.0 ** (sigma1 - 0.5) / math.sqrt(sigma2 - 0.5)


def product_law_check(case: LemmaCase) -> tuple[float, float, float]:
    """(lhs, rhs, ratio) for ||(fg)_eta||_{sigma1} against the product-law bound.

    The product is formed on a grid with twice the x-points so that no product mode
    aliases; the weight is applied there before the norm is taken.
    """
    f, g = case.f, case.g
    trace = float(np.max(np.abs(f.coeffs[:, 0])))
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    if trace > TRACE_TOLERANCE * scale:
        raise TraceViolationError(f"f has trace {trace:.3e} at y=0")

    wide = 2 * f.grid.n_x
    f_wide, g_wide = resample(f, wide), resample(g, wide)
    product = transform_forward(
        transform_backward(f_wide) * transform_backward(g_wide), f_wide.grid
    )
    lhs = norm_Hs0(apply_multiplier(product, case.tau), case.sigma1)

    fy = dy(apply_multiplier(f, case.tau))
    gw = apply_multiplier(g, case.tau)
    s1, s2 = case.sigma1, case.sigma2
    rhs = product_law_constant(s1, s2) * (
        norm_Hs0(fy, s1) * norm_Hs0(gw, s2) + norm_Hs0(fy, s2) * norm_Hs0(gw, s1)
    )
    if rhs == 0.0:
        return lhs, rhs, 0.0 if lhs == 0.0 else math.inf
    return lhs, rhs, lhs / rhs


def convolution_oracle(case: LemmaCase) -> float:
    """Weighted norm of fg from a direct convolution of the x-coefficients, per y-node.

    The Nyquist row is dropped from both factors.
    """
    grid = case.f.grid
    n = grid.n_x
    # fftshift orders rows as k = -n/2, ..., n/2 - 1; row 0 is the Nyquist mode
    fc = np.fft.fftshift(case.f.coeffs, axes=0)
    gc = np.fft.fftshift(case.g.coeffs, axes=0)
    fc[0] = 0.0
    gc[0] = 0.0
    conv = np.stack([np.convolve(fc[:, j], gc[:, j]) for j in range(grid.n_y)], axis=1)
    xi = 2.0 * np.pi * np.arange(-n, n - 1) / grid.L_x
    weight = np.exp(case.tau * (1.0 + np.abs(xi))) * (1.0 + np.abs(xi)) ** case.sigma1
    per_mode = trapezoid(np.abs(conv) ** 2, dx=grid.h_y, axis=1)
    return float(np.sqrt(np.sum(weight**2 * per_mode)))


def triangle_power_check(
    sigma1: float, xi_grid: Sequence[float], eta_grid: Sequence[float]
) -> float:
    """Worst ratio of (1+|xi|)^{2s} to 2^{2s-1}[(1+|xi-eta|)^{2s} + (1+|eta|)^{2s}]."""
    if not sigma1 > 0.5:
        raise ValueError(f"sigma1 must exceed 1/2, got {sigma1}")
    xi = np.asarray(xi_grid, dtype=float)[:, None]
    eta = np.asarray(eta_grid, dtype=float)[None, :]
    p = 2.0 * sigma1
    lhs = (1.0 + np.abs(xi)) ** p
    rhs = 2.0 ** (p - 1.0) * ((1.0 + np.abs(xi - eta)) ** p + (1.0 + np.abs(eta)) ** p)
    return float(np.max(lhs / rhs))


def poincare_check(f: SpectralField, s: float) -> tuple[float, float]:
    """(||f||_{s}, ||d_y f||_{s}) for a field vanishing at y=0."""
    return norm_Hs0(f, s), norm_Hs0(dy(f), s)


@dataclass
class EnergyBoundReport:
    u_Es: tuple[float, float]
    b_Es: tuple[float, float]
    u_Ds_half: tuple[float, float]
    b_Ds_half: tuple[float, float]

    @property
    def passes(self) -> bool:
        pairs = (self.u_Es, self.b_Es, self.u_Ds_half, self.b_Ds_half)
        return all(lhs <= rhs * (1.0 + 1.0e-12) for lhs, rhs in pairs)


def energy_bound_check(state: State, params: Parameters, ep: EnergyParams) -> EnergyBoundReport:
    """Weighted norms of u and b1 against 2 sqrt(E_s) and 2 sqrt(D_{s+1/2})."""
    s = params.s
    u = eta_weight(state.u, state.t, ep)
    b = eta_weight(state.b1, state.t, ep)
    es_bound = 2.0 * math.sqrt(compute_Es(state, params, ep))
    ds_bound = 2.0 * math.sqrt(compute_D_suite(state, params, ep)[1])
    return EnergyBoundReport(
        u_Es=(norm_Hs0(u, s), es_bound),
        b_Es=(norm_Hs0(b, s), es_bound),
        u_Ds_half=(norm_Hs0(u, s + 0.5), ds_bound),
        b_Ds_half=(norm_Hs0(b, s + 0.5), ds_bound),
    )


# ============================================================================
# Randomised suites
# ============================================================================


def random_case(
    rng: np.random.Generator, grid: Grid, seed: Optional[int] = None
) -> LemmaCase:
    """Mixed-mode case with f = y * smooth, sigma2 in (0.6, sigma1], tau in [0, 1]."""
    sigma1 = rng.uniform(0.6, 3.5)
    sigma2 = rng.uniform(0.6, sigma1)
    tau = rng.uniform(0.0, 1.0)
    f = random_field(rng, grid, radius=rng.uniform(1.0, 2.0), walls="bottom")
    g = random_field(rng, grid, radius=rng.uniform(1.0, 2.0), walls="none")
    return LemmaCase(f=f, g=g, sigma1=sigma1, sigma2=sigma2, tau=tau, seed=seed)


def product_law_suite(seed: int, n_cases: int, grid: Optional[Grid] = None) -> pd.DataFrame:
    """Case log with one row per randomised case."""
    grid = grid or Grid(32, 33)
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n_cases):
        case = random_case(rng, grid, seed)
        lhs, rhs, ratio = product_law_check(case)
        logger.debug("case %d ratio %.3e", i, ratio)
        rows.append(
            {
                "seed": seed,
                "case": i,
                "sigma1": case.sigma1,
                "sigma2": case.sigma2,
                "tau": case.tau,
                "lhs": lhs,
                "rhs": rhs,
                "ratio": ratio,
            }
        )
    return pd.DataFrame(rows, columns=CASE_LOG_COLUMNS)


def energy_bound_suite(
    seed: int, n_states: int, params: Parameters, grid: Optional[Grid] = None
) -> list[EnergyBoundReport]:
    grid = grid or Grid(16, 17)
    rng = np.random.default_rng(seed)
    ep = EnergyParams.from_parameters(params)
    reports = []
    for _ in range(n_states):
        state = random_state(rng, grid, radius=rng.uniform(1.0, 2.0))
        reports.append(energy_bound_check(state.at_time(rng.uniform(0.0, 20.0)), params, ep))
    return reports
