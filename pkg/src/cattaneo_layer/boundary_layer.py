"""Reconstruction of the dependent fields and right-hand side of the reduced system."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .models import DerivedFields, Parameters, State
from .spectral import SpectralField, dx, dy, dyy, integrate_from_0, multiply

logger = logging.getLogger(__name__)


class NonFiniteStateError(FloatingPointError):
    """NaN or Inf appeared while assembling the right-hand side."""


@dataclass(frozen=True)
class Tendency:
    """Time derivative of a State in first-order form."""

    du: SpectralField
    dut: SpectralField
    db1: SpectralField
    db1t: SpectralField

    def components(self) -> tuple[SpectralField, SpectralField, SpectralField, SpectralField]:
        return (self.du, self.dut, self.db1, self.db1t)


@dataclass(frozen=True)
class ExplicitTerms:
    """Everything except damping and wall-normal diffusion, before division by J or kappa/Pr_m."""

    momentum: SpectralField
    induction: SpectralField


# ============================================================================
# Reconstruction
# ============================================================================


def reconstruct_v(u: SpectralField) -> SpectralField:
    return -integrate_from_0(dx(u))


def reconstruct_b2(b1: SpectralField) -> SpectralField:
    return -integrate_from_0(dx(b1))


def reconstruct_e(b1t: SpectralField) -> SpectralField:
    return -integrate_from_0(b1t)


def recover_pressure(
    state: State,
    v: SpectralField,
    b2: SpectralField,
    e: SpectralField,
    params: Parameters,
) -> tuple[SpectralField, SpectralField]:
    """Integrate the wall-normal pressure balance with the gauge p(y=1) = 0.

    Args:
        state: Current state (u, b1 are used).
        v: Reconstructed transverse velocity.
        b2: Reconstructed transverse magnetic field.
        e: Reconstructed electric field.
        params: Model constants (H enters as H^2).

    Returns:
        Pressure and its x-derivative.
    """
    u, b1 = state.u, state.b1
    if params.H == 0:
        zero = SpectralField.zeros(u.grid)
        return zero, zero
    q = (
        multiply(multiply(b1, b2), u) - multiply(multiply(b1, b1), v) + multiply(b1, e)
    ) * params.H**2
    primitive = integrate_from_0(q).coeffs
    p = SpectralField(u.grid, primitive - primitive[:, -1:])
    return p, dx(p)


def reconstruct(state: State, params: Parameters) -> DerivedFields:
    v = reconstruct_v(state.u)
    b2 = reconstruct_b2(state.b1)
    e = reconstruct_e(state.b1t)
    p, dpx = recover_pressure(state, v, b2, e, params)
    return DerivedFields(v=v, b2=b2, e=e, p=p, dpx=dpx)


def divergence_residual(a: SpectralField, b: SpectralField, staggered: bool = False) -> float:
    """Largest |d_x a + d_y b|.

    Collocated form uses dy at interior nodes and is O(h^2). The staggered form
    pairs (b_{j+1} - b_j)/h with the mean of d_x a at j and j+1, which vanishes to
    round-off for b = -integrate_from_0(d_x a).
    """
    ax = dx(a).coeffs
    if staggered:
        residual = np.diff(b.coeffs, axis=1) / a.grid.h_y + 0.5 * (ax[:, 1:] + ax[:, :-1])
    else:
        residual = (ax + dy(b).coeffs)[:, 1:-1]
    return float(np.max(np.abs(residual))) if residual.size else 0.0


# ============================================================================
# Right-hand side
# ============================================================================


def explicit_terms(
    state: State,
    params: Parameters,
    derived: Optional[DerivedFields] = None,
) -> ExplicitTerms:
    """Advection, pressure gradient, Lorentz forcing and stretching terms."""
    d = derived if derived is not None else reconstruct(state, params)
    u, b1 = state.u, state.b1
    ux, uy = dx(u), dy(u)
    momentum = -multiply(u, ux) - multiply(d.v, uy) - d.dpx
    if params.H != 0:
        lorentz = (
            multiply(multiply(b1, d.b2), d.v)
            - multiply(u, multiply(d.b2, d.b2))
            - multiply(d.b2, d.e)
        )
        momentum = momentum + lorentz * params.H**2
    induction = (
        -multiply(u, dx(b1))
        - multiply(d.v, dy(b1))
        + multiply(b1, ux)
        + multiply(d.b2, uy)
    )
    return ExplicitTerms(momentum=momentum, induction=induction)


def rhs(
    state: State,
    params: Parameters,
    forcing: Optional[tuple[SpectralField, SpectralField]] = None,
) -> Tendency:
    """Full right-hand side; forcing (F_u, F_b) is added before division by J and kappa/Pr_m."""
    terms = explicit_terms(state, params)
    mom, ind = terms.momentum, terms.induction
    if forcing is not None:
        mom = mom + forcing[0]
        ind = ind + forcing[1]
    dut = (mom - state.ut + dyy(state.u)) / params.J
    db1t = (ind - state.b1t + dyy(state.b1) / params.Pr_m) / params.magnetic_inertia
    out = Tendency(state.ut, dut.with_dirichlet(), state.b1t, db1t.with_dirichlet())
    if not all(c.is_finite() for c in out.components()):
        raise NonFiniteStateError(f"non-finite right-hand side at t={state.t}")
    return out
