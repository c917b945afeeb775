"""Term-order bookkeeping for the Prandtl and Hartmann boundary-layer rescalings.

Smooth test fields (u, v, b1, b2, e, p) are lifted to the full Navier-Stokes-Maxwell
variables for a sequence of small parameters. Every term of the full dimensionless
system is evaluated with the discrete operators of `spectral` on the rescaled grid,
its norm is recorded, and the power of the small parameter is fitted in log-log.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from .models import Parameters, Regime, RescalingParams, TermOrder, TermOrderTable
from .spectral import Grid, dx, dy, dyy, physical_l2, transform_forward

logger = logging.getLogger(__name__)

FieldFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
FIELD_NAMES = ("u", "v", "b1", "b2", "e", "p")

DEFAULT_EPS_VALUES = tuple(float(v) for v in np.geomspace(0.2, 0.002, 5))
DEFAULT_DELTA_VALUES = tuple(float(v) for v in np.geomspace(0.1, 0.001, 5))
RESOLUTION_TOLERANCE = 1.0e-10

TERM_COLUMNS = [
    "equation",
    "term",
    "claimed",
    "observed",
    "residual",
    "multiplier",
    "scaled_claimed",
    "scaled_observed",
]


class UnresolvedFieldError(ValueError):
    """A test field carries spectral content outside the resolved band."""


@dataclass(frozen=True)
class TestFields:
    """Callables f(t, x, y) for the six boundary-layer unknowns."""

    u: FieldFn
    v: FieldFn
    b1: FieldFn
    b2: FieldFn
    e: FieldFn
    p: FieldFn

    __test__ = False

    def get(self, name: str) -> FieldFn:
        return getattr(self, name)


def manufactured_fields(b1_wall: float = 0.0) -> TestFields:
    """Divergence-free smooth fields with zero velocity traces.

    Args:
        b1_wall: Constant added to the b1 trace at y=0 (as b1_wall (1 - y)).
    """

    def u(t, x, y):
        return np.exp(-t) * np.cos(x) * y * (1.0 - y)

    def v(t, x, y):
        return np.exp(-t) * np.sin(x) * (y**2 / 2.0 - y**3 / 3.0)

    def b1(t, x, y):
        return np.exp(-t) * (np.sin(x) * np.sin(np.pi * y) + b1_wall * (1.0 - y))

    def b2(t, x, y):
        return -np.exp(-t) * np.cos(x) * (1.0 - np.cos(np.pi * y)) / np.pi

    def e(t, x, y):
        return np.exp(-t) * np.sin(x) * (1.0 - np.cos(np.pi * y)) / np.pi

    def p(t, x, y):
        return np.exp(-t) * np.cos(x) * y**2

    return TestFields(u, v, b1, b2, e, p)


def zero_fields() -> TestFields:
    def zero(t, x, y):
        return np.zeros(np.broadcast(t, x, y).shape)

    return TestFields(zero, zero, zero, zero, zero, zero)


# ============================================================================
# Change of variables
# ============================================================================


@dataclass(frozen=True)
class ScalingMap:
    """Primed coordinates are (t, x, y) times (time, x, y); primed fields are amp times fields."""

    time: float
    x: float
    y: float
    amp: dict[str, float]


def scaling_map(rp: RescalingParams) -> ScalingMap:
    if rp.regime is Regime.PRANDTL:
        eps = rp.eps
        return ScalingMap(
            time=1.0,
            x=1.0,
            y=eps,
            amp={"u": 1.0, "v": eps, "b1": 1.0, "b2": eps, "e": eps, "p": 1.0},
        )
    delta = rp.delta
    root = math.sqrt(delta)
    return ScalingMap(
        time=delta,
        x=root,
        y=delta,
        amp={"u": 1 / root, "v": 1.0, "b1": 1 / root, "b2": 1.0, "e": 1 / root, "p": 1 / delta},
    )


def lift(fields: TestFields, rp: RescalingParams) -> TestFields:
    """Full-system fields (U1', U2', B1', B2', E', P') as functions of (t', x', y')."""
    m = scaling_map(rp)

    def lifted(name: str) -> FieldFn:
        f, a = fields.get(name), m.amp[name]
        return lambda tp, xp, yp: a * f(tp / m.time, xp / m.x, yp / m.y)

    return TestFields(*(lifted(name) for name in FIELD_NAMES))


def forward(primed: TestFields, rp: RescalingParams) -> TestFields:
    """Inverse of lift: boundary-layer fields as functions of (t, x, y)."""
    m = scaling_map(rp)

    def lowered(name: str) -> FieldFn:
        f, a = primed.get(name), m.amp[name]
        return lambda t, x, y: f(t * m.time, x * m.x, y * m.y) / a

    return TestFields(*(lowered(name) for name in FIELD_NAMES))


def trace_ratio(fields: TestFields, rp: RescalingParams, name: str, t: float = 0.5) -> float:
    """Lifted trace at y'=0 divided by the original trace at y=0, at x=0."""
    m = scaling_map(rp)
    original = float(fields.get(name)(t, 0.0, 0.0))
    if original == 0.0:
        raise ValueError(f"{name} has zero trace; nothing to compare")
    return float(lift(fields, rp).get(name)(t * m.time, 0.0, 0.0)) / original


def hartmann_coefficient_limits(rp: RescalingParams) -> dict[str, float]:
    """Coefficients that must tend to 1 and H^2 in the Hartmann rescaling."""
    return {
        "Ha/(Re H)": rp.Ha / (rp.Re * rp.H_limit),
        "delta Ha^2/Re": rp.delta * rp.Ha**2 / rp.Re,
    }


# ============================================================================
# Term evaluation
# ============================================================================


class _Sample:
    """Values and discrete derivatives of fields at one time on one grid."""

    def __init__(self, fields: TestFields, grid: Grid, t: float, dt: float):
        X, Y = grid.mesh()
        self.grid = grid
        self.val: dict[str, np.ndarray] = {}
        self.t: dict[str, np.ndarray] = {}
        self.tt: dict[str, np.ndarray] = {}
        self.x: dict[str, np.ndarray] = {}
        self.xx: dict[str, np.ndarray] = {}
        self.y: dict[str, np.ndarray] = {}
        self.yy: dict[str, np.ndarray] = {}
        for name in FIELD_NAMES:
            f = fields.get(name)
            now, ahead, behind = f(t, X, Y), f(t + dt, X, Y), f(t - dt, X, Y)
            field = transform_forward(now, grid)
            _check_resolved(field.coeffs, name)
            self.val[name] = now
            self.t[name] = (ahead - behind) / (2.0 * dt)
            self.tt[name] = (ahead - 2.0 * now + behind) / dt**2
            self.x[name] = dx(field).values()
            self.xx[name] = dx(dx(field)).values()
            self.y[name] = dy(field).values()
            self.yy[name] = dyy(field).values()


def _check_resolved(coeffs: np.ndarray, name: str) -> None:
    n_x = coeffs.shape[0]
    k = np.abs(np.fft.fftfreq(n_x, d=1.0 / n_x))
    total = float(np.sum(np.abs(coeffs) ** 2))
    if total == 0.0:
        return
    tail = float(np.sum(np.abs(coeffs[k > n_x / 3.0]) ** 2))
    if tail > RESOLUTION_TOLERANCE * total:
        raise UnresolvedFieldError(
            f"field {name} has relative energy {tail / total:.2e} beyond |k| > n_x/3"
        )


Terms = dict[tuple[str, str], np.ndarray]


def full_system_terms(s: _Sample, rp: RescalingParams) -> Terms:
    """Signed terms of the full dimensionless system; each equation sums to its residual.

    The Lorentz terms are left out when Ha = 0.
    """
    U1, U2, B1, B2, E, P = (s.val[n] for n in FIELD_NAMES)
    a_tt = rp.U0_over_c**2 * rp.Jscript / rp.Re
    nu = 1.0 / rp.Re
    lorentz = rp.Ha**2 / rp.Re
    b_tt = rp.U0_over_c**2 / rp.Re_m
    eta = 1.0 / rp.Re_m
    UB = U1 * B1 + U2 * B2
    B_sq = B1**2 + B2**2

    terms: Terms = {}
    for eq, name, force in (
        ("momentum_x", "u", B1 * UB - U1 * B_sq - E * B2),
        ("momentum_y", "v", B2 * UB - U2 * B_sq + E * B1),
    ):
        terms[(eq, "cattaneo")] = a_tt * s.tt[name]
        terms[(eq, "inertia")] = s.t[name]
        terms[(eq, "advection_x")] = U1 * s.x[name]
        terms[(eq, "advection_y")] = U2 * s.y[name]
        terms[(eq, "diffusion_xx")] = -nu * s.xx[name]
        terms[(eq, "diffusion_yy")] = -nu * s.yy[name]
        terms[(eq, "pressure")] = s.x["p"] if eq == "momentum_x" else s.y["p"]
        if lorentz != 0.0:
            terms[(eq, "lorentz")] = -lorentz * force

    terms[("continuity", "dx_u1")] = s.x["u"]
    terms[("continuity", "dy_u2")] = s.y["v"]

    for eq, name, vel in (("induction_x", "b1", "u"), ("induction_y", "b2", "v")):
        terms[(eq, "cattaneo")] = b_tt * s.tt[name]
        terms[(eq, "inertia")] = s.t[name]
        terms[(eq, "diffusion_xx")] = -eta * s.xx[name]
        terms[(eq, "diffusion_yy")] = -eta * s.yy[name]
        terms[(eq, "stretching_x")] = -B1 * s.x[vel]
        terms[(eq, "stretching_y")] = -B2 * s.y[vel]
        terms[(eq, "transport_x")] = U1 * s.x[name]
        terms[(eq, "transport_y")] = U2 * s.y[name]

    terms[("faraday_x", "dt_b1")] = s.t["b1"]
    terms[("faraday_x", "dy_e")] = s.y["e"]
    terms[("faraday_y", "dt_b2")] = s.t["b2"]
    terms[("faraday_y", "dx_e")] = -s.x["e"]
    terms[("gauss", "dx_b1")] = s.x["b1"]
    terms[("gauss", "dy_b2")] = s.y["b2"]
    return terms


def boundary_layer_residuals(s: _Sample, limit: Parameters) -> dict[str, np.ndarray]:
    """Residual of every equation of the limit system (tangential momentum plus relations)."""
    u, v, b1, b2, e, _ = (s.val[n] for n in FIELD_NAMES)
    H2, J, c, Pr = limit.H**2, limit.J, limit.magnetic_inertia, limit.Pr_m
    return {
        "momentum_x": J * s.tt["u"] + s.t["u"] + u * s.x["u"] + v * s.y["u"] - s.yy["u"]
        + s.x["p"] - H2 * (b1 * b2 * v - u * b2**2 - b2 * e),
        "momentum_y": s.y["p"] - H2 * (b1 * b2 * u - b1**2 * v + b1 * e),
        "continuity": s.x["u"] + s.y["v"],
        "induction_x": c * s.tt["b1"] + s.t["b1"] - s.yy["b1"] / Pr
        - (b1 * s.x["u"] + b2 * s.y["u"]) + u * s.x["b1"] + v * s.y["b1"],
        "induction_y": c * s.tt["b2"] + s.t["b2"] - s.yy["b2"] / Pr
        - (b1 * s.x["v"] + b2 * s.y["v"]) + u * s.x["b2"] + v * s.y["b2"],
        "faraday_x": s.t["b1"] + s.y["e"],
        "faraday_y": s.t["b2"] - s.x["e"],
        "gauss": s.x["b1"] + s.y["b2"],
    }


# Powers of the small parameter carried by each term of the rescaled system.
_PRANDTL_CLAIMS: dict[str, dict[str, float]] = {
    "momentum_x": {
        "cattaneo": 0, "inertia": 0, "advection_x": 0, "advection_y": 0,
        "diffusion_xx": 2, "diffusion_yy": 0, "pressure": 0, "lorentz": 0,
    },
    "momentum_y": {
        "cattaneo": 1, "inertia": 1, "advection_x": 1, "advection_y": 1,
        "diffusion_xx": 3, "diffusion_yy": 1, "pressure": -1, "lorentz": -1,
    },
    "continuity": {"dx_u1": 0, "dy_u2": 0},
    "induction_x": {
        "cattaneo": 0, "inertia": 0, "diffusion_xx": 2, "diffusion_yy": 0,
        "stretching_x": 0, "stretching_y": 0, "transport_x": 0, "transport_y": 0,
    },
    "induction_y": {
        "cattaneo": 1, "inertia": 1, "diffusion_xx": 3, "diffusion_yy": 1,
        "stretching_x": 1, "stretching_y": 1, "transport_x": 1, "transport_y": 1,
    },
    "faraday_x": {"dt_b1": 0, "dy_e": 0},
    "faraday_y": {"dt_b2": 1, "dx_e": 1},
    "gauss": {"dx_b1": 0, "dy_b2": 0},
}
_PRANDTL_MULTIPLIERS = {
    "momentum_x": 0, "momentum_y": 1, "continuity": 0, "induction_x": 0,
    "induction_y": -1, "faraday_x": 0, "faraday_y": -1, "gauss": 0,
}

_HARTMANN_CLAIMS: dict[str, dict[str, float]] = {
    "momentum_x": {
        "cattaneo": -1.5, "inertia": -1.5, "advection_x": -1.5, "advection_y": -1.5,
        "diffusion_xx": -0.5, "diffusion_yy": -1.5, "pressure": -1.5, "lorentz": -1.5,
    },
    "momentum_y": {
        "cattaneo": -1, "inertia": -1, "advection_x": -1, "advection_y": -1,
        "diffusion_xx": 0, "diffusion_yy": -1, "pressure": -2, "lorentz": -2,
    },
    "continuity": {"dx_u1": -1, "dy_u2": -1},
    "induction_x": {
        "cattaneo": -1.5, "inertia": -1.5, "diffusion_xx": -0.5, "diffusion_yy": -1.5,
        "stretching_x": -1.5, "stretching_y": -1.5, "transport_x": -1.5, "transport_y": -1.5,
    },
    "induction_y": {
        "cattaneo": -1, "inertia": -1, "diffusion_xx": 0, "diffusion_yy": -1,
        "stretching_x": -1, "stretching_y": -1, "transport_x": -1, "transport_y": -1,
    },
    "faraday_x": {"dt_b1": -1.5, "dy_e": -1.5},
    "faraday_y": {"dt_b2": -1, "dx_e": -1},
    "gauss": {"dx_b1": -1, "dy_b2": -1},
}
# y-momentum takes delta^2 so that the pressure balance survives at order one
_HARTMANN_MULTIPLIERS = {
    "momentum_x": 1.5, "momentum_y": 2, "continuity": 1, "induction_x": 1.5,
    "induction_y": 1, "faraday_x": 1.5, "faraday_y": 1, "gauss": 1,
}

CLAIMS = {Regime.PRANDTL: _PRANDTL_CLAIMS, Regime.HARTMANN: _HARTMANN_CLAIMS}
MULTIPLIERS = {Regime.PRANDTL: _PRANDTL_MULTIPLIERS, Regime.HARTMANN: _HARTMANN_MULTIPLIERS}


def _sample_full(
    fields: TestFields, rp: RescalingParams, grid: Grid, t_slice: float, dt: float
) -> _Sample:
    m = scaling_map(rp)
    primed_grid = Grid(grid.n_x, grid.n_y, grid.L_x * m.x, grid.L_y * m.y)
    return _Sample(lift(fields, rp), primed_grid, t_slice * m.time, dt * m.time)


def _interior_norm(values: np.ndarray, grid: Grid) -> float:
    inner = np.zeros_like(values)
    inner[:, 1:-1] = values[:, 1:-1]
    return physical_l2(inner, grid)


def scale_terms(
    fields: TestFields,
    regime: Regime,
    small_values: Sequence[float],
    limit: Optional[Parameters] = None,
    grid: Optional[Grid] = None,
    t_slice: float = 0.5,
    dt: float = 1.0e-3,
) -> TermOrderTable:
    """Fit the power of the small parameter carried by each term of the full system."""
    regime = Regime(regime)
    limit = limit or Parameters()
    grid = grid or Grid(16, 65)
    small = np.asarray(small_values, dtype=float)
    if len(small) < 2:
        raise ValueError("need at least two small-parameter values to fit an exponent")

    norms: dict[tuple[str, str], list[float]] = {}
    for value in small:
        rp = RescalingParams.for_limit(regime, float(value), limit)
        sample = _sample_full(fields, rp, grid, t_slice, dt)
        for key, arr in full_system_terms(sample, rp).items():
            norms.setdefault(key, []).append(_interior_norm(arr, grid))

    table = TermOrderTable(regime=regime, small_values=small)
    log_small = np.log(small)
    claims, multipliers = CLAIMS[regime], MULTIPLIERS[regime]
    for (eq, term), series in norms.items():
        values = np.asarray(series)
        if np.any(values <= 0.0):
            table.degenerate = True
            observed, residual = math.nan, math.nan
        else:
            coef = np.polyfit(log_small, np.log(values), 1)
            fit = np.polyval(coef, log_small)
            observed = float(coef[0])
            residual = float(np.sqrt(np.mean((np.log(values) - fit) ** 2)))
        row = TermOrder(eq, term, float(claims[eq][term]), observed, residual, multipliers[eq])
        table.rows.append(row)
        logger.debug("%s/%s claimed %.2f observed %.4f", eq, term, row.claimed, observed)
    logger.info(
        "%s rescaling: %d terms, all within tolerance: %s",
        regime.value, len(table.rows), table.all_within(),
    )
    return table


def prandtl_scale_terms(
    fields: TestFields,
    eps_values: Sequence[float] = DEFAULT_EPS_VALUES,
    **kwargs,
) -> TermOrderTable:
    return scale_terms(fields, Regime.PRANDTL, eps_values, **kwargs)


def hartmann_scale_terms(
    fields: TestFields,
    delta_values: Sequence[float] = DEFAULT_DELTA_VALUES,
    **kwargs,
) -> TermOrderTable:
    return scale_terms(fields, Regime.HARTMANN, delta_values, **kwargs)


def limit_residual(
    fields: TestFields,
    limit: Parameters,
    small_value: float,
    regime: Regime = Regime.PRANDTL,
    grid: Optional[Grid] = None,
    t_slice: float = 0.5,
    dt: float = 1.0e-3,
) -> float:
    """Norm of (rescaled full residual times prescribed powers) minus the limit-system residual."""
    regime = Regime(regime)
    grid = grid or Grid(16, 65)
    rp = RescalingParams.for_limit(regime, small_value, limit)
    terms = full_system_terms(_sample_full(fields, rp, grid, t_slice, dt), rp)
    reference = boundary_layer_residuals(_Sample(fields, grid, t_slice, dt), limit)
    total = 0.0
    for eq, power in MULTIPLIERS[regime].items():
        scaled = sum(arr for (e, _), arr in terms.items() if e == eq) * small_value**power
        total += _interior_norm(scaled - reference[eq], grid) ** 2
    return math.sqrt(total)


def table_to_frame(table: TermOrderTable) -> pd.DataFrame:
    rows = [
        {
            "equation": r.equation,
            "term": r.term,
            "claimed": r.claimed,
            "observed": r.observed,
            "residual": r.residual,
            "multiplier": r.multiplier,
            "scaled_claimed": r.scaled_claimed,
            "scaled_observed": r.observed + r.multiplier,
        }
        for r in table.rows
    ]
    return pd.DataFrame(rows, columns=TERM_COLUMNS)
