"""Analytic-norm energy functionals, explicit constants and the theorem checks."""

import logging
import math
from typing import Literal

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .models import (
    ConstantsTable,
    EnergyParams,
    EnergyReport,
    InequalityReport,
    Parameters,
    State,
    Trajectory,
)
from .spectral import SpectralField, apply_multiplier, dy, norm_Hs0, scale_modes

logger = logging.getLogger(__name__)

DsOneReading = Literal["derivation", "printed"]

# Relative amplitude below which modes are ignored by empirical_radius.
RADIUS_FLOOR = 1.0e-13
RADIUS_MIN_MODES = 8


# ============================================================================
# Constants
# ============================================================================


def constants(params: Parameters) -> ConstantsTable:
    s = params.s
    shape = 1.0 + (s - 2.0) / math.sqrt(s - 1.0)
    D_s = 2.0 ** (2.0 * s + 6.0) / (s - 2.0) * shape
    eps_s = (s - 2.0) / 2.0 ** (2.0 * s + 14.0) / shape

    ep = EnergyParams.from_parameters(params)
    m, M = ep.m_small, ep.M_big
    tau_min = min(params.tau0, 1.0 / params.tau0)
    tau_max = max(params.tau0, 1.0 / params.tau0)
    pr_max = max(params.Pr_m, 1.0 / params.Pr_m)
    H2 = max(1.0, params.H**2)

    delta_small = m**1.5 / M**2.5 * tau_min**1.5 / (H2 * math.sqrt(pr_max)) * eps_s
    C_decay = 4.0**3 * (M / m) ** 3 * pr_max * tau_max**2
    bootstrap = (
        2.0**-12
        * min(1.0, params.tau0) ** 3
        * m**3
        / (D_s**2 * H2**2 * M**3 * max(1.0, params.Pr_m))
    )
    return ConstantsTable(
        D_s=D_s,
        eps_s=eps_s,
        delta_small=delta_small,
        C_decay=C_decay,
        bootstrap_threshold=bootstrap,
    )


# ============================================================================
# Weighted fields and functionals
# ============================================================================


def eta_weight(f: SpectralField, t: float, ep: EnergyParams) -> SpectralField:
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return apply_multiplier(f, ep.tau(t))


class _Weighted:
    """eta-weighted components of a state, with the schedule started at t0."""

    def __init__(self, state: State, ep: EnergyParams, t0: float = 0.0):
        t = state.t - t0
        self.u = eta_weight(state.u, t, ep)
        self.ut = eta_weight(state.ut, t, ep)
        self.b = eta_weight(state.b1, t, ep)
        self.bt = eta_weight(state.b1t, t, ep)
        self.uy = dy(self.u)
        self.by = dy(self.b)
        eta_p = ep.eta_prime(t)
        # d/dt of the weighted field: (d_t f)_eta - eta'(1+|D_x|) f_eta
        self.d_u = self.ut - scale_modes(self.u, 1.0) * eta_p
        self.d_b = self.bt - scale_modes(self.b, 1.0) * eta_p


def _sq(f: SpectralField, s: float) -> float:
    return norm_Hs0(f, s) ** 2


def _E_at(w: _Weighted, params: Parameters, s: float) -> float:
    J, c = params.J, params.magnetic_inertia
    return (
        0.5 * J**2 * _sq(w.ut, s)
        + 0.5 * _sq(w.ut * J + w.u, s)
        + J * _sq(w.uy, s)
        + 0.5 * c**2 * _sq(w.bt, s)
        + 0.5 * _sq(w.bt * c + w.b, s)
        + params.kappa / params.Pr_m**2 * _sq(w.by, s)
    )


def compute_Es(state: State, params: Parameters, ep: EnergyParams) -> float:
    return _E_at(_Weighted(state, ep), params, params.s)


def compute_E_suite(
    state: State, params: Parameters, ep: EnergyParams
) -> tuple[float, float, float]:
    """(E_s, E_{s+1/2}, E_{s+1})."""
    w = _Weighted(state, ep)
    s = params.s
    Es = _E_at(w, params, s)
    Es_half = 0.5 * _sq(w.u, s + 0.5) + 0.5 * _sq(w.b, s + 0.5)
    Es_one = _sq(w.u, s + 1.0) + _sq(w.b, s + 1.0)
    return Es, Es_half, Es_one


def _D_suite(
    w: _Weighted, params: Parameters, reading: DsOneReading
) -> tuple[float, float, float, float, float]:
    s = params.s
    sh = s + 0.5
    Ds0 = 0.5 * (_sq(w.uy, s) + _sq(w.ut, s) + _sq(w.by, s) + _sq(w.bt, s))
    Ds_half = 0.0
    for f, ft, fy, dfw in ((w.u, w.ut, w.uy, w.d_u), (w.b, w.bt, w.by, w.d_b)):
        Ds_half += (
            0.5 * _sq(ft, sh)
            + 0.5 * _sq(ft + f, sh)
            + 2.0 * _sq(fy, sh)
            + _sq(dfw, sh)
            + 0.375 * _sq(f, sh)
        )
    derivation = 0.75 * (_sq(w.u, s + 1.0) + _sq(w.b, s + 1.0))
    printed = 0.75 * (_sq(w.u, sh) + _sq(w.bt, sh))
    Ds_one = derivation if reading == "derivation" else printed
    Ds_threehalf = _sq(w.u, s + 1.5) + _sq(w.b, s + 1.5)
    return Ds0, Ds_half, Ds_one, Ds_threehalf, printed


def compute_D_suite(
    state: State,
    params: Parameters,
    ep: EnergyParams,
    reading: DsOneReading = "derivation",
) -> tuple[float, float, float, float]:
    """(D_s, D_{s+1/2}, D_{s+1}, D_{s+3/2}) with D_{s+1} under the chosen reading."""
    return _D_suite(_Weighted(state, ep), params, reading)[:4]


def empirical_radius(f: SpectralField) -> float:
    """Slope of -log max_y|c_k| against |xi_k| over the 2/3 band; nan when undefined."""
    grid = f.grid
    amp = np.max(np.abs(f.coeffs), axis=1)
    k = grid.mode_numbers
    # fold the negative half onto |k|
    folded: dict[int, float] = {}
    for idx in np.flatnonzero(np.abs(k) <= grid.n_x / 3.0):
        key = int(abs(k[idx]))
        folded[key] = max(folded.get(key, 0.0), float(amp[idx]))
    if not folded:
        return math.nan
    peak = max(folded.values())
    if peak == 0.0:
        return math.nan
    keep = sorted(m for m, a in folded.items() if a > RADIUS_FLOOR * peak)
    if len(keep) < RADIUS_MIN_MODES:
        return math.nan
    xi = 2.0 * np.pi * np.array(keep, dtype=float) / grid.L_x
    y = -np.log([folded[m] for m in keep])
    return float(np.polyfit(xi, y, 1)[0])


def energy_report(
    state: State,
    params: Parameters,
    ep: EnergyParams,
    reading: DsOneReading = "derivation",
    t0: float = 0.0,
) -> EnergyReport:
    """Functionals at state.t with the weight schedule started at t0."""
    w = _Weighted(state, ep, t0)
    s = params.s
    Es = _E_at(w, params, s)
    Ds0, Ds_half, Ds_one, Ds_threehalf, printed = _D_suite(w, params, reading)
    return EnergyReport(
        t=state.t,
        Es=Es,
        Es_half=0.5 * _sq(w.u, s + 0.5) + 0.5 * _sq(w.b, s + 0.5),
        Es_one=_sq(w.u, s + 1.0) + _sq(w.b, s + 1.0),
        Ds0=Ds0,
        Ds_half=Ds_half,
        Ds_one=Ds_one,
        Ds_threehalf=Ds_threehalf,
        tau_t=ep.tau(state.t - t0),
        tau_empirical=empirical_radius(state.u),
        Ds_one_printed=printed,
    )


# ============================================================================
# Theorem checks
# ============================================================================


def smallness_lhs(state: State, params: Parameters) -> float:
    """Sum of the six tau0-weighted norms entering the smallness condition."""
    s, tau0 = params.s, params.tau0
    total = 0.0
    for f, ft in ((state.u, state.ut), (state.b1, state.b1t)):
        fw = apply_multiplier(f, tau0)
        total += norm_Hs0(fw, s + 1.0) + norm_Hs0(dy(fw), s)
        total += norm_Hs0(apply_multiplier(ft, tau0), s)
    return total


def check_smallness(
    initial: State, params: Parameters, ct: ConstantsTable
) -> tuple[bool, float]:
    """(passes, margin) with margin = delta_small - LHS."""
    margin = ct.delta_small - smallness_lhs(initial, params)
    logger.info("Smallness margin %.3e (delta=%.3e)", margin, ct.delta_small)
    return margin >= 0.0, margin


def _decay_sum(state: State, params: Parameters, tau: float) -> float:
    s = params.s
    total = 0.0
    for f, ft in ((state.u, state.ut), (state.b1, state.b1t)):
        fw = apply_multiplier(f, tau)
        total += _sq(fw, s + 1.0) + _sq(apply_multiplier(ft, tau), s) + _sq(dy(fw), s)
    return total


def check_decay(
    traj: Trajectory, params: Parameters, ct: ConstantsTable
) -> InequalityReport:
    """Weighted solution norms against C_decay times their initial value times e^{-t/(8M)}."""
    ep = EnergyParams.from_parameters(params)
    initial = _decay_sum(traj.initial, params, params.tau0)
    times = traj.times - traj.initial.t
    lhs = np.array([_decay_sum(st, params, ep.tau(t)) for st, t in zip(traj.snapshots, times)])
    rhs = ct.C_decay * initial * np.exp(-times / (8.0 * ep.M_big))
    report = InequalityReport("decay", times, lhs, rhs)
    logger.info("Decay check: pass=%s worst slack %.3e", report.all_pass, report.worst_slack)
    return report


def _series(traj: Trajectory, reading: DsOneReading) -> dict[str, np.ndarray]:
    reports = traj.reports
    out = {
        name: np.array([getattr(r, name) for r in reports])
        for name in ("t", "Es", "Es_half", "Es_one", "Ds0", "Ds_half", "Ds_one", "Ds_threehalf")
    }
    if reading == "printed":
        out["Ds_one"] = np.array([r.Ds_one_printed for r in reports])
    return out


def _master_terms(
    v: dict[str, np.ndarray], params: Parameters, ep: EnergyParams, ct: ConstantsTable, stride: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sl = slice(None, None, stride)
    t = v["t"][sl]
    m, M, R = ep.m_small, ep.M_big, ep.R
    eta_p = ep.lam * ep.tau0 * np.exp(-ep.lam * t)
    eta_pp = -ep.lam * eta_p
    grow = np.exp(R * t)
    E, Eh, E1 = v["Es"][sl], v["Es_half"][sl], v["Es_one"][sl]
    D0, Dh, D1, D32 = v["Ds0"][sl], v["Ds_half"][sl], v["Ds_one"][sl], v["Ds_threehalf"][sl]
    J, c = params.J, params.magnetic_inertia

    def integral(y: np.ndarray) -> np.ndarray:
        if len(t) < 2:
            return np.zeros_like(t)
        return cumulative_trapezoid(y, t, initial=0.0)

    dissipation = integral(grow * (D0 + eta_p * Dh + m * eta_p**2 * D1 + m**2 * eta_p**3 * D32))
    rest = integral(grow * ((J + c) * eta_pp * Eh + 2.0 * (J**2 + c**2) * eta_p * eta_pp * E1))
    lhs = grow * (E + m * eta_p * Eh + m**2 * eta_p**2 * E1) + dissipation - rest

    mixed = max(1.0 / math.sqrt(J), params.Pr_m / math.sqrt(params.kappa))
    nonlinear = (
        mixed * integral(grow * np.sqrt(E) * Dh)
        + integral(grow * E * Dh)
        + mixed * integral(grow * E * np.sqrt(Dh * D32))
    )
    eta_p0 = ep.eta_prime(0.0)
    rhs = (
        E[0] + M * eta_p0 * Eh[0] + M**2 * eta_p0**2 * E1[0]
        + ct.D_s * max(1.0, params.H**2) * nonlinear
    )
    return t, lhs, rhs


def check_master_inequality(
    traj: Trajectory,
    params: Parameters,
    ep: EnergyParams,
    ct: ConstantsTable,
    reading: DsOneReading = "derivation",
    rel_tol: float = 1.0e-10,
) -> InequalityReport:
    """Integrated energy inequality with trapezoid quadrature over the snapshots.

    The quadrature is repeated on every second snapshot; a gap above 1% of the
    smallest positive LHS value is logged as a warning.
    """
    v = _series(traj, reading)
    v["t"] = v["t"] - v["t"][0]
    t, lhs, rhs = _master_terms(v, params, ep, ct, 1)
    notes: dict[str, object] = {"reading": reading}
    if len(t) >= 5:
        _, lhs2, _ = _master_terms(v, params, ep, ct, 2)
        gap = float(np.max(np.abs(lhs[::2] - lhs2)))
        positive = lhs[lhs > 0]
        scale = float(np.min(positive)) if positive.size else 0.0
        notes["richardson_gap"] = gap
        if scale > 0 and gap > 0.01 * scale:
            logger.warning(
                "Master inequality quadrature gap %.3e exceeds 1%% of %.3e; refine monitoring",
                gap, scale,
            )
    report = InequalityReport("master", t, lhs, rhs, rel_tol=rel_tol, notes=notes)
    logger.info(
        "Master inequality (%s reading): pass=%s worst slack %.3e",
        reading, report.all_pass, report.worst_slack,
    )
    return report


def check_bootstrap(
    traj: Trajectory, params: Parameters, ep: EnergyParams, ct: ConstantsTable
) -> InequalityReport:
    """e^{Rt} E_s(t) against the continuation threshold; notes carry the retained bound."""
    t = np.array([r.t for r in traj.reports]) - traj.initial.t
    lhs = np.exp(ep.R * t) * np.array([r.Es for r in traj.reports])
    rhs = np.full_like(t, ct.bootstrap_threshold)
    retained = ct.bootstrap_threshold / 4.0
    notes: dict[str, object] = {
        "retained_bound": retained,
        "within_retained": bool(np.all(lhs <= retained)),
    }
    return InequalityReport("bootstrap", t, lhs, rhs, notes=notes)


def initial_energy_bound(
    initial: State, params: Parameters, ep: EnergyParams, ct: ConstantsTable
) -> tuple[float, float]:
    """Weighted initial energy against 4 max{1,tau0}^2 M^2 max{1,1/Pr_m} delta^2."""
    Es, Es_half, Es_one = compute_E_suite(initial.at_time(0.0), params, ep)
    a = ep.M_big * ep.R * params.tau0 / 4.0
    lhs = Es + a * Es_half + a**2 * Es_one
    rhs = (
        4.0
        * max(1.0, params.tau0) ** 2
        * ep.M_big**2
        * max(1.0, 1.0 / params.Pr_m)
        * ct.delta_small**2
    )
    return lhs, rhs


def check_radius(
    traj: Trajectory,
    ep: EnergyParams,
    times: tuple[float, ...] = (0.0, 2.0, 4.0, 8.0),
    factor: float = 0.9,
) -> InequalityReport:
    """factor * tau(t) against the empirical radius of u at the snapshots nearest to times.

    Times beyond the trajectory and snapshots with an undefined radius are skipped.
    """
    t0 = traj.initial.t
    end = traj.times[-1] - t0
    checked, lhs, rhs = [], [], []
    for t in times:
        if t > end + 1.0e-9:
            continue
        snap = traj.snapshot_at(t0 + t)
        radius = empirical_radius(snap.u)
        if math.isnan(radius):
            logger.warning("Empirical radius undefined at t=%.3f", t)
            continue
        checked.append(snap.t - t0)
        lhs.append(factor * ep.tau(snap.t - t0))
        rhs.append(radius)
    report = InequalityReport(
        "radius", np.array(checked), np.array(lhs), np.array(rhs), notes={"factor": factor}
    )
    logger.info("Radius check: pass=%s at %d times", report.all_pass, len(checked))
    return report
