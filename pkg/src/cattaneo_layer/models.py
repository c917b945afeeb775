"""Data models for the Cattaneo boundary-layer simulator."""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .spectral import Grid, SpectralField

ForcingFn = Callable[[float], tuple[SpectralField, SpectralField]]


@dataclass(frozen=True)
class Parameters:
    """Dimensionless constants of the boundary-layer system and the analytic framework."""

    H: float = 1.0
    J: float = 1.0
    kappa: float = 1.0
    Pr_m: float = 1.0
    tau0: float = 1.0
    s: float = 3.0

    def __post_init__(self) -> None:
        if self.H < 0:
            raise ValueError(f"H must be nonnegative, got {self.H}")
        for name in ("J", "kappa", "Pr_m", "tau0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.s > 2:
            raise ValueError(f"s must exceed 2, got {self.s}")

    @property
    def magnetic_inertia(self) -> float:
        """kappa / Pr_m, the Cattaneo coefficient of the b1 equation."""
        return self.kappa / self.Pr_m


@dataclass(frozen=True)
class State:
    u: SpectralField
    ut: SpectralField
    b1: SpectralField
    b1t: SpectralField
    t: float = 0.0

    def __post_init__(self) -> None:
        grids = {self.u.grid, self.ut.grid, self.b1.grid, self.b1t.grid}
        if len(grids) != 1:
            raise ValueError("all state components must share one grid")

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> "State":
        z = SpectralField.zeros(grid)
        return cls(z, z, z, z, t)

    def components(self) -> tuple[SpectralField, SpectralField, SpectralField, SpectralField]:
        return (self.u, self.ut, self.b1, self.b1t)

    def with_dirichlet(self) -> "State":
        return State(
            self.u.with_dirichlet(),
            self.ut.with_dirichlet(),
            self.b1.with_dirichlet(),
            self.b1t.with_dirichlet(),
            self.t,
        )

    def scaled(self, alpha: float) -> "State":
        return State(self.u * alpha, self.ut * alpha, self.b1 * alpha, self.b1t * alpha, self.t)

    def at_time(self, t: float) -> "State":
        return replace(self, t=t)

    def is_finite(self) -> bool:
        return all(c.is_finite() for c in self.components())

    def max_wall_trace(self) -> float:
        """Largest |coefficient| on the y=0 and y=1 rows over all components."""
        return max(
            float(np.max(np.abs(c.coeffs[:, [0, -1]]))) for c in self.components()
        )


@dataclass(frozen=True)
class DerivedFields:
    v: SpectralField
    b2: SpectralField
    e: SpectralField
    p: SpectralField
    dpx: SpectralField


class Scheme(str, Enum):
    IMEX_CN_AB2 = "imex_cn_ab2"
    IMEX_EULER = "imex_euler"


@dataclass
class IntegratorConfig:
    dt: float = 0.01
    t_end: float = 10.0
    scheme: Scheme = Scheme.IMEX_CN_AB2
    mms_forcing: Optional[ForcingFn] = None
    max_norm_guard: float = 1.0e6
    linear_only: bool = False

    def __post_init__(self) -> None:
        self.scheme = Scheme(self.scheme)
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if not self.max_norm_guard > 0:
            raise ValueError(f"max_norm_guard must be positive, got {self.max_norm_guard}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class EnergyReport:
    t: float
    Es: float
    Es_half: float
    Es_one: float
    Ds0: float
    Ds_half: float
    Ds_one: float
    Ds_threehalf: float
    tau_t: float
    tau_empirical: float = math.nan
    Ds_one_printed: float = math.nan


@dataclass
class Trajectory:
    params: Parameters
    grid: Grid
    config: IntegratorConfig
    snapshots: list[State] = field(default_factory=list)
    reports: list[EnergyReport] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def initial(self) -> State:
        return self.snapshots[0]

    def snapshot_at(self, t: float) -> State:
        """Snapshot whose time is closest to t."""
        return self.snapshots[int(np.argmin(np.abs(self.times - t)))]


@dataclass(frozen=True)
class EnergyParams:
    """Weight-schedule constants derived from Parameters."""

    tau0: float
    m_small: float
    M_big: float
    R: float
    lam: float

    @classmethod
    def from_parameters(cls, params: Parameters) -> "EnergyParams":
        m_small = min(1.0, params.J, params.magnetic_inertia)
        M_big = max(1.0, params.J, params.magnetic_inertia)
        R = 1.0 / (4.0 * M_big)
        return cls(tau0=params.tau0, m_small=m_small, M_big=M_big, R=R, lam=R / 4.0)

    def eta(self, t: float) -> float:
        return self.tau0 * (1.0 - math.exp(-self.lam * t))

    def eta_prime(self, t: float) -> float:
        return self.lam * self.tau0 * math.exp(-self.lam * t)

    def eta_second(self, t: float) -> float:
        return -self.lam**2 * self.tau0 * math.exp(-self.lam * t)

    def tau(self, t: float) -> float:
        """Radius tau0 - eta(t) = tau0 e^{-lam t}."""
        return self.tau0 * math.exp(-self.lam * t)


@dataclass(frozen=True)
class ConstantsTable:
    D_s: float
    eps_s: float
    delta_small: float
    C_decay: float
    bootstrap_threshold: float


@dataclass
class InequalityReport:
    """Per-sample verdict series for an inequality LHS(t) <= RHS(t)."""

    name: str
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    rel_tol: float = 1.0e-12
    notes: dict[str, object] = field(default_factory=dict)

    @property
    def slack(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def tolerance(self) -> np.ndarray:
        return self.rel_tol * np.maximum(np.abs(self.lhs), np.abs(self.rhs))

    @property
    def passes(self) -> np.ndarray:
        return self.slack >= -self.tolerance

    @property
    def all_pass(self) -> bool:
        return bool(np.all(self.passes))

    @property
    def worst_slack(self) -> float:
        return float(np.min(self.slack)) if len(self.slack) else 0.0


@dataclass(frozen=True)
class LemmaCase:
    f: SpectralField
    g: SpectralField
    sigma1: float
    sigma2: float
    tau: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.f.grid != self.g.grid:
            raise ValueError("f and g must share one grid")
        if not 0.5 < self.sigma2 <= self.sigma1:
            raise ValueError(
                f"need 1/2 < sigma2 <= sigma1, got sigma1={self.sigma1}, sigma2={self.sigma2}"
            )
        if self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")


class Regime(str, Enum):
    PRANDTL = "prandtl"
    HARTMANN = "hartmann"


@dataclass(frozen=True)
class RescalingParams:
    """Full-system numbers for one point of a boundary-layer sweep."""

    Re: float
    H_limit: float
    Pr_m: float
    U0_over_c: float
    Jscript: float
    regime: Regime

    def __post_init__(self) -> None:
        object.__setattr__(self, "regime", Regime(self.regime))
        for name in ("Re", "Pr_m", "U0_over_c", "Jscript"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.H_limit < 0:
            raise ValueError(f"H_limit must be nonnegative, got {self.H_limit}")
        if self.regime is Regime.HARTMANN and self.H_limit == 0:
            raise ValueError("the Hartmann regime needs H_limit > 0")

    @classmethod
    def for_limit(cls, regime: Regime, small: float, limit: Parameters) -> "RescalingParams":
        """Full-system numbers whose small parameter is `small` and whose limit is `limit`."""
        regime = Regime(regime)
        if regime is Regime.PRANDTL:
            Re = small**-2
            U0_over_c = math.sqrt(limit.kappa * Re)
        else:
            Re = 1.0 / small
            U0_over_c = math.sqrt(limit.kappa)
        return cls(Re, limit.H, limit.Pr_m, U0_over_c, limit.J / limit.kappa, regime)

    @property
    def Ha(self) -> float:
        return self.H_limit * self.Re

    @property
    def Re_m(self) -> float:
        return self.Pr_m * self.Re

    @property
    def eps(self) -> float:
        return self.Re**-0.5

    @property
    def delta(self) -> float:
        return self.H_limit / self.Ha

    @property
    def small(self) -> float:
        return self.eps if self.regime is Regime.PRANDTL else self.delta

    @property
    def kappa_eff(self) -> float:
        if self.regime is Regime.PRANDTL:
            return self.U0_over_c**2 / self.Re
        return self.U0_over_c**2


@dataclass
class TermOrder:
    equation: str
    term: str
    claimed: float
    observed: float
    residual: float
    multiplier: float = 0.0

    @property
    def scaled_claimed(self) -> float:
        """Exponent after the equation's prescribed multiplication."""
        return self.claimed + self.multiplier

    def within(self, tol: float = 0.2) -> bool:
        return math.isfinite(self.observed) and abs(self.observed - self.claimed) <= tol


@dataclass
class TermOrderTable:
    regime: Regime
    small_values: np.ndarray
    rows: list[TermOrder] = field(default_factory=list)
    degenerate: bool = False

    def all_within(self, tol: float = 0.2) -> bool:
        return not self.degenerate and all(row.within(tol) for row in self.rows)

    def row(self, equation: str, term: str) -> TermOrder:
        for r in self.rows:
            if r.equation == equation and r.term == term:
                return r
        raise KeyError(f"{equation}/{term}")
