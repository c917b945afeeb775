"""Run configuration: TOML file, defaults and validation."""

import logging
import os
import tomllib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

from .models import IntegratorConfig, Parameters, Scheme
from .rescaling import DEFAULT_DELTA_VALUES, DEFAULT_EPS_VALUES
from .spectral import MAX_AMPLIFICATION_EXPONENT, Grid

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "runs"


class ConfigError(ValueError):
    """Configuration file is unreadable, has unknown keys or violates a constraint."""


@dataclass
class GridSection:
    n_x: int = 64
    n_y: int = 129
    L_x: float = 6.283185307179586

    def build(self) -> Grid:
        return Grid(self.n_x, self.n_y, self.L_x)


@dataclass
class IntegratorSection:
    dt: float = 0.01
    t_end: float = 10.0
    scheme: str = Scheme.IMEX_CN_AB2.value
    monitor_every: int = 10
    max_norm_guard: float = 1.0e6

    def build(self) -> IntegratorConfig:
        return IntegratorConfig(
            dt=self.dt,
            t_end=self.t_end,
            scheme=Scheme(self.scheme),
            max_norm_guard=self.max_norm_guard,
        )


@dataclass
class InitialSection:
    preset: str = "analytic"
    amplitude: float = 0.5
    relative: bool = True
    checkpoint: Optional[str] = None


@dataclass
class LemmaSection:
    n_cases: int = 1000
    n_states: int = 1000


@dataclass
class ScalingSection:
    eps_values: list[float] = field(default_factory=lambda: list(DEFAULT_EPS_VALUES))
    delta_values: list[float] = field(default_factory=lambda: list(DEFAULT_DELTA_VALUES))
    n_x: int = 16
    n_y: int = 65
    t_slice: float = 0.5


@dataclass
class MmsSection:
    dt_values: list[float] = field(default_factory=lambda: [4.0e-3, 2.0e-3, 1.0e-3])
    n_y_values: list[int] = field(default_factory=lambda: [33, 65, 129])
    t_end: float = 0.5
    dt_spatial: float = 5.0e-4
    n_y_reference: int = 1025


@dataclass
class RunConfig:
    """Everything one CLI command needs; defaults reproduce the acceptance run."""

    parameters: Parameters = field(default_factory=Parameters)
    grid: GridSection = field(default_factory=GridSection)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    initial: InitialSection = field(default_factory=InitialSection)
    lemma: LemmaSection = field(default_factory=LemmaSection)
    scaling: ScalingSection = field(default_factory=ScalingSection)
    mms: MmsSection = field(default_factory=MmsSection)
    seed: int = 0
    output_dir: str = field(
        default_factory=lambda: os.getenv("CLAYER_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)
    )

    def __post_init__(self) -> None:
        if self.integrator.monitor_every < 1:
            raise ConfigError("integrator.monitor_every must be at least 1")
        if self.lemma.n_cases < 1 or self.lemma.n_states < 1:
            raise ConfigError("lemma.n_cases and lemma.n_states must be positive")
        if self.initial.preset == "" and self.initial.checkpoint is None:
            raise ConfigError("initial needs a preset or a checkpoint")
        try:
            grid = self.grid.build()
            self.integrator.build()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        exponent = self.parameters.tau0 * (1.0 + grid.xi_max)
        if exponent > MAX_AMPLIFICATION_EXPONENT:
            raise ConfigError(
                f"tau0*(1+xi_max) = {exponent:.1f} exceeds {MAX_AMPLIFICATION_EXPONENT}; "
                "lower tau0 or n_x"
            )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


SECTIONS: dict[str, type] = {
    "parameters": Parameters,
    "grid": GridSection,
    "integrator": IntegratorSection,
    "initial": InitialSection,
    "lemma": LemmaSection,
    "scaling": ScalingSection,
    "mms": MmsSection,
}
TOP_LEVEL = {"seed", "output_dir"}


def _section(name: str, cls: type, data: Any) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(f"[{name}] must be a table")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    unknown = sorted(set(data) - set(SECTIONS) - TOP_LEVEL)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    kwargs: dict[str, Any] = {
        name: _section(name, cls, data[name]) for name, cls in SECTIONS.items() if name in data
    }
    if "seed" in data:
        if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
            raise ConfigError(f"seed must be an integer, got {data['seed']!r}")
        kwargs["seed"] = data["seed"]
    if "output_dir" in data:
        kwargs["output_dir"] = str(data["output_dir"])
    return RunConfig(**kwargs)


def load_config(path: Optional[Path] = None) -> RunConfig:
    """Read a TOML run configuration; no path means all defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = config_from_dict(data)
    logger.info("Loaded configuration from %s", path)
    return config
