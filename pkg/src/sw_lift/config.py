"""Configuration for sw-lift runs.

Configuration files use ``key = value`` lines grouped in sections::

    [run]
    n = 8
    kmax = 2
    seed = 0
    charge = 1/2
    radius = 1.0

Unknown sections or keys are rejected. Overrides are given as
``"section.key"`` mappings and win over the file.
"""

from __future__ import annotations

import configparser
import dataclasses
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .solver import SolverOptions
from .torus_fields import Charge


class ConfigError(ValueError):
    """Raised for unreadable or invalid configuration."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(Fraction(item.strip())) for item in text.split(",") if item.strip())


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(item.strip()) for item in text.split(",") if item.strip())


def _parse_charge(text: str) -> Charge:
    return Charge.of(Fraction(text.strip()))


def _parse_charges(text: str) -> tuple[Charge, ...]:
    return tuple(_parse_charge(item) for item in text.split(",") if item.strip())


Parser = Callable[[str], Any]

SCHEMA: dict[str, dict[str, Parser]] = {
    "run": {
        "n": int,
        "kmax": int,
        "seed": int,
        "charge": _parse_charge,
        "radius": float,
        "trials": int,
    },
    "tolerances": {
        "identity": float,
        "dirac": float,
        "decomposition": float,
        "converse": float,
        "symmetry": float,
        "varying_radius": float,
        "gradient": float,
        "ricci": float,
        "sasaki": float,
        "phi_ratio": float,
    },
    "solver": {
        "max_iterations": int,
        "tolerance": float,
        "damping": float,
        "max_damping": float,
        "stagnation_window": int,
        "stagnation_ratio": float,
        "lsqr_iterations": int,
        "precondition": _parse_bool,
        "fallback_after": int,
    },
    "lift-check": {"samples": int, "charges": _parse_charges},
    "solve": {"perturbation": float, "winding": _parse_ints},
    "ke-report": {"lambdas": _parse_floats, "spin": _parse_bool},
    "ricci-oracle": {"curvature": float, "radius": float, "step": float},
    "output": {"directory": Path},
}


@dataclass(slots=True)
class Tolerances:
    identity: float = 1e-12
    dirac: float = 1e-10
    decomposition: float = 1e-11
    converse: float = 1e-8
    symmetry: float = 1e-11
    varying_radius: float = 1e-10
    gradient: float = 1e-6
    ricci: float = 1e-6
    sasaki: float = 1e-12
    phi_ratio: float = 1e-6


@dataclass(slots=True)
class LiftCheckSettings:
    samples: int = 5
    charges: tuple[Charge, ...] = (Charge(1), Charge(2), Charge(-2), Charge(4))


@dataclass(slots=True)
class SolveSettings:
    perturbation: float = 1e-3
    winding: tuple[int, ...] = (0, 0, 0, 0)


@dataclass(slots=True)
class KEReportSettings:
    lambdas: tuple[float, ...] = (-4.0, 2.0, 6.0)
    spin: bool = False


@dataclass(slots=True)
class RicciOracleSettings:
    curvature: float = 1.0
    radius: float = 1.0
    step: float = 1e-4


@dataclass(slots=True)
class RunConfig:
    """Validated settings shared by every command."""

    n: int = 8
    kmax: int = 2
    seed: int = 0
    charge: Charge = field(default_factory=lambda: Charge(1))
    radius: float = 1.0
    trials: int = 1000
    tolerances: Tolerances = field(default_factory=Tolerances)
    solver: SolverOptions = field(default_factory=SolverOptions)
    lift_check: LiftCheckSettings = field(default_factory=LiftCheckSettings)
    solve: SolveSettings = field(default_factory=SolveSettings)
    ke_report: KEReportSettings = field(default_factory=KEReportSettings)
    ricci_oracle: RicciOracleSettings = field(default_factory=RicciOracleSettings)
    output_dir: Path = Path("sw-lift-output")

    def validate(self) -> None:
        if self.n < 4 or self.n % 2:
            raise ConfigError(f"run.n must be an even integer >= 4, got {self.n}")
        if self.kmax < 0 or 4 * self.kmax > self.n:
            raise ConfigError(f"run.kmax must satisfy 0 <= kmax <= n/4, got {self.kmax} for n={self.n}")
        if self.charge.is_zero:
            raise ConfigError("run.charge must be non-zero")
        if not self.radius > 0.0:
            raise ConfigError(f"run.radius must be positive, got {self.radius}")
        if self.seed < 0:
            raise ConfigError(f"run.seed must be non-negative, got {self.seed}")
        if self.trials < 1:
            raise ConfigError(f"run.trials must be >= 1, got {self.trials}")
        for name, value in dataclasses.asdict(self.tolerances).items():
            if not value > 0.0:
                raise ConfigError(f"tolerances.{name} must be positive, got {value}")
        if self.lift_check.samples < 1 or not self.lift_check.charges:
            raise ConfigError("lift-check needs at least one sample and one charge")
        if any(charge.is_zero for charge in self.lift_check.charges):
            raise ConfigError("lift-check.charges must all be non-zero")
        if len(self.solve.winding) != 4:
            raise ConfigError(f"solve.winding needs four integers, got {self.solve.winding}")
        if not self.ke_report.lambdas:
            raise ConfigError("ke-report.lambdas must not be empty")
        if any(lam == 0.0 for lam in self.ke_report.lambdas):
            raise ConfigError("ke-report.lambdas must not contain 0")
        if not self.ricci_oracle.radius > 0.0 or not self.ricci_oracle.step > 0.0:
            raise ConfigError("ricci-oracle.radius and ricci-oracle.step must be positive")

    def as_dict(self) -> dict[str, Any]:
        """Config echo for reports; charges are written as fractions."""
        return {
            "run": {
                "n": self.n,
                "kmax": self.kmax,
                "seed": self.seed,
                "charge": str(self.charge),
                "radius": self.radius,
                "trials": self.trials,
            },
            "tolerances": dataclasses.asdict(self.tolerances),
            "solver": dataclasses.asdict(self.solver),
            "lift-check": {
                "samples": self.lift_check.samples,
                "charges": [str(charge) for charge in self.lift_check.charges],
            },
            "solve": {
                "perturbation": self.solve.perturbation,
                "winding": list(self.solve.winding),
            },
            "ke-report": {
                "lambdas": list(self.ke_report.lambdas),
                "spin": self.ke_report.spin,
            },
            "ricci-oracle": dataclasses.asdict(self.ricci_oracle),
            "output": {"directory": str(self.output_dir)},
        }


def _read_file(path: Path) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    return {section: dict(parser.items(section)) for section in parser.sections()}


def _convert(section: str, key: str, value: Any) -> Any:
    if section not in SCHEMA:
        raise ConfigError(f"unknown config section [{section}]")
    if key not in SCHEMA[section]:
        raise ConfigError(f"unknown config key {section}.{key}")
    if not isinstance(value, str):
        return value
    try:
        return SCHEMA[section][key](value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid value for {section}.{key}: {value!r} ({exc})") from exc


def _apply(config: RunConfig, section: str, key: str, value: Any) -> None:
    if section == "run":
        setattr(config, key, value)
    elif section == "output":
        config.output_dir = Path(value)
    else:
        target = {
            "tolerances": config.tolerances,
            "solver": config.solver,
            "lift-check": config.lift_check,
            "solve": config.solve,
            "ke-report": config.ke_report,
            "ricci-oracle": config.ricci_oracle,
        }[section]
        setattr(target, key, value)


def load_config(path: Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Load a :class:`RunConfig` from ``path`` (optional) and ``section.key`` overrides."""
    config = RunConfig()
    values: dict[tuple[str, str], Any] = {}
    if path is not None:
        for section, items in _read_file(path).items():
            for key, text in items.items():
                values[(section, key)] = text
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, key = dotted.partition(".")
        if not key:
            raise ConfigError(f"override {dotted!r} must look like section.key")
        values[(section, key)] = value

    for (section, key), raw in values.items():
        _apply(config, section, key, _convert(section, key, raw))
    try:
        config.solver = SolverOptions(**dataclasses.asdict(config.solver))
    except ValueError as exc:
        raise ConfigError(f"invalid solver options: {exc}") from exc
    config.validate()
    return config


def ensure_directory(path: Path) -> Path:
    """Create ``path`` (a directory) and its parents."""
    path.mkdir(parents=True, exist_ok=True)
    return path


__all__ = [
    "ConfigError",
    "KEReportSettings",
    "LiftCheckSettings",
    "RicciOracleSettings",
    "RunConfig",
    "SolveSettings",
    "Tolerances",
    "ensure_directory",
    "load_config",
]
