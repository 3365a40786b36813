"""Experiment configuration: YAML files, defaults and validation."""
from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import yaml

from .controller import ControllerSpec, ControlMatrix, Family
from .dynamics import ControlledSystem, SystemState
from .game import PayoffMatrix
from .integrator import IntegratorConfig

DEFAULTS: dict = {
    "payoff": [1.0, 0.0, 0.0, 1.0],
    "controller": {"family": "none", "k": 0.0, "h": 0.0, "g0": 0.0, "matrix": "none"},
    "initial_x": 0.5,
    "integrator": {"dt": 1e-3, "t_end": 50.0, "record_every": 100},
    "output": {"directory": "out", "formats": ["csv", "svg"]},
}

FORMATS = {"csv", "svg", "png"}


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_file(path: str | Path) -> dict:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping at top level")
    return data


@dataclass(frozen=True)
class ExperimentConfig:
    payoff: PayoffMatrix
    controller: ControllerSpec
    initial_x: float
    integrator: IntegratorConfig
    output_dir: Path
    formats: tuple[str, ...]

    @classmethod
    def from_mapping(cls, raw: dict) -> ExperimentConfig:
        """Validate a (possibly partial) mapping layered over DEFAULTS."""
        unknown = set(raw) - set(DEFAULTS) - {"grid", "game", "workers"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        data = deep_merge(DEFAULTS, raw)
        try:
            payoff = data["payoff"]
            if len(payoff) != 4:
                raise ConfigError("payoff needs exactly four entries a b c d")
            m = PayoffMatrix.from_sequence(payoff)
            ctl = data["controller"]
            spec = ControllerSpec(
                ControlMatrix.parse(str(ctl["matrix"])),
                Family(str(ctl["family"]).lower()),
                float(ctl["k"]),
                float(ctl["h"]),
                float(ctl["g0"]),
            )
            x0 = float(data["initial_x"])
            SystemState(x0, spec.g0)
            integ = data["integrator"]
            icfg = IntegratorConfig(float(integ["dt"]), float(integ["t_end"]), int(integ["record_every"]))
            out = data["output"]
            formats = tuple(str(f).lower() for f in out["formats"])
            bad = set(formats) - FORMATS
            if bad:
                raise ConfigError(f"unknown output formats: {', '.join(sorted(bad))}")
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(m, spec, x0, icfg, Path(out["directory"]), formats)

    def system(self) -> ControlledSystem:
        return ControlledSystem(self.payoff, self.controller)

    def initial_state(self) -> SystemState:
        return SystemState(self.initial_x, self.controller.g0)

    def to_mapping(self) -> dict:
        """Fully resolved config; loading it back reproduces this run."""
        c = self.controller
        return {
            "payoff": list(self.payoff.as_tuple()),
            "controller": {
                "family": c.family.value, "k": c.k, "h": c.h, "g0": c.g0,
                "matrix": c.control_matrix.label(),
            },
            "initial_x": self.initial_x,
            "integrator": {
                "dt": self.integrator.dt, "t_end": self.integrator.t_end,
                "record_every": self.integrator.record_every,
            },
            "output": {"directory": str(self.output_dir), "formats": list(self.formats)},
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_mapping(), sort_keys=False), encoding="utf-8")
