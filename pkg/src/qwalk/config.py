"""Run configuration (YAML, ``schema_version: 1``).

Example::

    schema_version: 1
    walk:
      family: biased          # or: coin + shifts (explicit)
      params: {rho: 0.25}
    initial:
      position: [0]
      coin: mixed             # or a list of amplitudes; complex as [re, im]
    grid: 1024
    schedule: [100, 300, 1000]
    projections: [[1.0]]      # default: first axis (1-d), four standard ones (2-d)
    moments: [0, 1, 2, 3, 4]
    method: auto              # auto | direct | spectral
    output: {dir: out, format: csv}
    sweep:                    # optional, for the ``sweep`` command
      command: limit
      params: {rho: [0.1, 0.5, 0.9]}
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .errors import ValidationError
from .walk import (
    MixedState,
    PositionState,
    ShiftSet,
    WalkSpec,
    coin_family,
    make_coin,
    mixed_state,
    point_state,
    walk_family,
)

SCHEMA_VERSION = 1
FORMATS = ("csv", "json", "both")
METHODS = ("auto", "direct", "spectral")
COMMANDS = ("simulate", "limit", "compare", "moments")


class ConfigError(ValidationError):
    pass


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise ConfigError(f"cannot read {v!r} as a number")


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    extra = set(data) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {section!r}: {', '.join(sorted(extra))}")


@dataclass
class WalkConfig:
    family: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    coin: list | None = None
    shifts: list | None = None
    label: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "WalkConfig":
        _check_keys("walk", data, {"family", "params", "coin", "shifts", "label"})
        family = data.get("family")
        coin = data.get("coin")
        if (family is None) == (coin is None):
            raise ConfigError("walk needs exactly one of 'family' or 'coin'")
        params = {str(k): float(v) for k, v in (data.get("params") or {}).items()}
        if coin is not None:
            coin = [[_pair(_complex(v)) for v in row] for row in coin]
        shifts = data.get("shifts")
        if shifts is not None:
            shifts = [[int(v) for v in (s if isinstance(s, (list, tuple)) else [s])] for s in shifts]
        if coin is not None and shifts is None:
            raise ConfigError("an explicit coin needs explicit 'shifts'")
        return cls(family, params, coin, shifts, str(data.get("label", "")))

    def to_dict(self) -> dict:
        out: dict[str, Any] = {}
        if self.family is not None:
            out["family"] = self.family
            out["params"] = dict(self.params)
        else:
            out["coin"] = copy.deepcopy(self.coin)
        if self.shifts is not None:
            out["shifts"] = copy.deepcopy(self.shifts)
        if self.label:
            out["label"] = self.label
        return out

    def build(self) -> WalkSpec:
        if self.family is not None:
            if self.shifts is None:
                spec = walk_family(self.family, **self.params)
            else:
                spec = WalkSpec(coin_family(self.family, **self.params), ShiftSet(self.shifts), self.family)
        else:
            entries = np.array([[complex(*v) for v in row] for row in self.coin])
            spec = WalkSpec(make_coin(entries), ShiftSet(self.shifts), "explicit")
        if self.label:
            spec = WalkSpec(spec.coin, spec.shifts, self.label)
        return spec


@dataclass
class InitialConfig:
    position: list[int] | None = None
    coin: Any = "mixed"

    @classmethod
    def from_dict(cls, data: dict | None) -> "InitialConfig":
        data = data or {}
        _check_keys("initial", data, {"position", "coin"})
        pos = data.get("position")
        if pos is not None:
            pos = [int(v) for v in (pos if isinstance(pos, (list, tuple)) else [pos])]
        coin = data.get("coin", "mixed")
        if coin != "mixed":
            if not isinstance(coin, (list, tuple)):
                raise ConfigError("initial coin must be 'mixed' or a list of amplitudes")
            coin = [_pair(_complex(v)) for v in coin]
        return cls(pos, coin)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"coin": copy.deepcopy(self.coin)}
        if self.position is not None:
            out["position"] = list(self.position)
        return out

    def build(self, spec: WalkSpec) -> PositionState | MixedState:
        pos = tuple(self.position) if self.position is not None else (0,) * spec.dim
        if self.coin == "mixed":
            return mixed_state(spec, pos)
        return point_state(pos, [complex(*v) for v in self.coin], spec)


@dataclass
class RunConfig:
    walk: WalkConfig
    initial: InitialConfig = field(default_factory=InitialConfig)
    grid: int = 1024
    schedule: list[int] = field(default_factory=list)
    projections: list[list[float]] | None = None
    moments: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    method: str = "auto"
    output_dir: str = "out"
    output_format: str = "csv"
    sweep: dict | None = None
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        _check_keys("config", data, {"schema_version", "walk", "initial", "grid", "schedule",
                                     "projections", "moments", "method", "output", "sweep"})
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        if "walk" not in data:
            raise ConfigError("config needs a 'walk' section")
        output = data.get("output") or {}
        _check_keys("output", output, {"dir", "format"})
        try:
            cfg = cls(
                walk=WalkConfig.from_dict(data["walk"]),
                initial=InitialConfig.from_dict(data.get("initial")),
                grid=int(data.get("grid", 1024)),
                schedule=[int(n) for n in data.get("schedule", [])],
                projections=None if data.get("projections") is None
                else [[float(v) for v in c] for c in data["projections"]],
                moments=[int(r) for r in data.get("moments", [0, 1, 2, 3, 4])],
                method=str(data.get("method", "auto")),
                output_dir=str(output.get("dir", "out")),
                output_format=str(output.get("format", "csv")),
                sweep=_sweep(data.get("sweep")),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.grid < 2:
            raise ConfigError(f"grid must be at least 2, got {self.grid}")
        if any(n < 0 for n in self.schedule):
            raise ConfigError("schedule entries must be nonnegative")
        if any(r < 0 for r in self.moments):
            raise ConfigError("moment orders must be nonnegative")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output format must be one of {FORMATS}, got {self.output_format!r}")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "schema_version": self.schema_version,
            "walk": self.walk.to_dict(),
            "initial": self.initial.to_dict(),
            "grid": self.grid,
            "schedule": list(self.schedule),
            "moments": list(self.moments),
            "method": self.method,
            "output": {"dir": self.output_dir, "format": self.output_format},
        }
        if self.projections is not None:
            out["projections"] = [list(c) for c in self.projections]
        if self.sweep is not None:
            out["sweep"] = copy.deepcopy(self.sweep)
        return out

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    def build_walk(self) -> WalkSpec:
        return self.walk.build()

    def build_initial(self, spec: WalkSpec):
        return self.initial.build(spec)


def _sweep(data):
    if data is None:
        return None
    _check_keys("sweep", data, {"command", "params"})
    command = data.get("command", "limit")
    if command not in COMMANDS:
        raise ConfigError(f"sweep command must be one of {COMMANDS}, got {command!r}")
    params = data.get("params") or {}
    if not params or not all(isinstance(v, (list, tuple)) and v for v in params.values()):
        raise ConfigError("sweep params must map names to non-empty lists")
    return {"command": command, "params": {str(k): [float(x) for x in v] for k, v in params.items()}}


def loads(text: str) -> RunConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}".replace("\n", " ")) from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a YAML mapping")
    return RunConfig.from_dict(data)


def load(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return loads(text)
