"""JSON run configuration.

Unknown keys anywhere are rejected, and every value is checked before it
reaches the modules it configures. Angles are in degrees and curvatures in
1/cm, the units the experiments are reported in.

The shipped default (:data:`DEFAULT_CONFIG`, also in ``configs/default.json``)
uses the reference robot geometry, the fitted drift rate of 1.33 deg/min with a
1 deg/min spread, 0.5 deg white noise, and a 20 deg mounting-misalignment
spread. The misalignment is an effective value standing in for the
bend-dependent sensor errors the simulator does not model on its own; it
puts simulated tip errors in a 5 to 20 percent band.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .calibration import DriftModel
from .experiments import ACTIVE_KAPPAS, LENGTHS, PASSIVE_ANGLES, SPACING_MULTIPLES, SweepSettings
from .reconstruction import RobotGeometry

DEFAULT_MOUNTING_STD = 20.0


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class DriftSweep:
    n_sensors: int = 15
    duration_s: float = 600.0
    sample_every_s: float = 10.0


@dataclass(frozen=True)
class PassiveSweep:
    angles: tuple[float, ...] = PASSIVE_ANGLES
    trials_per_angle: int = 2
    offset_age_s: float = 84.0
    age_jitter_s: float = 10.0
    pre_length: float = 80.0
    bend_radius: float | None = None
    shape: str = "arc"
    bend_radius_factor: float = 1.0


@dataclass(frozen=True)
class ActiveSweep:
    kappas: tuple[float, ...] = ACTIVE_KAPPAS
    trials: int = 1
    offset_age_s: float = 87.0
    age_jitter_s: float = 10.0
    bend_radius_factor: float = 2.0


@dataclass(frozen=True)
class LengthSweep:
    lengths: tuple[float, ...] = LENGTHS
    trials: int = 1
    offset_age_s: float = 41.0
    age_jitter_s: float = 10.0
    kappa: float = 0.02
    bend_radius_factor: float = 1.0


@dataclass(frozen=True)
class SpacingSweep:
    passive_angles: tuple[float, ...] = (45.0, 90.0)
    active_kappas: tuple[float, ...] = (0.05, 0.1)
    trials_per_value: int = 1
    multiples: tuple[int, ...] = SPACING_MULTIPLES
    offset_age_s: float = 57.0
    age_jitter_s: float = 10.0
    active_bend_radius_factor: float = 2.0


@dataclass(frozen=True)
class Sweeps:
    drift: DriftSweep = DriftSweep()
    passive: PassiveSweep = PassiveSweep()
    active: ActiveSweep = ActiveSweep()
    length: LengthSweep = LengthSweep()
    spacing: SpacingSweep = SpacingSweep()


@dataclass(frozen=True)
class RunConfig:
    geometry: RobotGeometry = RobotGeometry()
    drift: DriftModel = DriftModel(mounting_std=DEFAULT_MOUNTING_STD)
    seed: int = 0
    output_dir: str = "out"
    strict: bool = False
    sweeps: Sweeps = field(default_factory=Sweeps)

    def settings(self, kind: str) -> SweepSettings:
        """Sweep settings for ``passive``, ``active``, ``length`` or ``spacing``."""
        base = SweepSettings(geometry=self.geometry, drift=self.drift, master_seed=self.seed,
                             strict=self.strict)
        sw = self.sweeps
        if kind == "passive":
            p = sw.passive
            return replace(base, offset_age_s=p.offset_age_s, age_jitter_s=p.age_jitter_s,
                           pre_length=p.pre_length, bend_radius=p.bend_radius, passive_shape=p.shape,
                           bend_radius_factor=p.bend_radius_factor)
        if kind == "active":
            a = sw.active
            return replace(base, offset_age_s=a.offset_age_s, age_jitter_s=a.age_jitter_s,
                           bend_radius_factor=a.bend_radius_factor)
        if kind == "length":
            g = sw.length
            return replace(base, offset_age_s=g.offset_age_s, age_jitter_s=g.age_jitter_s,
                           growth_kappa=g.kappa, bend_radius_factor=g.bend_radius_factor)
        if kind == "spacing":
            s = sw.spacing
            return replace(base, offset_age_s=s.offset_age_s, age_jitter_s=s.age_jitter_s)
        raise ConfigError(f"no sweep settings for kind {kind!r}")


DEFAULT_CONFIG = RunConfig()

_SECTIONS = {
    "geometry": RobotGeometry,
    "drift": DriftModel,
    "sweeps": Sweeps,
    "sweeps.drift": DriftSweep,
    "sweeps.passive": PassiveSweep,
    "sweeps.active": ActiveSweep,
    "sweeps.length": LengthSweep,
    "sweeps.spacing": SpacingSweep,
}


def _check_value(path: str, value: Any, default: Any) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float) or (default is None and path.endswith("bend_radius")):
        if value is None and default is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{path}: expected a finite number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{path}: expected a non-empty list, got {value!r}")
        return tuple(_check_value(f"{path}[{i}]", v, default[0]) for i, v in enumerate(value))
    raise ConfigError(f"{path}: unsupported value {value!r}")


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        where = f" in {path}" if path else ""
        raise ConfigError(f"unknown key {unknown[0]!r}{where}")
    default = cls()
    kwargs = {}
    for name, value in data.items():
        sub = f"{path}.{name}" if path else name
        if sub in _SECTIONS:
            kwargs[name] = _build(_SECTIONS[sub], value, sub)
        else:
            kwargs[name] = _check_value(sub, value, getattr(default, name))
    if cls is RunConfig and "drift" in data and "mounting_std" not in data["drift"]:
        kwargs["drift"] = replace(kwargs["drift"], mounting_std=DEFAULT_MOUNTING_STD)
    try:
        obj = replace(default, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path or 'config'}: {exc}") from None
    _validate(obj, path)
    return obj


def _validate(obj, path: str):
    def bad(name, msg):
        raise ConfigError(f"{path + '.' if path else ''}{name}: {msg}")

    if isinstance(obj, DriftSweep):
        if obj.n_sensors < 1:
            bad("n_sensors", "must be >= 1")
        if obj.duration_s <= 0 or obj.sample_every_s <= 0:
            bad("duration_s" if obj.duration_s <= 0 else "sample_every_s", "must be > 0")
    elif isinstance(obj, (PassiveSweep, ActiveSweep, LengthSweep, SpacingSweep)):
        for name in ("trials_per_angle", "trials", "trials_per_value"):
            if hasattr(obj, name) and getattr(obj, name) < 1:
                bad(name, "must be >= 1")
        if obj.offset_age_s < 0 or obj.age_jitter_s < 0:
            bad("offset_age_s", "ages must be >= 0")
        if isinstance(obj, PassiveSweep):
            if any(not 0 <= a <= 90 for a in obj.angles):
                bad("angles", "must lie in [0, 90] degrees")
            if obj.shape not in ("arc", "hinge"):
                bad("shape", "must be 'arc' or 'hinge'")
            if obj.bend_radius is not None and obj.bend_radius <= 0:
                bad("bend_radius", "must be > 0")
        if isinstance(obj, ActiveSweep) and any(not 0 <= k <= 0.15 for k in obj.kappas):
            bad("kappas", "must lie in [0, 0.15] 1/cm")
        if isinstance(obj, LengthSweep):
            if any(v <= 0 for v in obj.lengths):
                bad("lengths", "must be > 0")
            if not 0 <= obj.kappa <= 0.15:
                bad("kappa", "must lie in [0, 0.15] 1/cm")
        if isinstance(obj, SpacingSweep) and any(k < 1 for k in obj.multiples):
            bad("multiples", "must be >= 1")
        for name in ("bend_radius_factor", "active_bend_radius_factor"):
            if hasattr(obj, name) and getattr(obj, name) <= 0:
                bad(name, "must be > 0")


def config_from_dict(data: dict) -> RunConfig:
    return _build(RunConfig, data, "")


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    def conv(obj):
        if hasattr(obj, "__dataclass_fields__"):
            return {f.name: conv(getattr(obj, f.name)) for f in fields(obj)}
        if isinstance(obj, tuple):
            return [conv(v) for v in obj]
        return copy.copy(obj)
    return conv(cfg)
