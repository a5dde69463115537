"""Session configuration: one flat, human-editable YAML file.

Every tunable the engine exposes lives here with its default; loading
validates values by constructing the actual parameter objects, so a config
can never describe a robot the other modules would reject.  The config hash
stamps telemetry logs so replays refuse mismatched sessions.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any, Mapping, Union

import yaml

from .gait_engine import RHO_MAX_DEFAULT, TAU_DEFAULT
from .limb_kinematics import ModuleParams
from .locomotion_sim import OdometryParams, SimParams
from .teleop_map import TeleopFidelity, TeleopParams
from .tetra_frames import DELTA_DEFAULT, TetraGeometry

__all__ = [
    "ConfigError",
    "SessionConfig",
    "config_hash",
    "default_config",
    "from_mapping",
    "load_config",
    "to_mapping",
    "to_sim_params",
    "to_yaml",
]


class ConfigError(ValueError):
    """Bad config file: unknown key, wrong type, or invalid value."""


@dataclass(frozen=True)
class SessionConfig:
    # timing
    tick_hz: float = 50.0
    tau: int = TAU_DEFAULT
    # teleoperation
    rho_max: float = RHO_MAX_DEFAULT
    deadzone: float = 0.01
    fidelity: str = "hard_gate"
    gate_sharpness: float = 500.0
    volt_lo: float = 1.0
    volt_hi: float = 5.0
    # geometry
    limb_length: float = 0.24
    anchor_radius: float = 0.02
    mount_angle_offset: float = DELTA_DEFAULT
    limb_mass: float = 0.15
    hub_mass: float = 0.05
    # muscle pressure map
    pressure_gain: float = 80.0
    pressure_offset: float = 0.5
    pressure_min: float = 0.0
    pressure_max: float = 3.0
    # odometry heuristic
    k_v: float = 0.5
    k_omega: float = 4.0
    k_inplace: float = 4.0
    # stabilization and recovery
    bend_intensity: float = 0.0
    correction_rho: float = 0.08
    maneuver_cycles: int = 3


_FIELDS = {f.name: f for f in dataclasses.fields(SessionConfig)}
_INT_FIELDS = {name for name, f in _FIELDS.items() if f.type == "int"}
_STR_FIELDS = {name for name, f in _FIELDS.items() if f.type == "str"}


def default_config() -> SessionConfig:
    return SessionConfig()


def to_sim_params(config: SessionConfig) -> SimParams:
    """Build the validated runtime parameter tree; raises ConfigError when
    any module rejects its slice of the config."""
    try:
        fidelity = TeleopFidelity(config.fidelity)
    except ValueError:
        names = ", ".join(f.value for f in TeleopFidelity)
        raise ConfigError(f"fidelity must be one of: {names}") from None
    try:
        module = ModuleParams(
            length=config.limb_length,
            anchor_radius=config.anchor_radius,
            pressure_gain=config.pressure_gain,
            pressure_offset=config.pressure_offset,
            pressure_min=config.pressure_min,
            pressure_max=config.pressure_max,
        )
        geometry = TetraGeometry(
            delta=config.mount_angle_offset,
            module=module,
            limb_mass=config.limb_mass,
            hub_mass=config.hub_mass,
        )
        teleop = TeleopParams(
            deadzone=config.deadzone,
            rho_max=config.rho_max,
            volt_lo=config.volt_lo,
            volt_hi=config.volt_hi,
            gate_sharpness=config.gate_sharpness,
            fidelity=fidelity,
        )
        odometry = OdometryParams(
            k_v=config.k_v, k_omega=config.k_omega, k_inplace=config.k_inplace
        )
        params = SimParams(
            geometry=geometry,
            teleop=teleop,
            odometry=odometry,
            tau=config.tau,
            tick_hz=config.tick_hz,
            bend_intensity=config.bend_intensity,
            correction_rho=config.correction_rho,
            maneuver_cycles=config.maneuver_cycles,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    # the gait compiler rejects this lazily; fail at load time instead
    if config.rho_max > config.limb_length * 2.0 / math.pi:
        raise ConfigError(
            f"rho_max {config.rho_max} exceeds the limb reach "
            f"{config.limb_length * 2.0 / math.pi:.4f}"
        )
    return params


def _coerce(name: str, value: Any) -> Any:
    if name in _STR_FIELDS:
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if name in _INT_FIELDS:
        if int(value) != value:
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def from_mapping(data: Mapping[str, Any]) -> SessionConfig:
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    values = {name: _coerce(name, value) for name, value in data.items()}
    config = SessionConfig(**values)
    to_sim_params(config)  # cascade all module validations now
    return config


def load_config(source: Union[str, Path, IO[str], None]) -> SessionConfig:
    """Read a YAML config; ``None`` yields the defaults."""
    if source is None:
        return default_config()
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_config(fh)
    try:
        data = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    if data is None:
        return default_config()
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of key: value pairs")
    return from_mapping(data)


def to_mapping(config: SessionConfig) -> dict:
    return dataclasses.asdict(config)


def to_yaml(config: SessionConfig) -> str:
    return yaml.safe_dump(to_mapping(config), sort_keys=True)


def config_hash(config: SessionConfig) -> str:
    """Stable digest of the full configuration (stamped into telemetry logs)."""
    canon = json.dumps(to_mapping(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
