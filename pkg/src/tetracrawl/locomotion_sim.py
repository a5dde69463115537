"""Deterministic quasi-static crawler simulator with telemetry recording.

One tick: classify the joystick, advance the gait clock, compile limb
configurations (remapped onto physical limbs when the robot is toppled),
integrate a planar odometry estimate, recompute the stability margin.
No dynamics: displacement per tick follows a declared heuristic law, and
topples happen only by injection.

State transitions are pure functions over frozen state; ``Simulator`` wraps
them for callers that want a mutable handle.  Identical input streams give
bit-identical trajectories and telemetry lines.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from typing import IO, Dict, Iterator, List, Mapping, Optional, Tuple

from .gait_engine import (
    CRAWLING_MODES,
    IN_PLACE_MODES,
    RHO_MAX_DEFAULT,
    TAU_DEFAULT,
    GaitClock,
    GaitMode,
    GaitParams,
    bend_target,
    compile_targets,
    gait_targets,
)
from .limb_kinematics import ConfigPair, ik_planar, joint_from_config, pressure_from_joint
from .teleop_map import JoystickState, TeleopParams, classify
from .tetra_frames import (
    GlobalPose,
    LimbId,
    TetraGeometry,
    body_limb_bend,
    limb_tip_body,
    sample_limb_curve,
    stability_margin,
    straight_config,
    wrap_angle,
)
from .topple import (
    CANONICAL,
    ManeuverStep,
    OrientationState,
    apply_maneuver,
    apply_remap,
    correction_maneuver,
    random_orientation,
    remap_for,
)

__all__ = [
    "OdometryParams",
    "Pose2D",
    "SimParams",
    "SimState",
    "Simulator",
    "TelemetryFrame",
    "TelemetryLogError",
    "TelemetryWriter",
    "activate_remap",
    "initial_state",
    "inject_topple",
    "read_telemetry",
    "snapshot",
    "start_correction",
    "step",
]

CURVE_POINTS_DEFAULT = 16

_SUPPORT_ROLES = (LimbId.LIMB2, LimbId.LIMB3, LimbId.LIMB4)
_CENTER_POSE = GlobalPose()


@dataclass(frozen=True)
class OdometryParams:
    """Heuristic displacement law: pose change per unit gait radius per cycle.

    The plant provides no displacement model, so these gains are declared,
    not identified; kinematic correctness never depends on them.
    """

    k_v: float = 0.5
    k_omega: float = 4.0
    k_inplace: float = 4.0

    def __post_init__(self) -> None:
        for name in ("k_v", "k_omega", "k_inplace"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Pose2D:
    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0

    def moved(self, ds: float, dpsi: float) -> "Pose2D":
        """Turn first, then advance along the new heading."""
        psi = wrap_angle(self.psi + dpsi)
        return Pose2D(self.x + ds * math.cos(psi), self.y + ds * math.sin(psi), psi)


@dataclass(frozen=True)
class SimParams:
    geometry: TetraGeometry = field(default_factory=TetraGeometry)
    teleop: TeleopParams = field(default_factory=TeleopParams)
    odometry: OdometryParams = field(default_factory=OdometryParams)
    tau: int = TAU_DEFAULT
    tick_hz: float = 50.0
    #: 0 disables the stabilizing body-limb bend; otherwise the body limb
    #: leans toward the instantaneous support-triangle centroid while moving
    bend_intensity: float = 0.0
    correction_rho: float = 0.08
    maneuver_cycles: int = 3

    def __post_init__(self) -> None:
        if self.tau < 1:
            raise ValueError("tau must be at least one tick")
        if self.tick_hz <= 0.0:
            raise ValueError("tick_hz must be positive")
        if not 0.0 <= self.bend_intensity <= 1.0:
            raise ValueError("bend_intensity must lie in [0, 1]")
        if not 0.0 < self.correction_rho <= self.teleop.rho_max:
            raise ValueError("correction_rho must lie in (0, rho_max]")
        if self.maneuver_cycles < 1:
            raise ValueError("maneuver_cycles must be at least 1")


@dataclass(frozen=True)
class SimState:
    pose: Pose2D
    orientation: OrientationState
    clock: GaitClock
    mode: GaitMode
    gait: GaitParams
    limb_configs: Mapping[LimbId, ConfigPair]
    margin: float
    awaiting_recovery: bool = False
    remap_active: bool = False
    maneuver_plan: Tuple[ManeuverStep, ...] = ()
    step_ticks_left: int = 0

    @property
    def tick(self) -> int:
        return self.clock.tick

    @property
    def correcting(self) -> bool:
        return bool(self.maneuver_plan)


def _support_margin(role_configs: Mapping[LimbId, ConfigPair], params: SimParams) -> float:
    return stability_margin(
        role_configs, _CENTER_POSE, params.geometry, contacts=_SUPPORT_ROLES
    )


def _rest_margin(params: SimParams) -> float:
    return _support_margin(straight_config(), params)


def _role_targets(
    mode: GaitMode, gait: GaitParams, clock: GaitClock, params: SimParams
) -> Dict[LimbId, Tuple[float, float]]:
    targets = dict(gait_targets(mode, gait, clock))
    if params.bend_intensity > 0.0 and mode is not GaitMode.IDLE:
        # lean the body limb toward the centroid of the deformed support
        # triangle; tracking the phase keeps the margin above the unbent
        # value at every tick, which a fixed heading cannot do
        centroid_x = centroid_y = 0.0
        for limb in _SUPPORT_ROLES:
            cfg = ik_planar(*targets[limb], params=params.geometry.module)
            tip = limb_tip_body(limb, cfg, params.geometry)
            centroid_x += tip[0] / len(_SUPPORT_ROLES)
            centroid_y += tip[1] / len(_SUPPORT_ROLES)
        heading = math.atan2(centroid_y, centroid_x)
        bend = body_limb_bend(heading, params.bend_intensity)
        targets[LimbId.LIMB1] = bend_target(bend, params.geometry)
    return targets


def initial_state(params: SimParams | None = None) -> SimState:
    params = params or SimParams()
    return SimState(
        pose=Pose2D(),
        orientation=CANONICAL,
        clock=GaitClock(0, params.tau),
        mode=GaitMode.IDLE,
        gait=GaitParams.idle(tau=params.tau),
        limb_configs=straight_config(),
        margin=_rest_margin(params),
    )


def _integrate(pose: Pose2D, mode: GaitMode, gait: GaitParams, params: SimParams) -> Pose2D:
    per_cycle = 2.0 * math.pi / params.tau
    od = params.odometry
    if mode in CRAWLING_MODES:
        ds = od.k_v * 0.5 * (gait.rho3 + gait.rho4) * per_cycle * gait.direction_sign
        dpsi = -od.k_omega * (gait.rho3 - gait.rho4) * per_cycle
        return pose.moved(ds, dpsi)
    if mode in IN_PLACE_MODES:
        sign = 1.0 if mode is GaitMode.IN_PLACE_LEFT else -1.0
        return pose.moved(0.0, sign * od.k_inplace * gait.rho_inplace * per_cycle)
    return pose


def _maneuver_tick(state: SimState, params: SimParams) -> SimState:
    active = state.maneuver_plan[0]
    total = active.cycles * params.tau
    elapsed = total - state.step_ticks_left
    phase = 2.0 * math.pi * (elapsed % params.tau) / params.tau * active.direction
    targets: Dict[LimbId, Tuple[float, float]] = {limb: (0.0, 0.0) for limb in LimbId}
    rho = params.correction_rho
    targets[active.pivot_limb] = (rho * math.cos(phase), rho * math.sin(phase))
    commands = compile_targets(targets, params.geometry)

    ticks_left = state.step_ticks_left - 1
    orientation = state.orientation
    plan = state.maneuver_plan
    awaiting = True
    if ticks_left <= 0:
        orientation = apply_maneuver(orientation, active)
        plan = plan[1:]
        ticks_left = plan[0].cycles * params.tau if plan else 0
        awaiting = bool(plan)
    # the body pivots in place; pose and nominal margin are held while the
    # scripted roll runs (the transient is outside the quasi-static model)
    return replace(
        state,
        clock=state.clock.advanced(1),
        mode=GaitMode.IDLE,
        gait=GaitParams.idle(tau=params.tau),
        limb_configs={limb: cmd.config for limb, cmd in commands.items()},
        margin=_rest_margin(params),
        orientation=orientation,
        maneuver_plan=plan,
        step_ticks_left=ticks_left,
        awaiting_recovery=awaiting,
    )


def _single_tick(state: SimState, js: JoystickState, params: SimParams) -> SimState:
    if state.maneuver_plan:
        return _maneuver_tick(state, params)
    if state.awaiting_recovery:
        # toppled and not yet remapped or corrected: hold station
        return replace(
            state,
            clock=state.clock.advanced(1),
            mode=GaitMode.IDLE,
            gait=GaitParams.idle(tau=params.tau),
            limb_configs=straight_config(),
            margin=_rest_margin(params),
        )
    mode, gait = classify(js, params.teleop, params.tau)
    clock = state.clock.advanced(1)
    role_targets = _role_targets(mode, gait, clock, params)
    role_commands = compile_targets(role_targets, params.geometry)
    margin = _support_margin(
        {limb: cmd.config for limb, cmd in role_commands.items()}, params
    )
    if state.remap_active and not state.orientation.is_canonical:
        table = remap_for(state.orientation)
        phys_commands = compile_targets(apply_remap(table, role_targets), params.geometry)
    else:
        phys_commands = role_commands
    return replace(
        state,
        pose=_integrate(state.pose, mode, gait, params),
        clock=clock,
        mode=mode,
        gait=gait,
        limb_configs={limb: cmd.config for limb, cmd in phys_commands.items()},
        margin=margin,
    )


def step(state: SimState, js: JoystickState, params: SimParams, dt_ticks: int = 1) -> SimState:
    """Advance the simulation by ``dt_ticks`` fixed steps under one input."""
    if dt_ticks < 1:
        raise ValueError("dt_ticks must be at least 1")
    for _ in range(dt_ticks):
        state = _single_tick(state, js, params)
    return state


def inject_topple(
    state: SimState,
    params: SimParams,
    new_orientation: OrientationState | None = None,
    rng: random.Random | None = None,
) -> SimState:
    """Instant orientation change; motion stays frozen until remap/correction."""
    orientation = new_orientation if new_orientation is not None else random_orientation(rng)
    if orientation == state.orientation:
        return state
    return replace(
        state,
        orientation=orientation,
        awaiting_recovery=True,
        remap_active=False,
        maneuver_plan=(),
        step_ticks_left=0,
        mode=GaitMode.IDLE,
        gait=GaitParams.idle(tau=params.tau),
        limb_configs=straight_config(),
        margin=_rest_margin(params),
    )


def activate_remap(state: SimState, params: SimParams) -> SimState:
    """Resume locomotion in the current orientation by reassigning limb roles."""
    del params
    return replace(
        state,
        remap_active=not state.orientation.is_canonical,
        awaiting_recovery=False,
    )


def start_correction(
    state: SimState,
    params: SimParams,
    target: OrientationState = CANONICAL,
) -> SimState:
    """Queue the pivot plan that rolls the body back to ``target``."""
    plan = correction_maneuver(state.orientation, target, cycles=params.maneuver_cycles)
    if not plan:
        return replace(state, awaiting_recovery=False)
    return replace(
        state,
        maneuver_plan=plan,
        step_ticks_left=plan[0].cycles * params.tau,
        awaiting_recovery=True,
        remap_active=False,
        mode=GaitMode.IDLE,
        gait=GaitParams.idle(tau=params.tau),
    )


@dataclass(frozen=True)
class TelemetryFrame:
    """One tick of observable state; the only thing UIs ever see."""

    tick: int
    pose: Tuple[float, float, float]
    mode: str
    rho3: float
    rho4: float
    rho_inplace: float
    limbs: Tuple[Tuple[float, float], ...]          # (theta, phi) per limb, 1..4
    pressures: Tuple[float, ...]                     # 12 values, limb-major
    margin: float
    orientation: Tuple[int, int]                     # (top_limb, roll_index)
    awaiting_recovery: bool
    correcting: bool
    curves: Optional[Tuple[Tuple[Tuple[float, float, float], ...], ...]] = None

    def to_dict(self) -> dict:
        d = {
            "tick": self.tick,
            "pose": list(self.pose),
            "mode": self.mode,
            "rho3": self.rho3,
            "rho4": self.rho4,
            "rho_inplace": self.rho_inplace,
            "limbs": [list(p) for p in self.limbs],
            "pressures": list(self.pressures),
            "margin": self.margin,
            "orientation": list(self.orientation),
            "awaiting_recovery": self.awaiting_recovery,
            "correcting": self.correcting,
        }
        if self.curves is not None:
            d["curves"] = [[list(pt) for pt in curve] for curve in self.curves]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TelemetryFrame":
        curves = d.get("curves")
        return cls(
            tick=d["tick"],
            pose=tuple(d["pose"]),
            mode=d["mode"],
            rho3=d["rho3"],
            rho4=d["rho4"],
            rho_inplace=d["rho_inplace"],
            limbs=tuple(tuple(p) for p in d["limbs"]),
            pressures=tuple(d["pressures"]),
            margin=d["margin"],
            orientation=tuple(d["orientation"]),
            awaiting_recovery=d["awaiting_recovery"],
            correcting=d["correcting"],
            curves=None if curves is None else tuple(
                tuple(tuple(pt) for pt in curve) for curve in curves
            ),
        )

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_line(cls, line: str) -> "TelemetryFrame":
        return cls.from_dict(json.loads(line))


def snapshot(
    state: SimState,
    params: SimParams,
    include_curves: bool = True,
    curve_points: int = CURVE_POINTS_DEFAULT,
) -> TelemetryFrame:
    """Immutable telemetry view of the current state."""
    limbs = []
    pressures: List[float] = []
    curves = [] if include_curves else None
    for limb in LimbId:
        cfg = state.limb_configs[limb]
        limbs.append((cfg.theta, cfg.phi))
        pm = pressure_from_joint(joint_from_config(cfg, params.geometry.module),
                                 params.geometry.module)
        pressures.extend((pm.p1, pm.p2, pm.p3))
        if curves is not None:
            pts = sample_limb_curve(limb, cfg, curve_points, params.geometry)
            curves.append(tuple(tuple(float(v) for v in p) for p in pts))
    return TelemetryFrame(
        tick=state.tick,
        pose=(state.pose.x, state.pose.y, state.pose.psi),
        mode=state.mode.value,
        rho3=state.gait.rho3,
        rho4=state.gait.rho4,
        rho_inplace=state.gait.rho_inplace,
        limbs=tuple(limbs),
        pressures=tuple(pressures),
        margin=state.margin,
        orientation=(int(state.orientation.top_limb), state.orientation.roll_index),
        awaiting_recovery=state.awaiting_recovery,
        correcting=state.correcting,
        curves=None if curves is None else tuple(curves),
    )


class TelemetryLogError(RuntimeError):
    """Raised when a telemetry log is malformed or truncated."""


LOG_FORMAT_NAME = "tetracrawl-telemetry"
LOG_FORMAT_VERSION = 1


class TelemetryWriter:
    """Newline-delimited JSON log: one header line, then one frame per line."""

    def __init__(self, out: IO[str], config_hash: str, tick_hz: float) -> None:
        self._out = out
        header = {
            "format": LOG_FORMAT_NAME,
            "version": LOG_FORMAT_VERSION,
            "config_hash": config_hash,
            "tick_hz": tick_hz,
        }
        self._out.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        self.frames_written = 0

    def append(self, frame: TelemetryFrame) -> None:
        self.append_line(frame.to_json_line())

    def append_line(self, line: str) -> None:
        # Raw variant so a service can log the exact bytes it broadcast.
        self._out.write(line + "\n")
        self.frames_written += 1


def read_telemetry(src: IO[str]) -> Tuple[dict, Iterator[TelemetryFrame]]:
    """Parse a telemetry log; frames are yielded lazily.

    Raises TelemetryLogError on a bad header; the iterator raises it with a
    line number when a frame line is corrupt or truncated.
    """
    header_line = src.readline()
    if not header_line.strip():
        raise TelemetryLogError("empty log: missing header line")
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise TelemetryLogError(f"header is not valid JSON: {exc}") from None
    if not isinstance(header, dict) or header.get("format") != LOG_FORMAT_NAME:
        raise TelemetryLogError("not a telemetry log (bad format marker)")

    def frames() -> Iterator[TelemetryFrame]:
        for lineno, line in enumerate(src, start=2):
            if not line.strip():
                continue
            try:
                yield TelemetryFrame.from_json_line(line)
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise TelemetryLogError(
                    f"line {lineno}: corrupt or truncated frame ({exc})"
                ) from None

    return header, frames()


class Simulator:
    """Mutable wrapper around the pure state transitions."""

    def __init__(self, params: SimParams | None = None) -> None:
        self.params = params or SimParams()
        self.state = initial_state(self.params)

    def step(self, js: JoystickState | None = None, dt_ticks: int = 1) -> SimState:
        self.state = step(self.state, js or JoystickState(0.0, 0.0), self.params, dt_ticks)
        return self.state

    def inject_topple(
        self,
        new_orientation: OrientationState | None = None,
        rng: random.Random | None = None,
    ) -> SimState:
        self.state = inject_topple(self.state, self.params, new_orientation, rng)
        return self.state

    def remap(self) -> SimState:
        self.state = activate_remap(self.state, self.params)
        return self.state

    def correct_orientation(self, target: OrientationState = CANONICAL) -> SimState:
        self.state = start_correction(self.state, self.params, target)
        return self.state

    def snapshot(self, include_curves: bool = True,
                 curve_points: int = CURVE_POINTS_DEFAULT) -> TelemetryFrame:
        return snapshot(self.state, self.params, include_curves, curve_points)
