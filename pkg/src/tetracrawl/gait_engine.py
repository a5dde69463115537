"""Cyclic crawling and turning gaits.

Locomotion comes from the two rear limbs (roles 3 and 4) sweeping circular
tip trajectories in their own base planes while the front limb braces and
the body limb shifts the center of gravity.  A gait is parameterized by the
circle radii, per-limb phase offsets and the cycle length tau in ticks.
Targets are produced in role space; physical limb assignment (after a
topple remap) happens upstream of compilation.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Mapping

from tetracrawl.limb_kinematics import (
    ConfigPair,
    JointLengths,
    PmaPressures,
    ik_planar,
    joint_from_config,
    pressure_from_joint,
)
from tetracrawl.tetra_frames import LimbId, TetraGeometry

RHO_MAX_DEFAULT = 0.12  # fundamental trajectory radius bound [m]
TAU_DEFAULT = 100       # ticks per gait cycle


class GaitMode(Enum):
    IDLE = "idle"
    FORWARD = "forward"
    BACKWARD = "backward"
    TURN_WHILE_MOVING = "turn_while_moving"
    IN_PLACE_LEFT = "in_place_left"
    IN_PLACE_RIGHT = "in_place_right"


CRAWLING_MODES = (GaitMode.FORWARD, GaitMode.BACKWARD, GaitMode.TURN_WHILE_MOVING)
IN_PLACE_MODES = (GaitMode.IN_PLACE_LEFT, GaitMode.IN_PLACE_RIGHT)


@dataclass(frozen=True)
class GaitParams:
    """Radii [m], phase offsets [rad] and cycle length [ticks] of one gait."""

    rho3: float = 0.0
    rho4: float = 0.0
    rho_inplace: float = 0.0
    beta3: float = 0.0
    beta4: float = math.pi
    tau: int = TAU_DEFAULT
    direction_sign: int = 1   # +1 forward crawl family, -1 backward
    rho_max: float = RHO_MAX_DEFAULT

    def __post_init__(self):
        for name in ("rho3", "rho4", "rho_inplace"):
            v = getattr(self, name)
            if not 0.0 <= v <= self.rho_max:
                raise ValueError(f"{name} = {v} outside [0, {self.rho_max}]")
        if self.direction_sign not in (1, -1):
            raise ValueError("direction_sign must be +1 or -1")
        if self.tau < 1:
            raise ValueError("tau must be at least one tick")

    @classmethod
    def forward(cls, rho3: float, rho4: float | None = None, tau: int = TAU_DEFAULT,
                rho_max: float = RHO_MAX_DEFAULT) -> "GaitParams":
        rho4 = rho3 if rho4 is None else rho4
        return cls(rho3=rho3, rho4=rho4, beta3=0.0, beta4=math.pi, tau=tau,
                   direction_sign=1, rho_max=rho_max)

    @classmethod
    def backward(cls, rho3: float, rho4: float | None = None, tau: int = TAU_DEFAULT,
                 rho_max: float = RHO_MAX_DEFAULT) -> "GaitParams":
        rho4 = rho3 if rho4 is None else rho4
        return cls(rho3=rho3, rho4=rho4, beta3=math.pi, beta4=0.0, tau=tau,
                   direction_sign=-1, rho_max=rho_max)

    @classmethod
    def in_place(cls, rho: float, tau: int = TAU_DEFAULT,
                 rho_max: float = RHO_MAX_DEFAULT) -> "GaitParams":
        return cls(rho_inplace=rho, tau=tau, rho_max=rho_max)

    @classmethod
    def idle(cls, tau: int = TAU_DEFAULT) -> "GaitParams":
        return cls(tau=tau)


@dataclass(frozen=True)
class GaitClock:
    """Tick counter; the gait phase wraps every tau ticks."""

    tick: int = 0
    tau: int = TAU_DEFAULT

    @property
    def phase(self) -> float:
        return 2.0 * math.pi * (self.tick % self.tau) / self.tau

    def advanced(self, n: int = 1) -> "GaitClock":
        return replace(self, tick=self.tick + n)


@dataclass(frozen=True)
class LimbCommand:
    """Everything one limb needs for a tick."""

    config: ConfigPair
    joints: JointLengths
    pressures: PmaPressures


PlanarTargets = Mapping[LimbId, tuple[float, float]]


def _circle(rho: float, beta: float, phase: float, sign: int) -> tuple[float, float]:
    return (-sign * rho * math.cos(phase + beta), rho * math.sin(phase + beta))


def gait_targets(mode: GaitMode, params: GaitParams, clock: GaitClock) -> dict[LimbId, tuple[float, float]]:
    """Planar tip targets per role limb for the current phase."""
    p = clock.phase
    hold = (0.0, 0.0)
    if mode in CRAWLING_MODES:
        return {
            LimbId.LIMB1: hold,
            LimbId.LIMB2: hold,
            LimbId.LIMB3: _circle(params.rho3, params.beta3, p, params.direction_sign),
            LimbId.LIMB4: _circle(params.rho4, params.beta4, p, params.direction_sign),
        }
    if mode in IN_PLACE_MODES:
        rho = params.rho_inplace
        x = rho * math.cos(p)
        if mode is GaitMode.IN_PLACE_RIGHT:
            x = -x
        y = rho * math.sin(p + math.pi)
        return {
            LimbId.LIMB1: hold,
            LimbId.LIMB2: (x, y),
            LimbId.LIMB3: (x, y),
            LimbId.LIMB4: (x, y),
        }
    return {limb: hold for limb in LimbId}


def bend_target(body_bend: ConfigPair, geom: TetraGeometry) -> tuple[float, float]:
    """Planar tip point equivalent to a body-limb bend posture."""
    if body_bend.phi == 0.0:
        return (0.0, 0.0)
    radius = geom.module.length * (1.0 - math.cos(body_bend.phi)) / body_bend.phi
    return (radius * math.cos(body_bend.theta), radius * math.sin(body_bend.theta))


def planar_targets(mode: GaitMode, params: GaitParams, clock: GaitClock,
                   geom: TetraGeometry,
                   body_bend: ConfigPair | None = None) -> dict[LimbId, tuple[float, float]]:
    """Role-space targets with the body-limb CoG bend folded in."""
    targets = gait_targets(mode, params, clock)
    if body_bend is not None:
        targets[LimbId.LIMB1] = bend_target(body_bend, geom)
    return targets


def compile_targets(targets: PlanarTargets, geom: TetraGeometry) -> dict[LimbId, LimbCommand]:
    """Solve IK for every limb target and map to muscle pressures."""
    out = {}
    for limb in LimbId:
        x, y = targets[limb]
        cfg = ik_planar(x, y, geom.module)
        joints = joint_from_config(cfg, geom.module)
        out[limb] = LimbCommand(cfg, joints, pressure_from_joint(joints, geom.module))
    return out


def compile_tick(mode: GaitMode, params: GaitParams, clock: GaitClock,
                 geom: TetraGeometry,
                 body_bend: ConfigPair | None = None) -> dict[LimbId, LimbCommand]:
    """Per-limb commands for one tick of an unremapped gait."""
    bound = geom.module.length * 2.0 / math.pi
    if params.rho_max > bound:
        raise ValueError(f"rho_max {params.rho_max} exceeds limb reach {bound:.4f}")
    return compile_targets(planar_targets(mode, params, clock, geom, body_bend), geom)


CSV_HEADER = ("tick", "limb", "pma_index", "length_m", "pressure_bar")


def export_gait_csv(out: IO[str], mode: GaitMode, params: GaitParams,
                    geom: TetraGeometry, cycles: int = 1,
                    body_bend: ConfigPair | None = None) -> int:
    """Write a pressure schedule: one row per actuator per tick.

    Returns the number of data rows written (12 per tick).
    """
    writer = csv.writer(out)
    writer.writerow(CSV_HEADER)
    rows = 0
    for tick in range(cycles * params.tau):
        clock = GaitClock(tick=tick, tau=params.tau)
        commands = compile_tick(mode, params, clock, geom, body_bend)
        for limb in LimbId:
            cmd = commands[limb]
            for idx, (l, pr) in enumerate(zip(cmd.joints.as_tuple(),
                                              cmd.pressures.as_tuple()), start=1):
                # round before formatting so float dust cannot print as -0
                writer.writerow((tick, int(limb), idx,
                                 f"{round(l, 9) + 0.0:.9f}",
                                 f"{round(pr, 9) + 0.0:.9f}"))
                rows += 1
    return rows
