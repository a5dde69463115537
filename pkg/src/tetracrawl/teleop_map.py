"""Joystick-to-gait mapping.

A 2-axis stick scaled to [-0.12, 0.12] m picks the gait family and the two
rear-limb trajectory radii.  The lateral axis steers by shrinking one
radius; a square deadzone selects pure forward/backward, in-place turning,
or idle.  The default mapping reproduces the hardware formula built from
saturating tanh gates, including its jump at the deadzone edge; a smoothed
variant with finite gate slope is available for simulation work.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from tetracrawl.gait_engine import GaitMode, GaitParams, RHO_MAX_DEFAULT, TAU_DEFAULT

AXIS_LIMIT = 0.12  # [m], both stick axes after scaling

_HARD_GATE_SLOPE = 1e6  # saturates tanh to an exact 0/1 step


class TeleopFidelity(Enum):
    HARD_GATE = "hard_gate"
    SMOOTHED = "smoothed"


@dataclass(frozen=True)
class TeleopParams:
    """Stick scaling and radii-map constants."""

    deadzone: float = 0.01          # half-width of the neutral band [m]
    rho_max: float = RHO_MAX_DEFAULT
    volt_lo: float = 1.0            # [V]
    volt_hi: float = 5.0            # [V]
    gate_sharpness: float = 500.0   # smoothed-mode tanh slope [1/m]
    fidelity: TeleopFidelity = TeleopFidelity.HARD_GATE

    def __post_init__(self):
        if not 0.0 < self.deadzone < self.rho_max <= AXIS_LIMIT:
            raise ValueError("need 0 < deadzone < rho_max <= 0.12")
        if self.volt_hi <= self.volt_lo:
            raise ValueError("volt_hi must exceed volt_lo")
        if self.gate_sharpness <= 0.0:
            raise ValueError("gate_sharpness must be positive")


@dataclass(frozen=True)
class JoystickState:
    """Scaled stick deflection [m] plus the stick button."""

    sigma_x: float
    sigma_y: float
    pressed: bool = False

    def __post_init__(self):
        lim = AXIS_LIMIT + 1e-12
        if abs(self.sigma_x) > lim or abs(self.sigma_y) > lim:
            raise ValueError(f"axis deflection outside +/-{AXIS_LIMIT}")


def volts_to_axis(volts: float, params: TeleopParams = TeleopParams()) -> float:
    """Hardware path: [volt_lo, volt_hi] maps affinely to [-rho_max, rho_max]."""
    v = min(max(volts, params.volt_lo), params.volt_hi)
    mid = 0.5 * (params.volt_lo + params.volt_hi)
    return (v - mid) / (params.volt_hi - mid) * params.rho_max


def unit_to_axis(u: float, params: TeleopParams = TeleopParams()) -> float:
    """UI path: pre-normalized [-1, 1] deflection to [-rho_max, rho_max]."""
    return min(max(u, -1.0), 1.0) * params.rho_max


def joystick_from_volts(vx: float, vy: float, params: TeleopParams = TeleopParams(),
                        pressed: bool = False) -> JoystickState:
    return JoystickState(volts_to_axis(vx, params), volts_to_axis(vy, params), pressed)


def joystick_from_unit(ux: float, uy: float, params: TeleopParams = TeleopParams(),
                       pressed: bool = False) -> JoystickState:
    return JoystickState(unit_to_axis(ux, params), unit_to_axis(uy, params), pressed)


def speed(js: JoystickState) -> float:
    """Radial stick deflection, the base trajectory radius before steering."""
    return math.hypot(js.sigma_x, js.sigma_y)


def _gate(a: float, b: float, slope: float) -> float:
    return 0.5 * (math.tanh((a + b) * slope) + 1.0)


def _clamp_rho(rho: float, params: TeleopParams) -> float:
    return min(max(rho, 0.0), params.rho_max)


def radii(js: JoystickState, params: TeleopParams = TeleopParams()) -> tuple[float, float]:
    """Rear-limb trajectory radii (rho3, rho4) for a stick deflection.

    hard_gate uses saturating gates: pushing right of the deadzone drops
    rho4 to v - sigma_x while rho3 holds at v - deadzone (and mirrored), with
    a step at |sigma_x| = deadzone.  smoothed blends the same inner-limb
    slowdown with a finite-slope gate and equals v exactly on the centerline.
    """
    sx, v, dz = js.sigma_x, speed(js), params.deadzone
    if params.fidelity is TeleopFidelity.HARD_GATE:
        k = _HARD_GATE_SLOPE
        r3 = _gate(sx, v, k) * (sx + v) * _gate(-sx, dz, k) + (v - dz) * _gate(sx, dz, k)
        r4 = _gate(-sx, v, k) * (-sx + v) * _gate(sx, dz, k) + (v - dz) * _gate(-sx, dz, k)
    else:
        k = params.gate_sharpness
        r3 = v + sx * _gate(-sx, 0.0, k)
        r4 = v - sx * _gate(sx, 0.0, k)
    return (_clamp_rho(r3, params), _clamp_rho(r4, params))


def classify(js: JoystickState, params: TeleopParams = TeleopParams(),
             tau: int = TAU_DEFAULT) -> tuple[GaitMode, GaitParams]:
    """Deadzone-based gait selection.

    Inside the lateral band sigma_x snaps to zero so both radii are exactly
    equal (straight crawl); inside the longitudinal band the stick commands
    an in-place turn with rho = v; inside both, idle.
    """
    sx, sy, dz = js.sigma_x, js.sigma_y, params.deadzone
    if abs(sx) <= dz and abs(sy) <= dz:
        return (GaitMode.IDLE, GaitParams.idle(tau=tau))
    if abs(sx) <= dz:
        rho, _ = radii(JoystickState(0.0, sy, js.pressed), params)
        make = GaitParams.forward if sy > 0.0 else GaitParams.backward
        mode = GaitMode.FORWARD if sy > 0.0 else GaitMode.BACKWARD
        return (mode, make(rho, rho, tau=tau, rho_max=params.rho_max))
    if abs(sy) <= dz:
        rho = _clamp_rho(speed(js), params)
        mode = GaitMode.IN_PLACE_RIGHT if sx > 0.0 else GaitMode.IN_PLACE_LEFT
        return (mode, GaitParams.in_place(rho, tau=tau, rho_max=params.rho_max))
    r3, r4 = radii(js, params)
    make = GaitParams.forward if sy > 0.0 else GaitParams.backward
    return (GaitMode.TURN_WHILE_MOVING, make(r3, r4, tau=tau, rho_max=params.rho_max))
