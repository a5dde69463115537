"""Constant-curvature kinematics for one soft pneumatic limb.

A limb is a single bending section of rest arc length L, driven by three
pneumatic muscles (PMAs) anchored on a circle of radius r around the
backbone.  Its shape is summarized by the bending-plane angle theta and the
bend angle phi; phi = 0 is the straight limb.  The backbone is inextensible,
so the three muscle length changes always sum to zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# below this bend angle the arc is treated as straight (series limit)
EPS_STRAIGHT = 1e-6

# muscle length changes must balance to this absolute tolerance [m]
SUM_ZERO_TOL = 1e-12


class WorkspaceError(ValueError):
    """Planar target lies outside the reachable disc of the limb tip."""


@dataclass(frozen=True)
class ModuleParams:
    """Geometry and actuation constants of one limb module."""

    length: float = 0.24           # rest arc length L [m]
    anchor_radius: float = 0.02    # PMA anchor circle radius r [m]
    pressure_gain: float = 80.0    # [bar per m of contraction]
    pressure_offset: float = 0.5   # [bar]
    pressure_min: float = 0.0      # [bar]
    pressure_max: float = 3.0      # [bar]

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError("length must be positive")
        if self.anchor_radius <= 0.0:
            raise ValueError("anchor_radius must be positive")
        if self.pressure_max <= self.pressure_min:
            raise ValueError("pressure_max must exceed pressure_min")


@dataclass(frozen=True)
class ConfigPair:
    """Bending-plane angle theta [rad] and bend angle phi [rad] of one limb."""

    theta: float
    phi: float

    def __post_init__(self):
        if not -math.pi <= self.theta <= math.pi:
            raise ValueError(f"theta {self.theta} outside [-pi, pi]")
        if not 0.0 <= self.phi <= math.pi:
            raise ValueError(f"phi {self.phi} outside [0, pi]")


@dataclass(frozen=True)
class JointLengths:
    """Length changes of the three PMAs [m]; positive lengthens the muscle."""

    l1: float
    l2: float
    l3: float

    def __post_init__(self):
        s = self.l1 + self.l2 + self.l3
        if abs(s) > SUM_ZERO_TOL:
            raise ValueError(f"length changes sum to {s}, backbone not inextensible")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l1, self.l2, self.l3)


@dataclass(frozen=True)
class PmaPressures:
    """Commanded muscle pressures [bar]; saturated marks any clamped channel."""

    p1: float
    p2: float
    p3: float
    saturated: bool = False

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.p3)


@dataclass(frozen=True)
class LimbPoint:
    """A backbone point at normalized arc position xi in [0, 1], limb frame [m]."""

    x: float
    y: float
    z: float
    xi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class LimbHtm:
    """Rigid transform of the frame at arc position xi, in the limb base frame."""

    rotation: np.ndarray     # 3x3
    translation: np.ndarray  # 3-vector [m]

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def transform_point(self, p: np.ndarray) -> np.ndarray:
        return self.rotation @ np.asarray(p, dtype=float) + self.translation


def joint_from_config(config: ConfigPair, params: ModuleParams) -> JointLengths:
    """Muscle length changes producing a given (theta, phi).

    l_i = -r * phi * cos(2*pi/3 * (i - 1) - theta); the three cosines sum to
    zero identically, so the backbone constraint holds by construction.
    """
    r, th, ph = params.anchor_radius, config.theta, config.phi
    ls = [-r * ph * math.cos(2.0 * math.pi / 3.0 * i - th) for i in (0, 1, 2)]
    # renormalize the residual float dust so the constructor invariant holds
    resid = sum(ls) / 3.0
    return JointLengths(ls[0] - resid, ls[1] - resid, ls[2] - resid)


def config_from_joint(joints: JointLengths, params: ModuleParams) -> ConfigPair:
    """Recover (theta, phi) from muscle length changes.

    Only l2 and l3 enter: l1 is fixed by the sum-zero constraint. The
    all-slack limb maps to the straight configuration (0, 0).
    """
    r = params.anchor_radius
    l2, l3 = joints.l2, joints.l3
    phi = (2.0 / r) * math.sqrt((l2 * l2 + l3 * l3 + l2 * l3) / 3.0)
    if phi == 0.0:
        return ConfigPair(0.0, 0.0)
    theta = math.atan2(l3 - l2, math.sqrt(3.0) * (l2 + l3))
    return ConfigPair(theta, phi)


def pressure_from_joint(joints: JointLengths, params: ModuleParams) -> PmaPressures:
    """Affine length-to-pressure map, clamped to the valve range."""
    lo, hi = params.pressure_min, params.pressure_max
    raw = [params.pressure_gain * l + params.pressure_offset for l in joints.as_tuple()]
    clamped = [min(max(p, lo), hi) for p in raw]
    saturated = any(c != p for c, p in zip(clamped, raw))
    return PmaPressures(clamped[0], clamped[1], clamped[2], saturated)


def fk_point(config: ConfigPair, xi: float, params: ModuleParams) -> LimbPoint:
    """Closed-form backbone point at normalized arc position xi.

    The bent backbone is a circular arc of radius L/phi in the plane at
    angle theta; near phi = 0 the analytic limit (0, 0, L*xi) is used.
    """
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi {xi} outside [0, 1]")
    L, th, ph = params.length, config.theta, config.phi
    if ph < EPS_STRAIGHT:
        return LimbPoint(0.0, 0.0, L * xi, xi)
    rad = L / ph
    w = 1.0 - math.cos(xi * ph)
    return LimbPoint(rad * math.cos(th) * w, rad * math.sin(th) * w,
                     rad * math.sin(xi * ph), xi)


def _rot_z4(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    m = np.eye(4)
    m[0, 0], m[0, 1], m[1, 0], m[1, 1] = c, -s, s, c
    return m


def _rot_y4(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    m = np.eye(4)
    m[0, 0], m[0, 2], m[2, 0], m[2, 2] = c, s, -s, c
    return m


def _trans_x4(d: float) -> np.ndarray:
    m = np.eye(4)
    m[0, 3] = d
    return m


def fk_htm(config: ConfigPair, xi: float, params: ModuleParams) -> LimbHtm:
    """Frame at arc position xi via the homogeneous-transform chain.

    T = Rz(theta) Tx(L/phi) Ry(xi*phi) Tx(-L/phi) Rz(-theta): rotate into
    the bending plane, orbit the arc center, rotate back.  This is kept as
    an explicit matrix product so it can be cross-checked against the
    closed-form fk_point.
    """
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi {xi} outside [0, 1]")
    L, th, ph = params.length, config.theta, config.phi
    if ph < EPS_STRAIGHT:
        t = _rot_z4(th) @ _rot_y4(xi * ph) @ _rot_z4(-th)
        t[:3, 3] = (0.0, 0.0, L * xi)
    else:
        rad = L / ph
        t = (_rot_z4(th) @ _trans_x4(rad) @ _rot_y4(xi * ph)
             @ _trans_x4(-rad) @ _rot_z4(-th))
    return LimbHtm(t[:3, :3].copy(), t[:3, 3].copy())


def _g(phi: float) -> float:
    """Normalized planar reach (1 - cos phi)/phi, stable near zero."""
    if phi == 0.0:
        return 0.0
    h = math.sin(0.5 * phi)
    return 2.0 * h * h / phi


# reach is strictly increasing on (0, pi/2]; the bracket top sits slightly
# past pi/2 so targets at the exact workspace boundary stay bracketed
_IK_BRACKET_HI = math.pi / 2 + 1e-3
_IK_G_TOL = 1e-10
_WORKSPACE_G_MAX = 2.0 / math.pi


def ik_planar(x: float, y: float, params: ModuleParams) -> ConfigPair:
    """Configuration whose tip projects to (x, y) in the limb base plane.

    theta follows directly from the target azimuth; phi is the root of
    (1 - cos phi)/phi = sqrt(x^2 + y^2)/L, found by bisection on the
    monotone branch (0, pi/2], where the root is unique for every target
    inside the reachable disc of radius L*2/pi.
    """
    L = params.length
    target = math.hypot(x, y) / L
    if target > _WORKSPACE_G_MAX:
        raise WorkspaceError(
            f"target radius {math.hypot(x, y):.6f} m exceeds reach {L * _WORKSPACE_G_MAX:.6f} m")
    if target == 0.0:
        return ConfigPair(0.0, 0.0)
    theta = math.atan2(y, x)
    lo, hi = 0.0, _IK_BRACKET_HI
    if not _g(lo) <= target <= _g(hi):
        raise AssertionError("bisection bracket lost; reach not monotone?")
    phi = 0.5 * (lo + hi)
    for _ in range(200):
        gm = _g(phi)
        if abs(gm - target) <= _IK_G_TOL:
            break
        if gm < target:
            lo = phi
        else:
            hi = phi
        phi = 0.5 * (lo + hi)
    else:
        raise AssertionError(f"bisection failed to converge for target {target}")
    return ConfigPair(theta, phi)
