"""Body composition for the four-limbed tetrahedral robot.

The robot is a central hub with four identical limbs: Limb1 points up the
body +Z axis and the other three are splayed at the tetrahedral angle,
distributed 120 degrees apart about +Z.  Forward is body +X.  This module
places limb kinematics into the body frame, composes a global floating-base
pose, and provides center-of-gravity and support-polygon queries used by the
gait layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Mapping, Sequence

import numpy as np

from tetracrawl.limb_kinematics import (
    ConfigPair,
    LimbHtm,
    ModuleParams,
    fk_htm,
    fk_point,
)

# tilt of the lower limbs past horizontal; 1.91 rad total from body +Z
DELTA_DEFAULT = 1.91 - math.pi / 2

BODY_BEND_PHI_MAX = math.pi / 3  # bend used for CoG shifting at intensity 1.0

COG_SAMPLES = 32  # arc midpoint samples per limb for the mass integral


class LimbId(IntEnum):
    LIMB1 = 1  # body limb, canonically on top
    LIMB2 = 2
    LIMB3 = 3
    LIMB4 = 4


LOWER_LIMBS = (LimbId.LIMB2, LimbId.LIMB3, LimbId.LIMB4)

RobotConfig = Mapping[LimbId, ConfigPair]


class DegenerateSupportError(ValueError):
    """Contact points do not span a usable support polygon."""


def straight_config() -> dict[LimbId, ConfigPair]:
    return {limb: ConfigPair(0.0, 0.0) for limb in LimbId}


def wrap_angle(a: float) -> float:
    """Map any angle to [-pi, pi]."""
    return math.remainder(a, 2.0 * math.pi)


@dataclass(frozen=True)
class TetraGeometry:
    """Masses and mounting geometry of the assembled robot."""

    delta: float = DELTA_DEFAULT     # lower-limb tilt past horizontal [rad]
    module: ModuleParams = field(default_factory=ModuleParams)
    limb_mass: float = 0.15          # [kg]
    hub_mass: float = 0.05           # [kg], lumped at the body origin

    def __post_init__(self):
        if self.limb_mass <= 0.0 or self.hub_mass < 0.0:
            raise ValueError("masses must be positive (hub may be zero)")
        if not 0.0 < self.delta < math.pi / 2:
            raise ValueError(f"delta {self.delta} outside (0, pi/2)")

    @property
    def total_mass(self) -> float:
        return 4.0 * self.limb_mass + self.hub_mass


@dataclass(frozen=True)
class GlobalPose:
    """Floating-base pose: yaw-pitch-roll Euler angles plus translation.

    gamma yaws about world Z, beta pitches about Y, alpha rolls about X,
    composed intrinsically: R = Rz(gamma) Ry(beta) Rx(alpha).
    """

    alpha: float = 0.0  # roll  [rad]
    beta: float = 0.0   # pitch [rad]
    gamma: float = 0.0  # yaw   [rad]
    x: float = 0.0      # [m]
    y: float = 0.0      # [m]
    z: float = 0.0      # [m]

    def rotation(self) -> np.ndarray:
        return _rot_z(self.gamma) @ _rot_y(self.beta) @ _rot_x(self.alpha)

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation()
        m[:3, 3] = (self.x, self.y, self.z)
        return m

    def transform_point(self, p: np.ndarray) -> np.ndarray:
        return self.rotation() @ np.asarray(p, dtype=float) + np.array([self.x, self.y, self.z])


def _rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def limb_base_transform(limb: LimbId, geom: TetraGeometry) -> LimbHtm:
    """Mounting transform of a limb's base frame in the body frame.

    Limb1 is the body frame itself.  Lower limbs tilt about Y by
    pi/2 + delta and are then distributed about body Z; tilting first and
    distributing second is what spreads the three axes tetrahedrally (the
    other order would leave them parallel).
    """
    if limb == LimbId.LIMB1:
        rot = np.eye(3)
    else:
        k = {LimbId.LIMB2: 0, LimbId.LIMB3: 1, LimbId.LIMB4: 2}[limb]
        rot = _rot_z(2.0 * math.pi / 3.0 * k) @ _rot_y(math.pi / 2.0 + geom.delta)
    return LimbHtm(rot, np.zeros(3))


def limb_axis(limb: LimbId, geom: TetraGeometry) -> np.ndarray:
    """Unit vector of the straight limb direction in the body frame."""
    return limb_base_transform(limb, geom).rotation @ np.array([0.0, 0.0, 1.0])


def limb_body_htm(limb: LimbId, config: ConfigPair, xi: float,
                  geom: TetraGeometry) -> LimbHtm:
    """Frame at arc position xi of a limb, expressed in the body frame."""
    base = limb_base_transform(limb, geom)
    local = fk_htm(config, xi, geom.module)
    rot = base.rotation @ local.rotation
    trans = base.rotation @ local.translation + base.translation
    return LimbHtm(rot, trans)


def limb_global_point(pose: GlobalPose, limb: LimbId, config: ConfigPair,
                      xi: float, geom: TetraGeometry) -> np.ndarray:
    """World-frame backbone point of one limb under a floating-base pose."""
    body = limb_body_htm(limb, config, xi, geom)
    return pose.transform_point(body.translation)


def limb_tip_body(limb: LimbId, config: ConfigPair, geom: TetraGeometry) -> np.ndarray:
    base = limb_base_transform(limb, geom)
    tip = fk_point(config, 1.0, geom.module)
    return base.rotation @ tip.as_array()


def sample_limb_curve(limb: LimbId, config: ConfigPair, n_points: int,
                      geom: TetraGeometry) -> np.ndarray:
    """Backbone polyline of a limb in the body frame, shape (n_points, 3)."""
    if n_points < 2:
        raise ValueError("need at least two points")
    base = limb_base_transform(limb, geom).rotation
    pts = np.empty((n_points, 3))
    for i in range(n_points):
        xi = i / (n_points - 1)
        pts[i] = base @ fk_point(config, xi, geom.module).as_array()
    return pts


def cog_estimate(config: RobotConfig, geom: TetraGeometry) -> np.ndarray:
    """Mass-weighted center of gravity in the body frame.

    Each limb contributes the centroid of midpoint arc samples (uniform in
    xi, which is uniform in arc length for a constant-curvature limb); the
    hub mass sits at the origin.
    """
    total = np.zeros(3)  # hub mass sits at the origin, zero moment
    for limb in LimbId:
        base = limb_base_transform(limb, geom).rotation
        cfg = config[limb]
        centroid = np.zeros(3)
        for k in range(COG_SAMPLES):
            xi = (k + 0.5) / COG_SAMPLES
            centroid += fk_point(cfg, xi, geom.module).as_array()
        centroid /= COG_SAMPLES
        total = total + geom.limb_mass * (base @ centroid)
    return total / geom.total_mass


def body_limb_bend(heading: float, intensity: float,
                   phi_max: float = BODY_BEND_PHI_MAX) -> ConfigPair:
    """Body-limb posture that leans the CoG toward a heading.

    intensity in [0, 1] scales the bend angle up to phi_max.
    """
    if not 0.0 <= intensity <= 1.0:
        raise ValueError(f"intensity {intensity} outside [0, 1]")
    return ConfigPair(wrap_angle(heading), intensity * phi_max)


def detect_contacts(config: RobotConfig, pose: GlobalPose, geom: TetraGeometry,
                    tol: float = 0.005) -> list[LimbId]:
    """Limbs whose world tip height is within tol of the lowest tip."""
    heights = {limb: pose.transform_point(limb_tip_body(limb, config[limb], geom))[2]
               for limb in LimbId}
    floor = min(heights.values())
    return [limb for limb in LimbId if heights[limb] - floor <= tol]


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Counterclockwise convex hull (monotone chain), collinear points dropped."""
    pts = sorted(map(tuple, points))
    if len(pts) < 3:
        return np.asarray(pts)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                ox, oy = out[-1][0] - out[-2][0], out[-1][1] - out[-2][1]
                px, py = p[0] - out[-2][0], p[1] - out[-2][1]
                if ox * py - oy * px <= 0.0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return np.asarray(lower[:-1] + upper[:-1])


def stability_margin(config: RobotConfig, pose: GlobalPose, geom: TetraGeometry,
                     contacts: Sequence[LimbId] | None = None) -> float:
    """Signed distance of the CoG ground projection to the support boundary.

    Positive inside the support polygon (statically stable), negative
    outside; the margin is the minimum inward distance over polygon edges.
    Contacts default to the three lower limbs.
    """
    if contacts is None:
        contacts = LOWER_LIMBS
    if len(set(contacts)) < 3:
        raise DegenerateSupportError("need at least three distinct contact limbs")
    tips = np.array([
        pose.transform_point(limb_tip_body(limb, config[limb], geom))[:2]
        for limb in contacts
    ])
    hull = _convex_hull(tips)
    if len(hull) < 3:
        raise DegenerateSupportError("contact tips are collinear")
    area = 0.5 * sum(
        hull[i][0] * hull[(i + 1) % len(hull)][1] - hull[(i + 1) % len(hull)][0] * hull[i][1]
        for i in range(len(hull)))
    if area < 1e-10:  # sliver polygons are numerically collinear
        raise DegenerateSupportError("contact tips are collinear")
    cog_w = pose.transform_point(cog_estimate(config, geom))[:2]
    margin = math.inf
    for i in range(len(hull)):
        v1 = hull[i]
        v2 = hull[(i + 1) % len(hull)]
        edge = v2 - v1
        # inward distance for a CCW polygon
        d = (edge[0] * (cog_w[1] - v1[1]) - edge[1] * (cog_w[0] - v1[0])) / np.linalg.norm(edge)
        margin = min(margin, float(d))
    return margin
