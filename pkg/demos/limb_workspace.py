#!/usr/bin/env python3
# One limb, end to end: actuator lengths -> bend config -> tip position and back.
import math

import numpy as np

from tetracrawl import (
    ConfigPair, ModuleParams, WorkspaceError,
    fk_point, ik_planar, joint_from_config, pressure_from_joint,
)

module = ModuleParams()
print(f"limb length {module.length} m, anchor radius {module.anchor_radius} m")

# sweep the bend angle at a fixed heading and watch the tip travel
print("\nphi sweep at theta = 30 deg")
print(f"{'phi':>8} {'tip x':>10} {'tip y':>10} {'tip z':>10} {'p1 bar':>8}")
for phi in np.linspace(0.0, math.pi / 2, 7):
    cfg = ConfigPair(math.radians(30), float(phi))
    tip = fk_point(cfg, 1.0, module)
    p = pressure_from_joint(joint_from_config(cfg, module), module)
    print(f"{phi:8.3f} {tip.x:10.4f} {tip.y:10.4f} {tip.z:10.4f} {p.p1:8.3f}")

# the planar workspace is a disc of radius 2L/pi; show the edge behaving
reach = module.length * 2 / math.pi
print(f"\nplanar reach = 2L/pi = {reach:.6f} m")
inside = ik_planar(reach - 1e-9, 0.0, module)
print(f"just inside the rim solves to phi = {inside.phi:.6f}")
try:
    ik_planar(reach + 1e-6, 0.0, module)
except WorkspaceError as e:
    print(f"just outside is rejected: {e}")

# roundtrip sanity on a few random configs
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(200):
    cfg = ConfigPair(rng.uniform(-math.pi, math.pi), rng.uniform(0, math.pi / 2))
    tip = fk_point(cfg, 1.0, module)
    back = ik_planar(tip.x, tip.y, module)
    worst = max(worst, abs(back.phi - cfg.phi))
print(f"\nworst phi error over 200 random FK->IK roundtrips: {worst:.2e}")
