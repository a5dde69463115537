#!/usr/bin/env python3
# What happens when the robot rolls onto another face, and how it gets back.
import math

from tetracrawl import CANONICAL, LimbId, correction_maneuver, remap_for
from tetracrawl.topple import all_orientations, topple_right

# the tetrahedron has 12 reachable orientations: 4 faces x 3 rolls
states = all_orientations()
print(f"{len(states)} orientation states; canonical = {CANONICAL}")

# roll right while crawling forward and see who lands on top
state = topple_right()
print(f"\nafter a right topple: top limb {int(state.top_limb)}, roll {state.roll_index}")

table = remap_for(state)
print("physical limb -> virtual role after remap:")
for phys in LimbId:
    role = table.role_permutation[phys]
    spin = table.local_spin[phys]
    print(f"  limb {int(phys)} acts as limb {int(role)}"
          f"  (target frames spin {math.degrees(spin):+.0f} deg)")

# every orientation is at most two scripted pivots from canonical
print("\ncorrection plans (pivot limb, direction):")
for s in states:
    plan = correction_maneuver(s)
    steps = ", ".join(f"({int(m.pivot_limb)}, {m.direction:+d})" for m in plan) or "already there"
    print(f"  top={int(s.top_limb)} roll={s.roll_index}: {steps}")

depth = {}
for s in states:
    depth[len(correction_maneuver(s))] = depth.get(len(correction_maneuver(s)), 0) + 1
print(f"\nplan length histogram: {dict(sorted(depth.items()))}")
