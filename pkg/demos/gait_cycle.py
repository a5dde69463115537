#!/usr/bin/env python3
# Compile one forward crawl cycle and look at what the rear limbs do.
import io

from tetracrawl import (
    GaitClock, GaitMode, GaitParams, LimbId, TetraGeometry,
    compile_tick, export_gait_csv, gait_targets,
)

geo = TetraGeometry()
params = GaitParams.forward(0.10)  # 10 cm trajectory radius

print("planar targets for the two stepping limbs, quarter-cycle samples")
print(f"{'tick':>5} {'limb3 x':>9} {'limb3 y':>9} {'limb4 x':>9} {'limb4 y':>9}")
for tick in (0, 25, 50, 75):
    t = gait_targets(GaitMode.FORWARD, params, GaitClock(tick, params.tau))
    x3, y3 = t[LimbId.LIMB3]
    x4, y4 = t[LimbId.LIMB4]
    print(f"{tick:5d} {x3:9.4f} {y3:9.4f} {x4:9.4f} {y4:9.4f}")
print("limb4 at tick t equals limb3 at t+tau/2: the half-cycle mirror")

# full compile: targets -> bend configs -> joint lengths -> PMA pressures
cmd = compile_tick(GaitMode.FORWARD, params, GaitClock(0, params.tau), geo)[LimbId.LIMB3]
print(f"\nlimb3 at tick 0: theta={cmd.config.theta:+.4f} phi={cmd.config.phi:.4f}")
print(f"  joint lengths [m]: {['%+.4f' % l for l in cmd.joints.as_tuple()]}")
print(f"  pressures [bar]:   {['%.3f' % p for p in cmd.pressures.as_tuple()]}")

buf = io.StringIO()
rows = export_gait_csv(buf, GaitMode.FORWARD, params, geo)
print(f"\nCSV export: {rows} data rows (12 per tick x {params.tau} ticks)")
print("first three rows:")
for line in buf.getvalue().splitlines()[:4]:
    print(" ", line)
