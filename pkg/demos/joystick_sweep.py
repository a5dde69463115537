#!/usr/bin/env python3
# How stick deflection turns into rear-limb trajectory radii and gait modes.
import numpy as np

from tetracrawl import JoystickState, TeleopParams, classify, radii

teleop = TeleopParams()
dz = teleop.deadzone

print(f"deadzone +/-{dz} m on both axes, radii clamped to [0, {teleop.rho_max}]")

# push straight ahead: both radii equal, rho = 2v - dz
print("\ncenterline push (sigma_x = 0)")
for sy in (0.02, 0.04, 0.065, 0.12):
    r3, r4 = radii(JoystickState(0.0, sy), teleop)
    mode, gp = classify(JoystickState(0.0, sy), teleop)
    print(f"  sy={sy:6.3f} -> rho3={r3:.4f} rho4={r4:.4f}  {mode.value}")

# now add steering: the inner limb slows down, the outer one holds
print("\nsteering sweep at sy = 0.05")
print(f"{'sx':>8} {'rho3':>8} {'rho4':>8}  mode")
for sx in np.linspace(-0.1, 0.1, 9):
    js = JoystickState(float(sx), 0.05)
    r3, r4 = radii(js, teleop)
    mode, _ = classify(js, teleop)
    print(f"{sx:8.3f} {r3:8.4f} {r4:8.4f}  {mode.value}")

# the hard gate is genuinely discontinuous at the deadzone edge
lo = radii(JoystickState(dz - 1e-5, 0.05), teleop)
hi = radii(JoystickState(dz + 1e-5, 0.05), teleop)
print(f"\nacross the sigma_x = +{dz} edge rho4 jumps {lo[1]:.4f} -> {hi[1]:.4f}")

print("\nband classification:")
for sx, sy in [(0.0, 0.0), (0.005, 0.08), (0.006, -0.08), (0.08, 0.0),
               (-0.08, 0.003), (0.05, 0.05)]:
    mode, gp = classify(JoystickState(sx, sy), teleop)
    print(f"  ({sx:+.3f}, {sy:+.3f}) -> {mode.value}")
