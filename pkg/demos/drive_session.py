#!/usr/bin/env python3
# A scripted teleoperation session against the quasi-static simulator,
# recorded to a telemetry log and read back.
import io

from tetracrawl import (
    JoystickState, LimbId, OrientationState, SimParams, Simulator,
    TelemetryWriter, read_telemetry,
)

sim = Simulator(SimParams(bend_intensity=0.3))
tau = sim.params.tau

buf = io.StringIO()
log = TelemetryWriter(buf, config_hash="demo", tick_hz=sim.params.tick_hz)


def drive(js, ticks, label):
    for _ in range(ticks):
        sim.step(js)
        log.append(sim.snapshot(include_curves=False))
    s = sim.state
    print(f"{label:<26} tick={s.tick:4d} pose=({s.pose.x:+.3f}, {s.pose.y:+.3f}, "
          f"{s.pose.psi:+.3f})  mode={s.mode.value}  margin={s.margin:.4f}")


drive(JoystickState(0.0, 0.065), 2 * tau, "forward, two cycles")
drive(JoystickState(0.05, 0.05), tau, "arc right")
drive(JoystickState(-0.08, 0.0), tau, "spin left in place")

# knock it over mid-run; motion freezes until the operator remaps
sim.inject_topple(OrientationState(LimbId.LIMB4, 2))
drive(JoystickState(0.0, 0.065), 10, "toppled (stick ignored)")
sim.remap()
drive(JoystickState(0.0, 0.065), tau, "remapped, forward again")

# scripted self-correction back to the canonical orientation
sim.correct_orientation()
while sim.state.correcting:
    sim.step(JoystickState(0.0, 0.0))
    log.append(sim.snapshot(include_curves=False))
print(f"{'corrected':<26} tick={sim.state.tick:4d} "
      f"orientation top limb = {int(sim.state.orientation.top_limb)}")

buf.seek(0)
header, frames = read_telemetry(buf)
count = sum(1 for _ in frames)
print(f"\ntelemetry log: {count} frames at {header['tick_hz']} Hz")
