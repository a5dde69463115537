/**
 * UI acceptance: scripted driver sessions run through the real store,
 * client, joystick gate, and keyboard fallback against a tick-by-tick
 * service double.  Rendering-side geometry is checked against a recording
 * canvas context, so the deadzone ring assertion is about actual on-screen
 * radii, not internal fractions.
 */

import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { KeyboardStick } from "../src/keyboard.js";
import { drawStick } from "../src/render.js";
import { Store } from "../src/store.js";
import { buildViewModel } from "../src/viewmodel.js";
import { FakeService } from "./fake_service.js";

function session() {
  const svc = new FakeService();
  const store = new Store();
  const client = new SessionClient("ws://test/ws", store, {
    socketFactory: svc.factory(),
    reconnectMs: 0,
    now: () => 0,
  });
  client.connect();
  svc.openLast();
  const vm = () => buildViewModel(store.getState(), 0);
  return { svc, store, client, vm };
}

describe("criterion 15: scripted driver session with the keyboard fallback", () => {
  it("shows Idle at center and Forward within two telemetry frames of full-up", () => {
    const { svc, client, vm } = session();
    const keys = new KeyboardStick();

    svc.tickOnce();
    expect(vm().roleLabel).toBe("driver");
    expect(vm().modeLabel).toBe("Idle");

    // widget jitter inside the deadzone: snapped to zero, no traffic beyond
    // the initial neutral report, no mode change
    client.setWidget({ x: 0.04, y: -0.03 });
    svc.tickOnce();
    client.setWidget({ x: -0.02, y: 0.05 });
    svc.tickOnce();
    expect(vm().modeLabel).toBe("Idle");
    expect(svc.joystickMessages()).toEqual([{ atTick: 1, sx: 0, sy: 0 }]);

    // keyboard full-up commands rho_max on the forward axis
    const pos = keys.keyDown("ArrowUp", false);
    expect(pos).toEqual({ x: 0, y: 1 });
    client.setWidget(pos!);
    const pressedAt = svc.tick;

    svc.tickOnce(); // flush rides this frame boundary
    svc.tickOnce(); // and the mode change is visible on the next
    expect(vm().modeLabel).toBe("Forward");
    expect(svc.tick - pressedAt).toBe(2);
    expect(svc.joystickMessages()).toEqual([
      { atTick: 1, sx: 0, sy: 0 },
      { atTick: pressedAt + 1, sx: 0, sy: 0.12 },
    ]);

    // release springs back; the indicator returns to Idle
    client.setWidget(keys.keyUp("ArrowUp", false)!);
    svc.tickOnce();
    svc.tickOnce();
    expect(vm().modeLabel).toBe("Idle");

    // never more than one joystick message per telemetry tick
    for (const count of svc.joystickCountByTick.values()) {
      expect(count).toBeLessThanOrEqual(1);
    }
  });

  it("draws the deadzone ring at deadzone/rho_max of the widget radius", () => {
    const { vm } = session();
    expect(Math.abs(vm().ringFraction - 1 / 12)).toBeLessThan(1e-12);

    // recording context: capture every arc the widget painter draws
    const arcs: Array<{ x: number; y: number; r: number }> = [];
    const noop = () => undefined;
    const ctx = new Proxy(
      { arc: (x: number, y: number, r: number) => arcs.push({ x, y, r }) },
      {
        get(target, prop) {
          if (prop === "arc") return target.arc;
          return noop; // fills, strokes, paths: irrelevant here
        },
        set() {
          return true; // style assignments
        },
      },
    );
    const canvas = {
      width: 220,
      height: 220,
      getContext: () => ctx,
    } as unknown as HTMLCanvasElement;

    drawStick(canvas, { knob: { x: 0, y: 0 }, ringFraction: vm().ringFraction, enabled: true });

    const widgetRadius = 220 / 2 - 8;
    expect(arcs.length).toBeGreaterThanOrEqual(3);
    expect(arcs[0]?.r).toBe(widgetRadius); // outer rim
    expect(Math.abs(arcs[1]!.r / widgetRadius - 1 / 12)).toBeLessThan(1e-12); // deadzone ring
  });
});

describe("criterion 16: topple workflow clickthrough", () => {
  it("remap re-enables motion and correct restores the canonical indicator", () => {
    const { svc, store, client, vm } = session();
    const keys = new KeyboardStick();

    // drive forward first
    svc.tickOnce();
    client.setWidget(keys.keyDown("ArrowUp", false)!);
    svc.tickOnce();
    svc.tickOnce();
    expect(vm().modeLabel).toBe("Forward");
    expect(vm().canonical).toBe(true);
    expect(vm().topple.remapEnabled).toBe(false); // nothing to fix yet
    expect(vm().topple.correctEnabled).toBe(false);

    // knock it over
    client.injectTopple({ top_limb: 4, roll_index: 2 });
    svc.tickOnce();
    expect(vm().modeLabel).toBe("Idle");
    expect(vm().awaitingRecovery).toBe(true);
    expect(vm().orientationLabel).toBe("limb 4 up, roll 2 (toppled)");
    expect(vm().topple.remapEnabled).toBe(true);
    expect(vm().topple.correctEnabled).toBe(true);

    // motion is frozen while it waits, stick still held full-up
    const xFrozen = store.getState().frame!.pose[0];
    svc.tickOnce();
    svc.tickOnce();
    expect(store.getState().frame!.pose[0]).toBe(xFrozen);

    // remap: forward input moves the robot again
    client.remap();
    svc.tickOnce();
    svc.tickOnce();
    expect(vm().modeLabel).toBe("Forward");
    expect(store.getState().frame!.pose[0]).toBeGreaterThan(xFrozen);
    expect(vm().orientationLabel).toBe("limb 4 up, roll 2");
    expect(vm().canonical).toBe(false);

    // self-correct: maneuver runs, then the indicator reads canonical
    client.correctOrientation();
    svc.tickOnce();
    expect(vm().correcting).toBe(true);
    expect(vm().orientationLabel).toBe("limb 4 up, roll 2 (correcting)");
    svc.tickOnce();
    svc.tickOnce();
    expect(vm().correcting).toBe(false);
    expect(vm().canonical).toBe(true);
    expect(vm().orientationLabel).toBe("canonical");
    expect(vm().topple.remapEnabled).toBe(false);
    expect(vm().topple.correctEnabled).toBe(false);
  });
});
