/**
 * Pure projection from session state to what the screen shows.  Everything
 * here derives from the latest TelemetryFrame plus connection bookkeeping;
 * the functions do no geometry beyond comparisons, so the acceptance tests
 * can assert on indicators without a DOM.
 */

import type { GaitModeName } from "./protocol.js";
import type { UiSessionState } from "./store.js";
import { deadzoneRingFraction, snapWidget, type WidgetPos } from "./joystick.js";

/** A frame older than this is treated as a connection problem. */
export const STALE_MS = 1000;

export const MODE_LABELS: Record<GaitModeName, string> = {
  idle: "Idle",
  forward: "Forward",
  backward: "Backward",
  turn_while_moving: "Turning",
  in_place_left: "In-place left",
  in_place_right: "In-place right",
};

export interface ToppleControlsModel {
  /** The injector is the test entry point, so it stays live while driving. */
  toppleEnabled: boolean;
  remapEnabled: boolean;
  correctEnabled: boolean;
}

export interface ViewModel {
  banner: string | null;
  roleLabel: string;
  driving: boolean;
  stickEnabled: boolean;
  stickDisabledReason: string | null;
  modeLabel: string;
  marginText: string;
  marginAlert: boolean;
  orientationLabel: string;
  canonical: boolean;
  awaitingRecovery: boolean;
  correcting: boolean;
  topple: ToppleControlsModel;
  ringFraction: number;
  knob: WidgetPos;
  tickText: string;
  replayBadge: boolean;
}

export function buildViewModel(state: UiSessionState, now: number): ViewModel {
  const frame = state.frame;
  const hello = state.hello;
  const replay = hello?.replay ?? false;

  let banner: string | null = null;
  if (state.connection === "closed") {
    banner = "disconnected";
  } else if (state.connection === "connecting") {
    banner = "connecting…";
  } else if (state.replayEnded) {
    banner = "replay finished";
  } else if (frame === null || state.lastFrameAt === null) {
    banner = "waiting for telemetry";
  } else if (now - state.lastFrameAt > STALE_MS) {
    banner = "connection degraded: telemetry stale";
  }

  const driving = state.role === "driver" && state.connection === "open" && !replay;
  let stickDisabledReason: string | null = null;
  if (replay) stickDisabledReason = "replay session is read-only";
  else if (state.role === "viewer") stickDisabledReason = "viewer role: controls disabled";
  else if (state.connection !== "open") stickDisabledReason = "not connected";

  const canonical =
    frame !== null && frame.orientation[0] === 1 && frame.orientation[1] === 0 && !frame.awaiting_recovery;
  const offCanonical = frame !== null && !canonical;

  const scale = {
    deadzone: hello?.deadzone ?? 0.01,
    rhoMax: hello?.rho_max ?? 0.12,
  };

  let orientationLabel = "unknown";
  if (frame !== null) {
    const [top, roll] = frame.orientation;
    orientationLabel =
      top === 1 && roll === 0 ? "canonical" : `limb ${top} up, roll ${roll}`;
    if (frame.awaiting_recovery) orientationLabel += " (toppled)";
    else if (frame.correcting) orientationLabel += " (correcting)";
  }

  return {
    banner,
    roleLabel: state.role ?? "no role",
    driving,
    stickEnabled: driving,
    stickDisabledReason,
    modeLabel: frame === null ? "—" : MODE_LABELS[frame.mode],
    marginText: frame === null ? "—" : `${frame.margin >= 0 ? "+" : ""}${frame.margin.toFixed(3)} m`,
    marginAlert: frame !== null && frame.margin < 0,
    orientationLabel,
    canonical,
    awaitingRecovery: frame?.awaiting_recovery ?? false,
    correcting: frame?.correcting ?? false,
    topple: {
      toppleEnabled: driving && frame !== null,
      // nothing to remap or correct while the robot sits canonically
      remapEnabled: driving && offCanonical,
      correctEnabled: driving && offCanonical,
    },
    ringFraction: deadzoneRingFraction(scale),
    knob: snapWidget(state.widget, scale),
    tickText: frame === null ? "—" : String(frame.tick),
    replayBadge: replay,
  };
}
