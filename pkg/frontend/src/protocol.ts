/**
 * Wire protocol spoken by the console service over its websocket.
 *
 * One JSON object per message in both directions.  This module is the only
 * place that knows the field names; everything else works with the parsed
 * types.  Parsing is strict: a message that does not match the schema throws
 * ProtocolError rather than leaking a half-typed object into the store.
 */

/** Widest value either stick axis may carry; the service rejects beyond it. */
export const AXIS_LIMIT = 0.12;

export type Role = "driver" | "viewer";

export type GaitModeName =
  | "idle"
  | "forward"
  | "backward"
  | "turn_while_moving"
  | "in_place_left"
  | "in_place_right";

const GAIT_MODES: ReadonlySet<string> = new Set([
  "idle",
  "forward",
  "backward",
  "turn_while_moving",
  "in_place_left",
  "in_place_right",
]);

/** One simulator tick as broadcast by the service.  [x, y, psi] pose on the
 * ground plane, per-limb bending configs, 12 actuator pressures limb-major,
 * and optionally the sampled backbone curve of each limb in the body frame.
 */
export interface TelemetryFrame {
  tick: number;
  pose: [number, number, number];
  mode: GaitModeName;
  rho3: number;
  rho4: number;
  rho_inplace: number;
  limbs: Array<[number, number]>;
  pressures: number[];
  margin: number;
  orientation: [number, number];
  awaiting_recovery: boolean;
  correcting: boolean;
  curves?: Array<Array<[number, number, number]>>;
}

export interface HelloMessage {
  kind: "hello";
  role: Role;
  config_hash: string;
  tick_hz: number;
  deadzone: number;
  rho_max: number;
  replay: boolean;
}

export interface RoleMessage {
  kind: "role";
  role: Role;
}

export interface FrameMessage {
  kind: "frame";
  frame: TelemetryFrame;
}

export interface AckMessage {
  kind: "ack";
  seq: number;
  ok: true;
  detail?: string;
}

export interface ErrorMessage {
  kind: "error";
  seq: number | null;
  ok: false;
  error: string;
}

export interface ReplayEndMessage {
  kind: "replay_end";
  frames: number;
}

export type ServerMessage =
  | HelloMessage
  | RoleMessage
  | FrameMessage
  | AckMessage
  | ErrorMessage
  | ReplayEndMessage;

export class ProtocolError extends Error {}

function fail(msg: string): never {
  throw new ProtocolError(msg);
}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function num(obj: Record<string, unknown>, key: string): number {
  const v = obj[key];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    fail(`field '${key}' must be a finite number`);
  }
  return v;
}

function str(obj: Record<string, unknown>, key: string): string {
  const v = obj[key];
  if (typeof v !== "string") fail(`field '${key}' must be a string`);
  return v;
}

function bool(obj: Record<string, unknown>, key: string): boolean {
  const v = obj[key];
  if (typeof v !== "boolean") fail(`field '${key}' must be a boolean`);
  return v;
}

function role(obj: Record<string, unknown>): Role {
  const v = str(obj, "role");
  if (v !== "driver" && v !== "viewer") fail(`unknown role '${v}'`);
  return v;
}

function pair(v: unknown, key: string): [number, number] {
  if (!Array.isArray(v) || v.length !== 2) fail(`field '${key}' must be a 2-array`);
  const [a, b] = v;
  if (typeof a !== "number" || typeof b !== "number") {
    fail(`field '${key}' must hold numbers`);
  }
  return [a, b];
}

function parseFrame(raw: unknown): TelemetryFrame {
  if (!isRecord(raw)) fail("frame must be an object");
  const tick = num(raw, "tick");
  if (!Number.isInteger(tick) || tick < 0) fail("field 'tick' must be a non-negative integer");

  const poseRaw = raw["pose"];
  if (!Array.isArray(poseRaw) || poseRaw.length !== 3 || poseRaw.some((v) => typeof v !== "number")) {
    fail("field 'pose' must be [x, y, psi]");
  }
  const pose = poseRaw as [number, number, number];

  const mode = str(raw, "mode");
  if (!GAIT_MODES.has(mode)) fail(`unknown mode '${mode}'`);

  const limbsRaw = raw["limbs"];
  if (!Array.isArray(limbsRaw) || limbsRaw.length !== 4) fail("field 'limbs' must list 4 limbs");
  const limbs = limbsRaw.map((v, i) => pair(v, `limbs[${i}]`));

  const pressures = raw["pressures"];
  if (!Array.isArray(pressures) || pressures.length !== 12 || pressures.some((v) => typeof v !== "number")) {
    fail("field 'pressures' must hold 12 numbers");
  }

  const orientation = pair(raw["orientation"], "orientation");

  let curves: TelemetryFrame["curves"];
  if (raw["curves"] !== undefined) {
    const cr = raw["curves"];
    if (!Array.isArray(cr) || cr.length !== 4) fail("field 'curves' must list 4 limbs");
    curves = cr.map((curve, i) => {
      if (!Array.isArray(curve) || curve.length < 2) fail(`curves[${i}] must be a polyline`);
      return curve.map((pt: unknown) => {
        if (!Array.isArray(pt) || pt.length !== 3 || pt.some((v) => typeof v !== "number")) {
          fail(`curves[${i}] points must be [x, y, z]`);
        }
        return pt as [number, number, number];
      });
    });
  }

  return {
    tick,
    pose,
    mode: mode as GaitModeName,
    rho3: num(raw, "rho3"),
    rho4: num(raw, "rho4"),
    rho_inplace: num(raw, "rho_inplace"),
    limbs,
    pressures: pressures as number[],
    margin: num(raw, "margin"),
    orientation,
    awaiting_recovery: bool(raw, "awaiting_recovery"),
    correcting: bool(raw, "correcting"),
    ...(curves !== undefined ? { curves } : {}),
  };
}

/** Parse one inbound websocket text message.  Throws ProtocolError on any
 * shape the service is not documented to send. */
export function parseServerMessage(text: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (exc) {
    fail(`not valid JSON: ${(exc as Error).message}`);
  }
  if (!isRecord(data)) fail("message must be a JSON object");

  switch (data["kind"]) {
    case "hello":
      return {
        kind: "hello",
        role: role(data),
        config_hash: str(data, "config_hash"),
        tick_hz: num(data, "tick_hz"),
        deadzone: num(data, "deadzone"),
        rho_max: num(data, "rho_max"),
        replay: bool(data, "replay"),
      };
    case "role":
      return { kind: "role", role: role(data) };
    case "frame":
      return { kind: "frame", frame: parseFrame(data["frame"]) };
    case "ack": {
      const seq = num(data, "seq");
      const msg: AckMessage = { kind: "ack", seq, ok: true };
      if (typeof data["detail"] === "string") msg.detail = data["detail"];
      return msg;
    }
    case "error": {
      const seq = data["seq"];
      if (seq !== null && typeof seq !== "number") fail("field 'seq' must be a number or null");
      return { kind: "error", seq: seq as number | null, ok: false, error: str(data, "error") };
    }
    case "replay_end":
      return { kind: "replay_end", frames: num(data, "frames") };
    default:
      fail(`unknown kind '${String(data["kind"])}'`);
  }
}

// ---------------------------------------------------------------------------
// Outbound commands.  Field sets match the service validator exactly; an
// unknown field there closes nothing but earns an error response, so the
// builders never attach extras.

export interface Orientation {
  top_limb: number;
  roll_index: number;
}

export type Command =
  | { kind: "joystick"; seq: number; sx: number; sy: number }
  | { kind: "set_mode"; seq: number; mode: GaitModeName; rho?: number }
  | { kind: "remap"; seq: number }
  | { kind: "correct_orientation"; seq: number; target?: Orientation }
  | { kind: "inject_topple"; seq: number; orientation?: Orientation }
  | { kind: "pause"; seq: number }
  | { kind: "resume"; seq: number }
  | { kind: "set_params"; seq: number; params: Record<string, number | string> };

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}

export function joystickCommand(seq: number, sx: number, sy: number): Command {
  if (Math.abs(sx) > AXIS_LIMIT || Math.abs(sy) > AXIS_LIMIT) {
    fail(`stick values outside [-${AXIS_LIMIT}, ${AXIS_LIMIT}]`);
  }
  return { kind: "joystick", seq, sx, sy };
}

export function toppleCommand(seq: number, orientation?: Orientation): Command {
  return orientation === undefined
    ? { kind: "inject_topple", seq }
    : { kind: "inject_topple", seq, orientation };
}

export function remapCommand(seq: number): Command {
  return { kind: "remap", seq };
}

export function correctCommand(seq: number, target?: Orientation): Command {
  return target === undefined
    ? { kind: "correct_orientation", seq }
    : { kind: "correct_orientation", seq, target };
}

export function pauseCommand(seq: number): Command {
  return { kind: "pause", seq };
}

export function resumeCommand(seq: number): Command {
  return { kind: "resume", seq };
}

export function setParamsCommand(
  seq: number,
  params: Record<string, number | string>,
): Command {
  return { kind: "set_params", seq, params };
}
