import { describe, expect, it } from "vitest";

import {
  AXIS_LIMIT,
  ProtocolError,
  encodeCommand,
  joystickCommand,
  parseServerMessage,
  remapCommand,
  toppleCommand,
  correctCommand,
  pauseCommand,
  resumeCommand,
  setParamsCommand,
} from "../src/protocol.js";

// Verbatim captures from a live service session.  These pin the parser to
// the bytes the backend actually emits, not to what this package assumes.
const HELLO_LINE =
  '{"config_hash":"c5f81a12efe7fb7ca37c4f91ba805c6c78e503b58bce6c88e99d88d90e628a03","deadzone":0.01,"kind":"hello","replay":false,"rho_max":0.12,"role":"driver","tick_hz":50.0}';

const FRAME_LINE =
  '{"kind":"frame","frame":{"awaiting_recovery":false,"correcting":false,"curves":[[[0.0,0.0,0.0],[0.0,0.0,0.07999999999999999],[0.0,0.0,0.15999999999999998],[0.0,0.0,0.24]],[[0.0,0.0,0.0],[0.07544159450320084,0.0,-0.026618899654467607],[0.15088318900640169,0.0,-0.05323779930893521],[0.22632478350960253,0.0,-0.07985669896340283]],[[0.0,0.0,0.0],[-0.0399326502661407,0.0675122250679454,-0.0137427051204194],[-0.08130349786104325,0.13438987698415256,-0.0012042969924472963],[-0.11959034850052856,0.19332264540167912,0.036244667074473935]],[[0.0,0.0,0.0],[-0.03556113958278757,-0.059940546458547524,-0.038521620899876846],[-0.06429529935308768,-0.10493081302315616,-0.09761140861035983],[-0.08306158516373884,-0.13005297136469984,-0.17081033423133454]]],"limbs":[[0.0,0.0],[0.0,0.0],[3.078760800517997,0.9964299768602267],[-0.06283185307179584,0.9964299768602267]],"margin":0.09190237904099065,"mode":"forward","orientation":[1,0],"pose":[0.0034557519189487725,0.0,0.0],"pressures":[0.5,0.5,0.5,0.5,0.5,0.5,2.091141999861873,0.0,0.0,0.0,1.3822654857715042,1.208876514090369],"rho3":0.10999999999999999,"rho4":0.10999999999999999,"rho_inplace":0.0,"tick":1}}';

const ACK_LINE = '{"detail":"paused","kind":"ack","ok":true,"seq":3}';
const ERROR_LINE = '{"error":"driver role required","kind":"error","ok":false,"seq":9}';

describe("parseServerMessage", () => {
  it("parses a captured hello", () => {
    const msg = parseServerMessage(HELLO_LINE);
    expect(msg).toEqual({
      kind: "hello",
      role: "driver",
      config_hash: "c5f81a12efe7fb7ca37c4f91ba805c6c78e503b58bce6c88e99d88d90e628a03",
      tick_hz: 50,
      deadzone: 0.01,
      rho_max: 0.12,
      replay: false,
    });
  });

  it("parses a captured live frame", () => {
    const msg = parseServerMessage(FRAME_LINE);
    if (msg.kind !== "frame") throw new Error("expected frame");
    const f = msg.frame;
    expect(f.tick).toBe(1);
    expect(f.mode).toBe("forward");
    expect(f.pose[0]).toBeCloseTo(0.0034557519189487725, 15);
    expect(f.limbs).toHaveLength(4);
    expect(f.pressures).toHaveLength(12);
    expect(f.orientation).toEqual([1, 0]);
    expect(f.awaiting_recovery).toBe(false);
    expect(f.curves).toHaveLength(4);
    expect(f.curves?.[0]).toHaveLength(4);
    expect(f.curves?.[0]?.[3]?.[2]).toBeCloseTo(0.24, 15);
    expect(f.rho3).toBeCloseTo(0.11, 12);
  });

  it("parses ack and error responses", () => {
    expect(parseServerMessage(ACK_LINE)).toEqual({ kind: "ack", seq: 3, ok: true, detail: "paused" });
    expect(parseServerMessage(ERROR_LINE)).toEqual({
      kind: "error",
      seq: 9,
      ok: false,
      error: "driver role required",
    });
  });

  it("parses role promotions and replay end", () => {
    expect(parseServerMessage('{"kind":"role","role":"driver"}')).toEqual({
      kind: "role",
      role: "driver",
    });
    expect(parseServerMessage('{"kind":"replay_end","frames":500}')).toEqual({
      kind: "replay_end",
      frames: 500,
    });
  });

  it("accepts error with null seq (unparseable client message)", () => {
    const msg = parseServerMessage('{"error":"not valid JSON: x","kind":"error","ok":false,"seq":null}');
    expect(msg.kind).toBe("error");
    if (msg.kind === "error") expect(msg.seq).toBeNull();
  });

  it.each([
    ["not json", "{nope"],
    ["not an object", "[1,2]"],
    ["unknown kind", '{"kind":"telemetry"}'],
    ["hello with bad role", '{"kind":"hello","role":"admin","config_hash":"x","tick_hz":50,"deadzone":0.01,"rho_max":0.12,"replay":false}'],
    ["hello missing field", '{"kind":"hello","role":"driver"}'],
    ["frame without body", '{"kind":"frame"}'],
    ["frame with three limbs", FRAME_LINE.replace('[[0.0,0.0],[0.0,0.0],', "[[0.0,0.0],")],
    ["frame with unknown mode", FRAME_LINE.replace('"mode":"forward"', '"mode":"sprint"')],
    ["frame with string tick", FRAME_LINE.replace('"tick":1', '"tick":"1"')],
    ["ack with missing seq", '{"kind":"ack","ok":true}'],
  ])("rejects %s", (_label, text) => {
    expect(() => parseServerMessage(text)).toThrow(ProtocolError);
  });
});

describe("command encoding", () => {
  // Field sets must match the service validator exactly; anything extra is
  // rejected server-side, anything missing is a silent no-op.
  it("encodes joystick with only kind/seq/sx/sy", () => {
    expect(encodeCommand(joystickCommand(4, 0, 0.12))).toBe('{"kind":"joystick","seq":4,"sx":0,"sy":0.12}');
  });

  it("rejects stick values past the axis limit", () => {
    expect(() => joystickCommand(1, 0, AXIS_LIMIT + 0.001)).toThrow(ProtocolError);
    expect(() => joystickCommand(1, -0.13, 0)).toThrow(ProtocolError);
  });

  it("encodes bare remap/pause/resume", () => {
    expect(encodeCommand(remapCommand(7))).toBe('{"kind":"remap","seq":7}');
    expect(encodeCommand(pauseCommand(8))).toBe('{"kind":"pause","seq":8}');
    expect(encodeCommand(resumeCommand(9))).toBe('{"kind":"resume","seq":9}');
  });

  it("encodes topple with and without a chosen orientation", () => {
    expect(encodeCommand(toppleCommand(2))).toBe('{"kind":"inject_topple","seq":2}');
    expect(encodeCommand(toppleCommand(3, { top_limb: 4, roll_index: 2 }))).toBe(
      '{"kind":"inject_topple","seq":3,"orientation":{"top_limb":4,"roll_index":2}}',
    );
  });

  it("encodes orientation correction", () => {
    expect(encodeCommand(correctCommand(5))).toBe('{"kind":"correct_orientation","seq":5}');
    expect(encodeCommand(correctCommand(6, { top_limb: 1, roll_index: 0 }))).toBe(
      '{"kind":"correct_orientation","seq":6,"target":{"top_limb":1,"roll_index":0}}',
    );
  });

  it("encodes runtime parameter changes", () => {
    expect(encodeCommand(setParamsCommand(10, { k_v: 0.9 }))).toBe(
      '{"kind":"set_params","seq":10,"params":{"k_v":0.9}}',
    );
  });
});
