"""Wire protocol between the console service and its UIs.

One JSON object per message, both directions.  Client commands carry a
``kind``, a per-connection strictly increasing ``seq``, and kind-specific
payload fields; the server answers with ``ack``/``error`` envelopes that
echo the seq, plus unsolicited ``role`` and ``frame`` messages.  Everything
here is plain data validation so either side can be tested offline.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional

from .gait_engine import GaitMode
from .teleop_map import AXIS_LIMIT
from .tetra_frames import LimbId
from .topple import OrientationState

__all__ = [
    "COMMAND_KINDS",
    "RUNTIME_TUNABLE_PARAMS",
    "CommandMessage",
    "ProtocolError",
    "ack_message",
    "error_message",
    "frame_message",
    "hello_message",
    "parse_command",
    "role_message",
]

COMMAND_KINDS = (
    "joystick",
    "set_mode",
    "remap",
    "correct_orientation",
    "inject_topple",
    "pause",
    "resume",
    "set_params",
)

#: config keys a running session may change; everything else needs a restart
RUNTIME_TUNABLE_PARAMS = (
    "deadzone",
    "fidelity",
    "gate_sharpness",
    "k_v",
    "k_omega",
    "k_inplace",
    "bend_intensity",
    "correction_rho",
    "maneuver_cycles",
    "tick_hz",
)

_SETTABLE_MODES = tuple(
    m.value for m in GaitMode if m is not GaitMode.TURN_WHILE_MOVING
)


class ProtocolError(ValueError):
    """Malformed or invalid command; the connection survives it."""


@dataclass(frozen=True)
class CommandMessage:
    kind: str
    seq: int
    payload: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "seq": self.seq, **self.payload}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _require_number(payload: Mapping[str, Any], key: str) -> float:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProtocolError(f"field '{key}' must be a number")
    if not math.isfinite(value):
        raise ProtocolError(f"field '{key}' must be finite")
    return float(value)


def _validate_orientation(value: Any, key: str) -> None:
    if not isinstance(value, Mapping):
        raise ProtocolError(f"field '{key}' must be an object")
    extra = set(value) - {"top_limb", "roll_index"}
    if extra:
        raise ProtocolError(f"field '{key}' has unknown keys: {sorted(extra)}")
    try:
        OrientationState(LimbId(value["top_limb"]), value["roll_index"])
    except (KeyError, ValueError) as exc:
        raise ProtocolError(f"field '{key}' is not a valid orientation: {exc}") from None


def orientation_from_payload(value: Mapping[str, Any]) -> OrientationState:
    return OrientationState(LimbId(value["top_limb"]), value["roll_index"])


def _check_payload(kind: str, payload: Dict[str, Any]) -> None:
    allowed: Dict[str, tuple] = {
        "joystick": ("sx", "sy"),
        "set_mode": ("mode", "rho"),
        "remap": (),
        "correct_orientation": ("target",),
        "inject_topple": ("orientation",),
        "pause": (),
        "resume": (),
        "set_params": ("params",),
    }[kind]
    extra = set(payload) - set(allowed)
    if extra:
        raise ProtocolError(f"unknown fields for '{kind}': {sorted(extra)}")

    if kind == "joystick":
        for key in ("sx", "sy"):
            v = _require_number(payload, key)
            if abs(v) > AXIS_LIMIT + 1e-9:
                raise ProtocolError(f"field '{key}' outside [-{AXIS_LIMIT}, {AXIS_LIMIT}]")
    elif kind == "set_mode":
        mode = payload.get("mode")
        if mode not in _SETTABLE_MODES:
            raise ProtocolError(f"mode must be one of: {', '.join(_SETTABLE_MODES)}")
        if "rho" in payload:
            rho = _require_number(payload, "rho")
            if not 0.0 <= rho <= AXIS_LIMIT:
                raise ProtocolError(f"field 'rho' outside [0, {AXIS_LIMIT}]")
    elif kind == "correct_orientation":
        if "target" in payload:
            _validate_orientation(payload["target"], "target")
    elif kind == "inject_topple":
        if "orientation" in payload:
            _validate_orientation(payload["orientation"], "orientation")
    elif kind == "set_params":
        params = payload.get("params")
        if not isinstance(params, Mapping) or not params:
            raise ProtocolError("field 'params' must be a non-empty object")
        bad = sorted(set(params) - set(RUNTIME_TUNABLE_PARAMS))
        if bad:
            raise ProtocolError(
                f"not tunable at runtime: {', '.join(bad)} "
                f"(allowed: {', '.join(RUNTIME_TUNABLE_PARAMS)})"
            )


def parse_command(raw: Any) -> CommandMessage:
    """Validate one inbound message (JSON text or an already-parsed dict)."""
    if isinstance(raw, (str, bytes)):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"not valid JSON: {exc}") from None
    else:
        data = raw
    if not isinstance(data, dict):
        raise ProtocolError("message must be a JSON object")
    kind = data.get("kind")
    if kind not in COMMAND_KINDS:
        raise ProtocolError(f"unknown kind {kind!r}")
    seq = data.get("seq")
    if isinstance(seq, bool) or not isinstance(seq, int) or seq < 0:
        raise ProtocolError("field 'seq' must be a non-negative integer")
    payload = {k: v for k, v in data.items() if k not in ("kind", "seq")}
    _check_payload(kind, payload)
    return CommandMessage(kind=kind, seq=seq, payload=payload)


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def ack_message(seq: int, detail: Optional[str] = None) -> str:
    out: Dict[str, Any] = {"kind": "ack", "seq": seq, "ok": True}
    if detail:
        out["detail"] = detail
    return _dumps(out)


def error_message(error: str, seq: Optional[int] = None) -> str:
    return _dumps({"kind": "error", "seq": seq, "ok": False, "error": error})


def role_message(role: str) -> str:
    return _dumps({"kind": "role", "role": role})


def hello_message(
    role: str,
    *,
    config_hash: str,
    tick_hz: float,
    deadzone: float,
    rho_max: float,
    replay: bool,
) -> str:
    """First message on every connection: the client's role plus the few
    session constants a UI needs (deadzone ring scale, staleness timeout)."""
    return _dumps({
        "kind": "hello",
        "role": role,
        "config_hash": config_hash,
        "tick_hz": tick_hz,
        "deadzone": deadzone,
        "rho_max": rho_max,
        "replay": replay,
    })


def frame_message(frame_json_line: str) -> str:
    # frames are pre-serialized; splice to keep replay byte-identical
    return '{"kind":"frame","frame":' + frame_json_line + "}"
