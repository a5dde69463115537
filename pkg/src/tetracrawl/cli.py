"""Command line front door: serve, export gait schedules, replay logs.

Kept thin on purpose: argument parsing and exit codes live here, everything
else is the library.  uvicorn is imported lazily so export-gait works in
environments without a web stack.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, SessionConfig, config_hash, load_config, to_sim_params
from .gait_engine import GaitMode, GaitParams, export_gait_csv
from .locomotion_sim import TelemetryLogError
from .service import ConsoleService, ReplayMismatchError, create_app, load_replay

__all__ = ["build_parser", "main"]

DEFAULT_PORT = 8750

_EXPORT_MODES = ("idle", "forward", "backward", "in_place_left", "in_place_right")


def _default_ui_dir() -> Optional[Path]:
    # present when the browser console has been built in a source checkout
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tetracrawl",
        description="Soft tetrahedral crawler: simulator service, gait export, replay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="serve the simulator over a websocket")
    run.add_argument("--port", type=int, default=DEFAULT_PORT,
                     help=f"TCP port to listen on (default {DEFAULT_PORT})")
    run.add_argument("--host", default="127.0.0.1",
                     help="bind address (default 127.0.0.1)")
    run.add_argument("--config", type=Path, default=None,
                     help="YAML session config (default: built-in values)")
    run.add_argument("--tick-hz", type=float, default=None,
                     help="override the config tick rate")
    run.add_argument("--record", type=Path, default=None,
                     help="write a telemetry log of the session to this path")
    run.add_argument("--ui", type=Path, default=None,
                     help="serve a built UI directory at / (default: autodetect)")

    exp = sub.add_parser("export-gait",
                         help="write one or more cycles of the pressure schedule as CSV")
    exp.add_argument("--mode", required=True, choices=_EXPORT_MODES)
    exp.add_argument("--rho", type=float, default=None,
                     help="trajectory radius in meters (default: config rho_max)")
    exp.add_argument("--out", type=Path, required=True,
                     help="output CSV path, or - for stdout")
    exp.add_argument("--tau", type=int, default=None,
                     help="ticks per cycle (default: config tau)")
    exp.add_argument("--cycles", type=int, default=1,
                     help="number of cycles to export (default 1)")
    exp.add_argument("--config", type=Path, default=None,
                     help="YAML session config (default: built-in values)")

    rep = sub.add_parser("replay", help="re-broadcast a recorded telemetry log")
    rep.add_argument("log", type=Path, help="telemetry log written by run --record")
    rep.add_argument("--speed", type=float, default=1.0,
                     help="cadence multiplier (2 plays twice as fast; default 1)")
    rep.add_argument("--force", action="store_true",
                     help="replay even when the log's config hash does not match")
    rep.add_argument("--port", type=int, default=DEFAULT_PORT,
                     help=f"TCP port to listen on (default {DEFAULT_PORT})")
    rep.add_argument("--host", default="127.0.0.1",
                     help="bind address (default 127.0.0.1)")
    rep.add_argument("--config", type=Path, default=None,
                     help="YAML session config the log is checked against")
    rep.add_argument("--ui", type=Path, default=None,
                     help="serve a built UI directory at / (default: autodetect)")

    return parser


def _session_config(path: Optional[Path], tick_hz: Optional[float]) -> SessionConfig:
    config = load_config(path)
    if tick_hz is not None:
        config = dataclasses.replace(config, tick_hz=tick_hz)
        to_sim_params(config)  # revalidate the override
    return config


def _serve(app, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")


def cmd_run(args: argparse.Namespace) -> int:
    config = _session_config(args.config, args.tick_hz)
    record_fh = None
    if args.record is not None:
        record_fh = open(args.record, "w", encoding="utf-8", newline="\n")
    try:
        service = ConsoleService(config, record=record_fh)
        app = create_app(service, static_dir=args.ui or _default_ui_dir())
        _serve(app, args.host, args.port)
    finally:
        if record_fh is not None:
            record_fh.close()
    return 0


def _gait_params(mode: GaitMode, rho: float, tau: int, rho_max: float) -> GaitParams:
    if mode is GaitMode.IDLE:
        return GaitParams.idle(tau=tau)
    if mode is GaitMode.FORWARD:
        return GaitParams.forward(rho, tau=tau, rho_max=rho_max)
    if mode is GaitMode.BACKWARD:
        return GaitParams.backward(rho, tau=tau, rho_max=rho_max)
    return GaitParams.in_place(rho, tau=tau, rho_max=rho_max)


def cmd_export_gait(args: argparse.Namespace) -> int:
    config = _session_config(args.config, None)
    params = to_sim_params(config)
    mode = GaitMode(args.mode)
    rho = config.rho_max if args.rho is None else args.rho
    if not 0.0 <= rho <= config.rho_max:
        print(f"error: --rho must be within [0, {config.rho_max}]", file=sys.stderr)
        return 2
    tau = config.tau if args.tau is None else args.tau
    if tau < 1 or args.cycles < 1:
        print("error: --tau and --cycles must be at least 1", file=sys.stderr)
        return 2
    gait = _gait_params(mode, rho, tau, config.rho_max)
    if str(args.out) == "-":
        rows = export_gait_csv(sys.stdout, mode, gait, params.geometry,
                               cycles=args.cycles)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            rows = export_gait_csv(fh, mode, gait, params.geometry,
                                   cycles=args.cycles)
    print(f"wrote {rows} rows ({args.cycles} cycle(s) of {tau} ticks)",
          file=sys.stderr)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    config = _session_config(args.config, None)
    try:
        header, lines = load_replay(
            args.log, expected_hash=config_hash(config), force=args.force)
    except FileNotFoundError:
        print(f"error: no such log: {args.log}", file=sys.stderr)
        return 2
    except TelemetryLogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ReplayMismatchError as exc:
        print(f"error: {exc}\nuse --force to replay anyway", file=sys.stderr)
        return 1
    service = ConsoleService(config, replay=(header, lines),
                             replay_speed=args.speed)
    app = create_app(service, static_dir=args.ui or _default_ui_dir())
    _serve(app, args.host, args.port)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "run": cmd_run,
        "export-gait": cmd_export_gait,
        "replay": cmd_replay,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
