"""CLI: gait export, replay guard rails, config plumbing."""
import csv
import dataclasses
import io
import json

import pytest

from tetracrawl import cli
from tetracrawl.cli import build_parser, main
from tetracrawl.config import config_hash, default_config, to_yaml
from tetracrawl.service import ConsoleService
from tetracrawl.teleop_map import JoystickState


def _export(tmp_path, *extra):
    out = tmp_path / "gait.csv"
    code = main(["export-gait", "--out", str(out), *extra])
    return code, out


def _read_rows(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["tick", "limb", "pma_index", "length_m", "pressure_bar"]
    return rows[1:]


def test_export_idle_is_all_rest_pressure(tmp_path, capsys):
    code, out = _export(tmp_path, "--mode", "idle")
    assert code == 0
    rows = _read_rows(out)
    assert len(rows) == 12 * 100
    assert {r[4] for r in rows} == {"0.500000000"}
    assert {r[3] for r in rows} == {"0.000000000"}
    assert "wrote 1200 rows" in capsys.readouterr().err


def test_export_forward_row_count_and_mirror(tmp_path):
    code, out = _export(tmp_path, "--mode", "forward", "--rho", "0.1")
    assert code == 0
    rows = _read_rows(out)
    assert len(rows) == 12 * 100

    # limbs three and four run the same circle half a cycle apart
    by_key = {(int(r[0]), int(r[1]), int(r[2])): (r[3], r[4]) for r in rows}
    for tick in range(100):
        for idx in (1, 2, 3):
            assert by_key[(tick, 4, idx)] == by_key[((tick + 50) % 100, 3, idx)]
    # limbs one and two never leave rest in a straight crawl with no bend
    for tick in range(100):
        for limb in (1, 2):
            for idx in (1, 2, 3):
                assert by_key[(tick, limb, idx)] == ("0.000000000", "0.500000000")


def test_export_respects_tau_cycles_and_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(to_yaml(dataclasses.replace(default_config(), tau=20)),
                   encoding="utf-8")
    code, out = _export(tmp_path, "--mode", "in_place_left", "--rho", "0.05",
                        "--cycles", "2", "--config", str(cfg))
    assert code == 0
    assert len(_read_rows(out)) == 12 * 20 * 2
    capsys.readouterr()


def test_export_rejects_rho_outside_limits(tmp_path, capsys):
    code, _ = _export(tmp_path, "--mode", "forward", "--rho", "0.2")
    assert code == 2
    assert "--rho must be within" in capsys.readouterr().err
    code, _ = _export(tmp_path, "--mode", "forward", "--rho", "-0.01")
    assert code == 2
    capsys.readouterr()


def test_export_stdout(capsys):
    code = main(["export-gait", "--mode", "idle", "--tau", "5", "--out", "-"])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.count("\n") == 12 * 5 + 1


def test_bad_config_reports_and_exits(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("rho_mx: 0.1\n", encoding="utf-8")
    code = main(["export-gait", "--mode", "idle", "--out", "-", "--config", str(cfg)])
    assert code == 2
    assert "unknown config keys" in capsys.readouterr().err


def _write_log(tmp_path, ticks=5):
    buf = io.StringIO()
    service = ConsoleService(default_config(), record=buf)
    service.latest_stick = JoystickState(0.0, 0.05)
    for _ in range(ticks):
        service.tick_once()
    path = tmp_path / "session.ndjson"
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def test_replay_guards(tmp_path, capsys, monkeypatch):
    served = {}
    monkeypatch.setattr(cli, "_serve", lambda app, host, port: served.update(
        app=app, host=host, port=port))

    missing = main(["replay", str(tmp_path / "nope.ndjson")])
    assert missing == 2
    assert "no such log" in capsys.readouterr().err

    log = _write_log(tmp_path)
    truncated = tmp_path / "cut.ndjson"
    lines = log.read_text().splitlines()
    truncated.write_text("\n".join(lines[:2] + [lines[2][:30]]) + "\n")
    code = main(["replay", str(truncated)])
    assert code == 1
    assert "line 3" in capsys.readouterr().err

    cfg = tmp_path / "other.yaml"
    cfg.write_text(to_yaml(dataclasses.replace(default_config(), k_v=0.7)))
    code = main(["replay", str(log), "--config", str(cfg)])
    assert code == 1
    assert "--force" in capsys.readouterr().err

    code = main(["replay", str(log), "--config", str(cfg), "--force", "--speed", "3"])
    assert code == 0
    assert served["app"].state.service.is_replay
    assert served["app"].state.service.replay_speed == 3.0
    capsys.readouterr()


def test_run_wires_config_record_and_port(tmp_path, monkeypatch):
    served = {}
    monkeypatch.setattr(cli, "_serve", lambda app, host, port: served.update(
        app=app, host=host, port=port))
    record = tmp_path / "rec.ndjson"
    code = main(["run", "--port", "9001", "--tick-hz", "25", "--record", str(record)])
    assert code == 0
    assert served["port"] == 9001 and served["host"] == "127.0.0.1"
    service = served["app"].state.service
    assert service.config.tick_hz == 25.0
    header = json.loads(record.read_text().splitlines()[0])
    assert header["tick_hz"] == 25.0
    assert header["config_hash"] == config_hash(service.config)


def test_run_rejects_bad_tick_override(capsys):
    code = main(["run", "--tick-hz", "-5"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_parser_defaults():
    args = build_parser().parse_args(["run"])
    assert args.port == 8750 and args.config is None and args.tick_hz is None
    args = build_parser().parse_args(["replay", "x.ndjson"])
    assert args.speed == 1.0 and args.force is False
    with pytest.raises(SystemExit):
        build_parser().parse_args(["export-gait", "--mode", "sideways", "--out", "-"])
