import math

import numpy as np
import pytest

from tetracrawl.gait_engine import GaitMode
from tetracrawl.teleop_map import (
    JoystickState,
    TeleopFidelity,
    TeleopParams,
    classify,
    joystick_from_unit,
    joystick_from_volts,
    radii,
    speed,
    unit_to_axis,
    volts_to_axis,
)

PAR = TeleopParams()
SMOOTH = TeleopParams(fidelity=TeleopFidelity.SMOOTHED)

# frozen by the piecewise evaluator: sigma = (0.06, 0.05)
RHO3_CASE = 0.06810249675906654
RHO4_CASE = 0.01810249675906654

# 0.005-step axis grid; built from integers so deadzone-boundary sums are exact
GRID = [k * 0.005 for k in range(-24, 25)]


def gate_oracle(a, b):
    s = a + b
    if s > 0.0:
        return 1.0
    if s < 0.0:
        return 0.0
    return 0.5


def radii_oracle(sx, sy, dz=0.01, rho_max=0.12):
    """Independent piecewise evaluation of the radii map."""
    v = math.hypot(sx, sy)
    r3 = gate_oracle(sx, v) * (sx + v) * gate_oracle(-sx, dz) + (v - dz) * gate_oracle(sx, dz)
    r4 = gate_oracle(-sx, v) * (-sx + v) * gate_oracle(sx, dz) + (v - dz) * gate_oracle(-sx, dz)
    return (min(max(r3, 0.0), rho_max), min(max(r4, 0.0), rho_max))


def test_worked_case():
    r3, r4 = radii(JoystickState(0.06, 0.05), PAR)
    assert abs(r3 - RHO3_CASE) <= 1e-12
    assert abs(r4 - RHO4_CASE) <= 1e-12


def test_matches_piecewise_oracle_on_grid():
    for sx in GRID:
        for sy in GRID:
            got = radii(JoystickState(sx, sy), PAR)
            want = radii_oracle(sx, sy)
            assert abs(got[0] - want[0]) <= 1e-9, (sx, sy)
            assert abs(got[1] - want[1]) <= 1e-9, (sx, sy)


def test_mirror_swap_exact():
    for sx in GRID:
        for sy in GRID:
            r3, r4 = radii(JoystickState(sx, sy), PAR)
            m3, m4 = radii(JoystickState(-sx, sy), PAR)
            assert r3 == m4 and r4 == m3, (sx, sy)


def test_radii_clamped():
    for sx in GRID:
        for sy in GRID:
            for p in (PAR, SMOOTH):
                r3, r4 = radii(JoystickState(sx, sy), p)
                assert 0.0 <= r3 <= 0.12
                assert 0.0 <= r4 <= 0.12


def test_centerline_equal_radii():
    r3, r4 = radii(JoystickState(0.0, 0.08), PAR)
    assert r3 == r4
    # both gate terms active on the centerline: 2v - deadzone, then clamped
    assert abs(r3 - 0.12) <= 1e-15
    r3, r4 = radii(JoystickState(0.0, 0.05), PAR)
    assert r3 == r4
    assert abs(r3 - (2 * 0.05 - 0.01)) <= 1e-12


def test_deadzone_edge_is_discontinuous_in_hard_gate():
    # the hard gate saturates within ~1e-6 of the edge, so sample at 1e-5
    v_ref = radii(JoystickState(0.01 - 1e-5, 0.05), PAR)
    v_out = radii(JoystickState(0.01 + 1e-5, 0.05), PAR)
    assert abs(v_ref[0] - v_out[0]) > 0.04


def test_smoothed_is_continuous():
    sxs = np.arange(-0.12, 0.12, 1e-4)
    prev = None
    for sx in sxs:
        r = radii(JoystickState(float(sx), 0.08), SMOOTH)
        if prev is not None:
            assert abs(r[0] - prev[0]) < 5e-3
            assert abs(r[1] - prev[1]) < 5e-3
        prev = r


def test_smoothed_centerline_gives_v():
    r3, r4 = radii(JoystickState(0.0, 0.07), SMOOTH)
    assert r3 == r4 == 0.07


def test_smoothed_mirror_swap_exact():
    for sx in GRID[::4]:
        for sy in GRID[::4]:
            r3, r4 = radii(JoystickState(sx, sy), SMOOTH)
            m3, m4 = radii(JoystickState(-sx, sy), SMOOTH)
            assert r3 == m4 and r4 == m3


def test_classify_idle():
    for sx, sy in ((0.0, 0.0), (0.005, -0.005), (-0.01, 0.01)):
        mode, p = classify(JoystickState(sx, sy), PAR)
        assert mode is GaitMode.IDLE
        assert p.rho3 == p.rho4 == p.rho_inplace == 0.0


def test_classify_forward_backward():
    mode, p = classify(JoystickState(0.0, 0.08), PAR)
    assert mode is GaitMode.FORWARD
    assert p.rho3 == p.rho4 == 0.12
    assert p.direction_sign == 1
    mode, p = classify(JoystickState(0.006, -0.08), PAR)
    assert mode is GaitMode.BACKWARD
    assert p.rho3 == p.rho4
    assert p.direction_sign == -1
    # snapped lateral axis: same radii as a perfectly centered stick
    _, centered = classify(JoystickState(0.0, -0.08), PAR)
    assert p.rho3 == centered.rho3


def test_classify_in_place():
    mode, p = classify(JoystickState(0.08, 0.0), PAR)
    assert mode is GaitMode.IN_PLACE_RIGHT
    assert abs(p.rho_inplace - 0.08) <= 1e-15
    mode, p = classify(JoystickState(-0.08, 0.003), PAR)
    assert mode is GaitMode.IN_PLACE_LEFT
    assert abs(p.rho_inplace - math.hypot(0.08, 0.003)) <= 1e-15


def test_classify_turn_while_moving():
    mode, p = classify(JoystickState(0.06, 0.05), PAR)
    assert mode is GaitMode.TURN_WHILE_MOVING
    assert abs(p.rho3 - RHO3_CASE) <= 1e-12
    assert abs(p.rho4 - RHO4_CASE) <= 1e-12
    assert p.direction_sign == 1
    mode, p = classify(JoystickState(0.06, -0.05), PAR)
    assert mode is GaitMode.TURN_WHILE_MOVING
    assert p.direction_sign == -1


def test_volts_mapping():
    assert volts_to_axis(3.0) == 0.0
    assert volts_to_axis(5.0) == 0.12
    assert volts_to_axis(1.0) == -0.12
    assert volts_to_axis(9.0) == 0.12   # clamped
    assert volts_to_axis(-2.0) == -0.12
    js = joystick_from_volts(4.0, 2.0)
    assert abs(js.sigma_x - 0.06) <= 1e-15
    assert abs(js.sigma_y + 0.06) <= 1e-15


def test_unit_mapping():
    assert unit_to_axis(1.0) == 0.12
    assert unit_to_axis(-1.0) == -0.12
    assert unit_to_axis(2.0) == 0.12
    js = joystick_from_unit(0.5, -0.25)
    assert abs(js.sigma_x - 0.06) <= 1e-15
    assert abs(js.sigma_y + 0.03) <= 1e-15


def test_joystick_state_bounds():
    JoystickState(0.12, -0.12)
    with pytest.raises(ValueError):
        JoystickState(0.2, 0.0)


def test_teleop_params_validation():
    with pytest.raises(ValueError):
        TeleopParams(deadzone=0.0)
    with pytest.raises(ValueError):
        TeleopParams(deadzone=0.2)
    with pytest.raises(ValueError):
        TeleopParams(volt_lo=5.0, volt_hi=1.0)


def test_speed():
    assert speed(JoystickState(0.03, 0.04)) == 0.05
