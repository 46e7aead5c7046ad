import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holomotion.geometry import Pose2D, Twist2D
from holomotion.mecanum import (
    MecanumGeometry,
    OdometryGeometry,
    WheelCommand,
    chassis_volts,
    desaturate,
    forward_kinematics,
    inverse_kinematics,
    mix_chassis_volts,
    module_travel,
    odometry_update,
)

GEOM = MecanumGeometry(half_length=7.0, half_width=7.5, wheel_radius=2.0, kv_wheel=4.5)
ODO = OdometryGeometry(track_half_width=7.0, back_offset=6.0, counts_per_inch=1900.0)

speeds = st.floats(-60, 60, allow_nan=False)
rates = st.floats(-4, 4, allow_nan=False)


def test_wheel_patterns():
    fwd = inverse_kinematics(Twist2D(0, 10, 0), GEOM)
    assert len(set(fwd)) == 1 and fwd.v_fl > 0
    rot = inverse_kinematics(Twist2D(0, 0, 1), GEOM)
    assert rot.v_fl == -rot.v_fr and rot.v_bl == -rot.v_br and rot.v_fl == rot.v_bl
    strafe = inverse_kinematics(Twist2D(10, 0, 0), GEOM)
    assert strafe.v_fl == -strafe.v_bl and strafe.v_fr == -strafe.v_br and strafe.v_fl > 0


def test_round_trip_examples():
    tw = forward_kinematics(inverse_kinematics(Twist2D(10, 0, 0), GEOM), GEOM)
    assert (tw.vx, tw.vy, tw.omega) == pytest.approx((10, 0, 0), abs=1e-12)
    s = 2.0
    tw = forward_kinematics(WheelCommand(s, s, s, s), GEOM)
    assert (tw.vx, tw.omega) == (0.0, 0.0)
    assert tw.vy == pytest.approx(s * GEOM.kv_wheel)


@given(speeds, speeds, rates)
def test_fk_ik_identity(vx, vy, w):
    tw = forward_kinematics(inverse_kinematics(Twist2D(vx, vy, w), GEOM), GEOM)
    assert tw.vx == pytest.approx(vx, abs=1e-12)
    assert tw.vy == pytest.approx(vy, abs=1e-12)
    assert tw.omega == pytest.approx(w, abs=1e-12)


@given(speeds, speeds, rates)
def test_desaturation_keeps_direction(vx, vy, w):
    raw = inverse_kinematics(Twist2D(vx, vy, w), GEOM)
    cmd = inverse_kinematics(Twist2D(vx, vy, w), GEOM, v_battery=12.0)
    assert cmd.peak() <= 12.0 + 1e-12
    a = _vec(forward_kinematics(raw, GEOM))
    b = _vec(forward_kinematics(cmd, GEOM))
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na > 1e-9:
        assert np.allclose(a / na, b / nb, atol=1e-9)


def _vec(tw):
    return np.array([tw.vx, tw.vy, tw.omega])


def test_desaturate_noop_when_within_limit():
    cmd = WheelCommand(1.0, -2.0, 3.0, 4.0)
    assert desaturate(cmd, 12.0) is cmd


@given(st.floats(-12, 12), st.floats(-12, 12), st.floats(-12, 12))
def test_chassis_volts_inverts_mix(vx, vy, vh):
    cmd = mix_chassis_volts(vx, vy, vh, GEOM, v_battery=1e9)
    assert chassis_volts(cmd, GEOM) == pytest.approx((vx, vy, vh), abs=1e-9)


def _constant_twist_oracle(pose, vx, vy, w, t):
    # complex closed form of the rigid-body motion under a constant robot-frame twist
    v = complex(vx, vy)
    disp = v * t if abs(w) < 1e-12 else v * (cmath.exp(1j * w * t) - 1) / (1j * w)
    disp *= cmath.exp(1j * pose.heading)
    return pose.x + disp.real, pose.y + disp.imag, pose.heading + w * t


@given(st.floats(-40, 40), st.floats(-40, 40), st.floats(-3, 3), st.floats(0.001, 0.5))
def test_odometry_exact_on_constant_twist(vx, vy, w, t):
    start = Pose2D(3.0, -4.0, 0.7)
    counts = tuple(s * ODO.counts_per_inch for s in module_travel(vx * t, vy * t, w * t, ODO))
    est = odometry_update(start, counts, ODO)
    x, y, h = _constant_twist_oracle(start, vx, vy, w, t)
    assert est.x == pytest.approx(x, abs=1e-9)
    assert est.y == pytest.approx(y, abs=1e-9)
    assert math.cos(est.heading - h) == pytest.approx(1.0, abs=1e-12)


def test_odometry_examples():
    start = Pose2D(1.0, 2.0, 0.3)
    assert odometry_update(start, (0, 0, 0), ODO) == start
    theta = 0.4
    b, rb, cpi = ODO.track_half_width, ODO.back_offset, ODO.counts_per_inch
    turned = odometry_update(start, (-b * theta * cpi, b * theta * cpi, rb * theta * cpi), ODO)
    assert (turned.x, turned.y) == pytest.approx((1.0, 2.0), abs=1e-12)
    assert turned.heading == pytest.approx(0.7)
    s = 5.0
    ahead = odometry_update(Pose2D(0, 0, 0), (s * cpi, s * cpi, 0), ODO)
    # robot frame +y is forward
    assert (ahead.x, ahead.y) == pytest.approx((0.0, s), abs=1e-12)


def test_geometry_validation():
    with pytest.raises(ValueError):
        OdometryGeometry(track_half_width=0.0)
    with pytest.raises(ValueError):
        MecanumGeometry(half_length=-1.0, half_width=7.0, wheel_radius=2.0, kv_wheel=4.5)
