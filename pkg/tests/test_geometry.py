import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holomotion.geometry import (
    Path,
    PathError,
    Pose2D,
    angle_diff,
    load_path,
    path_to_records,
    point_at_arc_length,
    to_field_frame,
    to_robot_frame,
    total_displacement,
    wrap_angle,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
angles = st.floats(-50.0, 50.0, allow_nan=False)


@pytest.mark.parametrize("theta, expected", [(0.0, 0.0), (3 * math.pi, math.pi), (-1.5 * math.pi, math.pi / 2)])
def test_wrap_angle_examples(theta, expected):
    assert wrap_angle(theta) == pytest.approx(expected, abs=1e-12)


@given(angles)
def test_wrap_angle_range_and_equivalence(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi
    assert math.cos(w) == pytest.approx(math.cos(theta), abs=1e-9)
    assert math.sin(w) == pytest.approx(math.sin(theta), abs=1e-9)


@given(angles, angles)
def test_angle_diff_is_shortest(a, b):
    d = angle_diff(a, b)
    assert -math.pi < d <= math.pi
    assert wrap_angle(b + d) == pytest.approx(wrap_angle(a), abs=1e-9) or \
        abs(abs(wrap_angle(b + d) - wrap_angle(a)) - 2 * math.pi) < 1e-9


def test_total_displacement_examples():
    assert total_displacement(Path.from_points([(0, 0, 0), (108, 0, 0)]))[:2] == (108.0, 0.0)
    d = total_displacement(Path.from_points([(0, 0, 0), (0, 0, math.pi)]))
    assert d.delta_x == 0.0 and d.delta_h == pytest.approx(math.pi)
    d = total_displacement(Path.from_points([(0, 0, 0), (36, 0, 0), (36, 36, math.pi / 2)]))
    assert d.delta_x == pytest.approx(72.0)
    assert d.delta_h == pytest.approx(math.pi / 2)


def test_point_at_arc_length_examples():
    p = Path.from_points([(0, 0, 0), (0, 108, math.pi / 2)])
    assert point_at_arc_length(p, 0) == p.start
    mid = point_at_arc_length(p, 54)
    assert (mid.x, mid.y) == (0.0, 54.0)
    assert mid.heading == pytest.approx(math.pi / 4)
    assert point_at_arc_length(p, 200) == p.end


def test_heading_interpolation_takes_short_way():
    p = Path.from_points([(0, 0, 3.0), (0, 10, -3.0)])
    h = point_at_arc_length(p, 5).heading
    # halfway along the 0.28 rad arc through +-pi, not through zero
    assert abs(abs(h) - math.pi) < 0.15


def test_path_validation():
    with pytest.raises(PathError):
        Path.from_points([(0, 0, 0)])
    with pytest.raises(PathError) as exc:
        Path.from_points([(0, 0, 0), (1, 1, 0), (1, 1, 0)])
    assert exc.value.index == 2
    # same position but a new heading is a rotation, which is allowed
    Path.from_points([(0, 0, 0), (0, 0, 1.0)])


def test_pose_rejects_non_finite():
    with pytest.raises(ValueError):
        Pose2D(math.nan, 0.0)


def test_closest_point_matches_brute_force():
    rng = np.random.default_rng(3)
    pts = np.cumsum(rng.uniform(-20, 20, size=(6, 2)), axis=0)
    path = Path.from_points([(x, y, 0.0) for x, y in pts])
    # dense resampling at 0.01 in as the oracle
    dense = np.vstack([np.linspace(a, b, max(int(np.hypot(*(b - a)) / 0.01), 2))
                       for a, b in zip(pts[:-1], pts[1:])])
    for q in rng.uniform(-60, 60, size=(50, 2)):
        cp = path.closest_point(*q)
        brute = np.hypot(*(dense - q).T).min()
        assert cp.distance == pytest.approx(brute, abs=0.01)
        assert path.distances_to(q[None, :])[0] == pytest.approx(cp.distance, abs=1e-9)


@given(finite, finite, angles)
def test_frame_round_trip(x, y, h):
    rx, ry = to_robot_frame(x, y, h)
    fx, fy = to_field_frame(rx, ry, h)
    assert fx == pytest.approx(x, abs=1e-9)
    assert fy == pytest.approx(y, abs=1e-9)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-1, 1))
@settings(max_examples=200)
def test_pose_exp_matches_fine_integration(dx, dy, dth):
    pose = Pose2D(1.0, -2.0, 0.3)
    exact = pose.exp(dx, dy, dth)
    n = 2000
    x, y, h = pose.x, pose.y, pose.heading
    for _ in range(n):
        hm = h + 0.5 * dth / n
        x += (math.cos(hm) * dx - math.sin(hm) * dy) / n
        y += (math.sin(hm) * dx + math.cos(hm) * dy) / n
        h += dth / n
    assert exact.x == pytest.approx(x, abs=1e-6)
    assert exact.y == pytest.approx(y, abs=1e-6)


def test_load_path_round_trip(tmp_path):
    p = Path.from_points([(0, 0, 0), (10, 5, 1.0), (20, 5, -1.0)])
    f = tmp_path / "p.json"
    f.write_text(json.dumps(path_to_records(p)))
    assert load_path(f) == p


def test_load_path_errors(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"x_in": 1}))
    with pytest.raises(PathError):
        load_path(f)
    f.write_text(json.dumps([{"x_in": 0, "y_in": 0, "heading_rad": 0}, {"x_in": 1}]))
    with pytest.raises(PathError) as exc:
        load_path(f)
    assert exc.value.index == 1


def test_per_axis_travel_and_tangent():
    p = Path.from_points([(0, 0, 0), (0, 48, 0), (-48, 48, 0)])
    assert p.per_axis_travel() == (48.0, 48.0, 0.0)
    assert p.tangent_at(10) == (0.0, 1.0)
    assert p.tangent_at(60) == (-1.0, 0.0)
