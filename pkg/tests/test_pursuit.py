import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from holomotion.geometry import Path, Pose2D
from holomotion.pursuit import PursuitState, circle_intersections, find_lookahead

STRAIGHT = Path.from_points([(0, 0, 0), (0, 108, math.pi / 2)])


def test_target_is_lookahead_ahead_at_start():
    target, st_ = find_lookahead(STRAIGHT, Pose2D(0, 0, 0), PursuitState(12.0))
    assert (target.x, target.y) == pytest.approx((0.0, 12.0))
    assert st_.last_progress == pytest.approx(12.0)


def test_endpoint_when_close_to_end():
    target, _ = find_lookahead(STRAIGHT, Pose2D(0, 96, 0), PursuitState(12.0, 90.0))
    assert target == STRAIGHT.end


def test_off_path_targets_closest_point():
    target, _ = find_lookahead(STRAIGHT, Pose2D(20, 50, 0), PursuitState(12.0, 30.0))
    assert circle_intersections(STRAIGHT, 20, 50, 12.0) == []
    assert (target.x, target.y) == pytest.approx((0.0, 50.0))


def test_progress_never_goes_back():
    state = PursuitState(12.0, 60.0)
    _, new = find_lookahead(STRAIGHT, Pose2D(0, 10, 0), state)
    assert new.last_progress >= 60.0


@given(st.floats(0, 108), st.floats(-10, 10), st.floats(1, 30), st.floats(0, 100))
def test_progress_monotone_and_target_on_path(y, x, d, progress):
    state = PursuitState(d, progress)
    target, new = find_lookahead(STRAIGHT, Pose2D(x, y, 0), state)
    assert new.last_progress >= progress
    assert STRAIGHT.closest_point(target.x, target.y).distance < 1e-9


def test_lookahead_must_be_positive():
    with pytest.raises(ValueError):
        PursuitState(0.0)


def test_farthest_crossing_on_l_path():
    p = Path.from_points([(0, 0, 0), (0, 48, 0), (-48, 48, 0)])
    target, _ = find_lookahead(p, Pose2D(0, 44, 0), PursuitState(12.0, 40.0))
    # the circle crosses the first leg behind and the second leg ahead
    assert target.y == pytest.approx(48.0)
    assert target.x == pytest.approx(-math.sqrt(144 - 16))
