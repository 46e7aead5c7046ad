import csv
import math
from dataclasses import replace
from types import SimpleNamespace

import pytest

from holomotion.config import load_config
from holomotion.geometry import Path
from holomotion.orchestrator import (
    CSV_COLUMNS,
    Mode,
    Reached,
    RunPlan,
    Timeout,
    estimate_motion_time,
    run_trial,
    setpoint_reached,
    write_record_csv,
)

CFG = load_config()


def _tail(error, speed, span=0.1, dt=0.02):
    n = int(round(span / dt)) + 1
    return [SimpleNamespace(t=i * dt, error_in=error, speed=speed) for i in range(n)]


def test_setpoint_examples():
    assert setpoint_reached(_tail(0.9, 0.1))
    assert not setpoint_reached(_tail(0.9, 5.0))
    assert not setpoint_reached(_tail(1.2, 0.0))
    assert not setpoint_reached([])
    # a window shorter than the dwell is not enough
    assert not setpoint_reached(_tail(0.5, 0.0, span=0.04))


def _plan(path, mode, **kw):
    return RunPlan(path, mode, CFG.gains_for(mode.is_pitdt), timeout=kw.pop("timeout", 8.0),
                   criterion=CFG.criterion, heading_radius=CFG.heading_radius, **kw)


@pytest.mark.parametrize("mode", [Mode.PID_ONLY, Mode.PITDT_ONLY])
def test_already_at_goal_reaches_immediately(mode):
    # out and back: the setpoint is the start, so nothing needs to move
    path = Path.from_points([(0, 0, 0), (0, 10, 0), (0, 0, 0)])
    rec = run_trial(_plan(path, mode), CFG.plant, seed=1)
    assert rec.reached
    assert rec.time_to_setpoint == 0.0


def test_short_move_runs_on_feedback_alone():
    path = Path.from_points([(0, 0, 0), (0, 0.5, 0)])
    T, prof = estimate_motion_time(path, CFG.plant)
    assert prof is None and T > 0
    rec = run_trial(_plan(path, Mode.PITDT_SYSTEM), CFG.plant, seed=1)
    assert rec.reached and not rec.profiled
    assert all(s.ff_volts == (0.0, 0.0, 0.0) for s in rec.samples)


@pytest.mark.parametrize("mode", list(Mode))
def test_every_mode_reaches_a_3ft_move(mode):
    path = Path.from_points([(0, 0, 0), (0, 36, 0)])
    rec = run_trial(_plan(path, mode), CFG.plant, seed=1)
    assert rec.reached, mode
    assert rec.profiled == (mode is Mode.PITDT_SYSTEM)
    assert rec.samples[-1].pose.distance_to(path.end) <= CFG.criterion.threshold_in


def test_timeout_outcome():
    path = Path.from_points([(0, 0, 0), (0, 108, 0)])
    rec = run_trial(_plan(path, Mode.PID_ONLY, timeout=0.5), CFG.plant, seed=1)
    assert isinstance(rec.outcome, Timeout)
    assert rec.time_to_setpoint is None


def test_same_seed_same_record():
    path = Path.from_points([(0, 0, 0), (24, 24, math.pi / 2)])
    a = run_trial(_plan(path, Mode.PITDT_SYSTEM), CFG.plant, seed=3)
    b = run_trial(_plan(path, Mode.PITDT_SYSTEM), CFG.plant, seed=3)
    assert a.samples == b.samples and a.outcome == b.outcome


def test_pursuit_modes_count_calls():
    path = Path.from_points([(0, 0, 0), (0, 36, 0)])
    rec = run_trial(_plan(path, Mode.PID_SYSTEM), CFG.plant, seed=1)
    assert rec.counters["pursuit_calls"] == len(rec.samples)
    rec = run_trial(_plan(path, Mode.PID_ONLY), CFG.plant, seed=1)
    assert rec.counters["pursuit_calls"] == 0


def test_csv_round_trip(tmp_path):
    path = Path.from_points([(0, 0, 0), (0, 24, 0)])
    rec = run_trial(_plan(path, Mode.PID_ONLY), CFG.plant, seed=1)
    dest = tmp_path / "trial.csv"
    write_record_csv(rec, dest)
    with open(dest) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == len(rec.samples) + 1
    assert float(rows[-1][2]) == pytest.approx(rec.samples[-1].pose.y, abs=1e-6)


def test_noise_free_run_has_exact_odometry():
    path = Path.from_points([(0, 0, 0), (0, 48, 0)])
    rec = run_trial(_plan(path, Mode.PID_ONLY), CFG.plant.without_noise(), seed=1)
    assert isinstance(rec.outcome, Reached)
    worst = max(s.pose.distance_to(s.true_pose) for s in rec.samples)
    # only encoder rounding separates the estimate from the truth
    assert worst < 0.01


def test_plan_validation():
    path = Path.from_points([(0, 0, 0), (0, 24, 0)])
    with pytest.raises(ValueError):
        replace(_plan(path, Mode.PID_ONLY), timeout=0.0)
