"""Closed-loop trial runner.

Per tick: localize from the odometry modules, sample the motion profiles for
feedforward volts, pick a pure pursuit target, run one controller per axis for
feedback volts, add the two, mix to wheel voltages and step the plant.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path as FsPath
from typing import Union

from .controller import (
    AxisStates,
    ControllerGains,
    make_axis_controllers,
    make_axis_controllers_from_extent,
    pid_step,
    pitdt_step,
    scale_starting_error,
)
from .geometry import Path, Pose2D, Twist2D, angle_diff, to_robot_frame
from .mecanum import WheelCommand, mix_chassis_volts, odometry_update
from .profile import (
    DegeneratePath,
    HolonomicProfiles,
    TooShort,
    build_holonomic_profiles,
    triangular_time_estimate,
)
from .pursuit import DEFAULT_LOOKAHEAD_IN, PursuitState, find_lookahead
from .simulator import Plant, PlantConfig


class Mode(enum.Enum):
    PITDT_SYSTEM = "pitdt_system"
    PID_SYSTEM = "pid_system"
    PITDT_ONLY = "pitdt_only"
    PID_ONLY = "pid_only"

    @property
    def uses_profile(self) -> bool:
        return self is Mode.PITDT_SYSTEM

    @property
    def uses_pursuit(self) -> bool:
        return self in (Mode.PITDT_SYSTEM, Mode.PID_SYSTEM)

    @property
    def is_pitdt(self) -> bool:
        return self in (Mode.PITDT_SYSTEM, Mode.PITDT_ONLY)


@dataclass(frozen=True)
class AxisGains:
    """Gains for the two translation controllers and the heading controller."""

    translation: ControllerGains
    heading: ControllerGains


@dataclass(frozen=True)
class SetpointCriterion:
    threshold_in: float = 1.0
    v_negligible: float = 0.5
    dwell: float = 0.1


@dataclass(frozen=True)
class RunPlan:
    path: Path
    mode: Mode
    gains: AxisGains
    lookahead: float = DEFAULT_LOOKAHEAD_IN
    timeout: float = 30.0
    criterion: SetpointCriterion = SetpointCriterion()
    heading_radius: float = 7.5
    # re-derive normalization denominators from each new look-ahead error
    per_update_denominators: bool = False

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class Sample:
    t: float
    pose: Pose2D
    error_in: float
    speed: float
    command: Twist2D
    wheel_volts: WheelCommand
    ff_volts: tuple[float, float, float]
    fb_volts: tuple[float, float, float]
    true_pose: Pose2D


@dataclass(frozen=True)
class Reached:
    t_final: float


@dataclass(frozen=True)
class Timeout:
    t_end: float


Outcome = Union[Reached, Timeout]


@dataclass
class TrialRecord:
    samples: list[Sample]
    outcome: Outcome
    mode: Mode
    slip_events: int = 0
    end_slip_events: int = 0
    profiled: bool = False
    T: float = 0.0
    counters: dict[str, int] = field(default_factory=dict)

    @property
    def reached(self) -> bool:
        return isinstance(self.outcome, Reached)

    @property
    def time_to_setpoint(self) -> float | None:
        return self.outcome.t_final if self.reached else None


CSV_COLUMNS = ("t", "x", "y", "heading", "error_in", "vx", "vy", "omega",
               "v_fl", "v_fr", "v_bl", "v_br")


def write_record_csv(record: TrialRecord, dest: str | FsPath) -> None:
    with open(dest, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in record.samples:
            w.writerow([f"{v:.6f}" for v in (
                s.t, s.pose.x, s.pose.y, s.pose.heading, s.error_in,
                s.command.vx, s.command.vy, s.command.omega, *s.wheel_volts)])


def setpoint_reached(samples, threshold_in: float = 1.0, v_negligible: float = 0.5,
                     dwell: float = 0.1) -> bool:
    """True iff the tail of ``samples`` stayed inside both bounds for ``dwell`` seconds.

    Samples need ``t``, ``error_in`` and ``speed`` attributes.
    """
    if not samples:
        return False
    last_t = samples[-1].t
    for s in reversed(samples):
        if s.error_in > threshold_in or s.speed > v_negligible:
            return False
        if last_t - s.t >= dwell - 1e-9:
            return True
    return False


def estimate_motion_time(path: Path, plant: PlantConfig) -> tuple[float, HolonomicProfiles | None]:
    """Profile-based motion time T, falling back to a triangular estimate."""
    try:
        prof = build_holonomic_profiles(path, plant.constraints)
    except DegeneratePath:
        return plant.loop_dt, None
    if isinstance(prof, TooShort):
        return max(triangular_time_estimate(path, plant.constraints), plant.loop_dt), None
    return max(prof.total_time, plant.loop_dt), prof


class TrialRunner:
    """One trial's mutable loop state."""

    def __init__(self, plan: RunPlan, plant: PlantConfig, seed: int | None = None):
        self.plan = plan
        self.config = plant
        self.path = plan.path
        self.goal = plan.path.end
        self.plant = Plant(plant, plan.path.start, seed)
        self.estimate = plan.path.start
        self.counts = self.plant.state.encoder_counts
        self.counters = {"profile_samples": 0, "pursuit_calls": 0}
        self.T, profiles = estimate_motion_time(plan.path, plant)
        self.profiles = profiles if plan.mode.uses_profile else None
        self.pursuit = PursuitState(plan.lookahead)
        self.axes = self._initial_axes()
        self._primed = False

    def _initial_axes(self) -> AxisStates:
        r = self.plan.heading_radius
        if self.plan.mode.uses_pursuit:
            ex, ey, eh = self.path.per_axis_travel()
            return make_axis_controllers_from_extent(ex, ey, eh, self.T, r)
        return make_axis_controllers(self.goal, self.path.start, self.T, r)

    def feedforward(self, t: float, heading: float) -> tuple[float, float, float]:
        if self.profiles is None:
            return 0.0, 0.0, 0.0
        self.counters["profile_samples"] += 1
        c = self.config.constraints
        prof = self.profiles
        s, v, a = prof.translational.sample(t)
        tx, ty = self.path.tangent_at(s)
        vx, vy = to_robot_frame(v * tx, v * ty, heading)
        ax, ay = to_robot_frame(a * tx, a * ty, heading)
        _, w, alpha = prof.angular.sample(t)
        w *= prof.rotation_sign
        alpha *= prof.rotation_sign
        return (
            vx / c.kv_x + ax / c.ka_x,
            vy / c.kv_y + ay / c.ka_y,
            w / c.kv_h + alpha / c.ka_h,
        )

    def target(self) -> Pose2D:
        if not self.plan.mode.uses_pursuit:
            return self.goal
        self.counters["pursuit_calls"] += 1
        target, self.pursuit = find_lookahead(self.path, self.estimate, self.pursuit)
        return target

    def feedback(self, target: Pose2D, dt: float) -> tuple[float, float, float]:
        est = self.estimate
        r = self.axes.heading_radius
        errs = (target.x - est.x, target.y - est.y, angle_diff(target.heading, est.heading) * r)
        states = (self.axes.x, self.axes.y, self.axes.heading)
        if not self._primed:
            # no derivative kick on the first tick
            states = tuple(replace(st, previous_error=st.normalize(e)) for st, e in zip(states, errs))
            self._primed = True
        if self.plan.per_update_denominators:
            states = tuple(replace(st, starting_error_scaled=scale_starting_error(abs(e)))
                           for st, e in zip(states, errs))
        gains = (self.plan.gains.translation, self.plan.gains.translation, self.plan.gains.heading)
        outs, new = [], []
        for g, st, e in zip(gains, states, errs):
            if self.plan.mode.is_pitdt:
                u, st2 = pitdt_step(g, st, e, dt)
            else:
                u, st2 = pid_step(g.kp, g.ki, g.kd, st, e, dt)
            outs.append(u)
            new.append(st2)
        self.axes = AxisStates(new[0], new[1], new[2], r)
        vb = self.config.constraints.v_battery
        fx, fy = to_robot_frame(outs[0] * vb, outs[1] * vb, est.heading)
        return fx, fy, outs[2] * vb

    def run(self) -> TrialRecord:
        plan, cfg = self.plan, self.config
        dt = cfg.loop_dt
        c = cfg.constraints
        crit = plan.criterion
        samples: list[Sample] = []
        streak_start: float | None = None
        outcome: Outcome | None = None
        speed = 0.0
        end_zone_slips = 0
        k = 0
        while True:
            t = k * dt
            est = self.estimate
            err = math.hypot(self.goal.x - est.x, self.goal.y - est.y)
            ff = self.feedforward(t, est.heading)
            target = self.target()
            fb = self.feedback(target, dt)
            total = tuple(a + b for a, b in zip(ff, fb))
            cmd = mix_chassis_volts(*total, cfg.mecanum, c.v_battery)
            samples.append(Sample(
                t, est, err, speed,
                Twist2D(total[0] * c.kv_x, total[1] * c.kv_y, total[2] * c.kv_h),
                cmd, ff, fb, self.plant.state.true_pose))

            if err <= crit.threshold_in and speed <= crit.v_negligible:
                if streak_start is None:
                    streak_start = t
                if t - streak_start >= crit.dwell - 1e-9:
                    outcome = Reached(streak_start)
                    break
            else:
                streak_start = None
            if t >= plan.timeout:
                outcome = Timeout(t)
                break

            before = self.plant.state.slip_events
            state = self.plant.step(cmd)
            if err <= plan.lookahead:
                end_zone_slips += state.slip_events - before
            delta = tuple(a - b for a, b in zip(state.encoder_counts, self.counts))
            self.counts = state.encoder_counts
            new_est = odometry_update(est, delta, cfg.odometry)
            speed = math.hypot(new_est.x - est.x, new_est.y - est.y) / dt
            self.estimate = new_est
            k += 1

        return TrialRecord(
            samples, outcome, plan.mode,
            slip_events=self.plant.state.slip_events,
            end_slip_events=end_zone_slips,
            profiled=self.profiles is not None,
            T=self.T,
            counters=dict(self.counters),
        )


def run_trial(plan: RunPlan, plant: PlantConfig, seed: int | None = None) -> TrialRecord:
    return TrialRunner(plan, plant, seed).run()
