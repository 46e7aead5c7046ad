"""Holonomic seven-segment (jerk-limited) motion profiling.

Translation and rotation get one profile each. Before building them the
battery voltage is split between the two degrees of freedom in proportion to
the path's length and rotation, so that both can finish together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .geometry import Path, angle_diff, total_displacement


class InvalidConstraint(ValueError):
    pass


class DegeneratePath(ValueError):
    pass


@dataclass(frozen=True)
class RobotConstraints:
    kv_x: float
    kv_y: float
    kv_h: float
    ka_x: float
    ka_y: float
    ka_h: float
    v_max_x: float
    v_max_y: float
    v_max_h: float
    a_max_x: float
    a_max_y: float
    a_max_h: float
    j_max_x: float
    j_max_y: float
    j_max_h: float
    v_battery: float = 12.0

    def __post_init__(self):
        for name, val in vars(self).items():
            if not (math.isfinite(val) and val > 0):
                raise InvalidConstraint(f"{name} must be positive and finite, got {val!r}")
        for axis in "xyh":
            top = getattr(self, f"kv_{axis}") * self.v_battery
            if getattr(self, f"v_max_{axis}") > top * (1 + 1e-12):
                raise InvalidConstraint(
                    f"v_max_{axis} exceeds kv_{axis} * v_battery = {top:g}"
                )

    def kv(self, axis: str) -> float:
        return getattr(self, f"kv_{axis}")

    def ka(self, axis: str) -> float:
        return getattr(self, f"ka_{axis}")


def ellipse_interp(along_x: float, along_y: float, direction: float) -> float:
    """Radius of the axis-aligned ellipse with semi-axes (along_x, along_y) at ``direction``.

    ``direction`` is measured from the robot's x axis.
    """
    c, s = math.cos(direction), math.sin(direction)
    return 1.0 / math.hypot(c / along_x, s / along_y)


@dataclass(frozen=True)
class TooShort:
    """Returned (not raised) when a move cannot reach cruise velocity."""

    distance: float
    min_distance: float


class Segment(NamedTuple):
    duration: float
    jerk: float


@dataclass(frozen=True)
class MotionProfile:
    segments: tuple[Segment, ...]
    total_distance: float
    # (t_start, pos, vel, acc) at the start of each segment, plus the end state
    _knots: tuple[tuple[float, float, float, float], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        segs = tuple(Segment(float(d), float(j)) for d, j in self.segments)
        if len(segs) != 7:
            raise ValueError(f"a motion profile has exactly 7 segments, got {len(segs)}")
        if any(s.duration < 0 for s in segs):
            raise ValueError("segment durations must be non-negative")
        t = p = v = a = 0.0
        knots = []
        for dur, j in segs:
            knots.append((t, p, v, a))
            p, v, a = _advance(p, v, a, j, dur)
            t += dur
        knots.append((t, p, v, a))
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_knots", tuple(knots))

    @classmethod
    def zero(cls) -> MotionProfile:
        return cls(tuple(Segment(0.0, 0.0) for _ in range(7)), 0.0)

    @property
    def total_time(self) -> float:
        return self._knots[-1][0]

    @property
    def is_zero(self) -> bool:
        return self.total_time == 0.0

    @property
    def peak_velocity(self) -> float:
        return self._knots[3][2]

    @property
    def peak_acceleration(self) -> float:
        return self._knots[1][3]

    @property
    def jerk_magnitude(self) -> float:
        return abs(self.segments[0].jerk)

    def jerk_at(self, t: float) -> float:
        if self.is_zero:
            return 0.0
        t = min(max(t, 0.0), self.total_time)
        for k, (dur, j) in enumerate(self.segments):
            if dur > 0 and t < self._knots[k + 1][0]:
                return j
        return 0.0

    def sample(self, t: float) -> tuple[float, float, float]:
        return sample(self, t)


def _advance(p: float, v: float, a: float, j: float, dt: float) -> tuple[float, float, float]:
    return (
        p + v * dt + a * dt * dt / 2.0 + j * dt ** 3 / 6.0,
        v + a * dt + j * dt * dt / 2.0,
        a + j * dt,
    )


def sample(profile: MotionProfile, t: float) -> tuple[float, float, float]:
    """Position, velocity and acceleration at time ``t`` (clamped)."""
    if not math.isfinite(t):
        raise ValueError(f"non-finite sample time {t!r}")
    knots = profile._knots
    if t <= 0.0 or profile.is_zero:
        return 0.0, 0.0, 0.0
    if t >= knots[-1][0]:
        return profile.total_distance, 0.0, 0.0
    k = 6
    while k > 0 and knots[k][0] > t:
        k -= 1
    t0, p, v, a = knots[k]
    return _advance(p, v, a, profile.segments[k].jerk, t - t0)


def ramp_timing(v_max: float, a_max: float, j_max: float) -> tuple[float, float, float]:
    """(jerk-phase time, constant-accel time, peak accel) to go from rest to ``v_max``."""
    if a_max * a_max / j_max > v_max:
        a_peak = math.sqrt(v_max * j_max)
        return a_peak / j_max, 0.0, a_peak
    t_jerk = a_max / j_max
    return t_jerk, v_max / a_max - t_jerk, a_max


def min_distance(v_max: float, a_max: float, j_max: float) -> float:
    """Shortest move that still reaches ``v_max`` and returns to rest."""
    t_jerk, t_acc, _ = ramp_timing(v_max, a_max, j_max)
    # the ramp's mean velocity is v_max/2 by symmetry; up and down ramps
    return v_max * (2.0 * t_jerk + t_acc)


def build_profile(
    distance: float, v_max: float, a_max: float, j_max: float
) -> Union[MotionProfile, TooShort]:
    for name, val in (("distance", distance), ("v_max", v_max), ("a_max", a_max), ("j_max", j_max)):
        if not (math.isfinite(val) and val > 0):
            raise InvalidConstraint(f"{name} must be positive and finite, got {val!r}")
    d_min = min_distance(v_max, a_max, j_max)
    if distance < d_min:
        return TooShort(distance, d_min)
    t_jerk, t_acc, a_peak = ramp_timing(v_max, a_max, j_max)
    t_cruise = (distance - d_min) / v_max
    j = a_peak / t_jerk
    segs = (
        Segment(t_jerk, j),
        Segment(t_acc, 0.0),
        Segment(t_jerk, -j),
        Segment(t_cruise, 0.0),
        Segment(t_jerk, -j),
        Segment(t_acc, 0.0),
        Segment(t_jerk, j),
    )
    return MotionProfile(segs, distance)


def profile_duration(distance: float, v_max: float, a_max: float, j_max: float) -> float:
    t_jerk, t_acc, _ = ramp_timing(v_max, a_max, j_max)
    return 4.0 * t_jerk + 2.0 * t_acc + (distance - min_distance(v_max, a_max, j_max)) / v_max


@dataclass(frozen=True)
class AllocatedLimits:
    v_linear_eff: float
    v_h_eff: float
    travel_direction_kv: float


def allocate_power(
    constraints: RobotConstraints, delta_x: float, delta_h: float, dominant_direction: float
) -> AllocatedLimits:
    """Split the battery voltage between translation and rotation.

    Translation and rotation should take equal time at cruise, so
    v / v_ang = delta_x / delta_h; with v = kv_lin * V_t, v_ang = kv_h * V_r and
    V_t + V_r = v_battery the split is linear.
    """
    if delta_x < 0 or delta_h < 0:
        raise ValueError("displacements must be non-negative")
    if delta_x == 0 and delta_h == 0:
        raise DegeneratePath("path has neither translation nor rotation")
    c = constraints
    kv_lin = ellipse_interp(c.kv_x, c.kv_y, dominant_direction)
    v_lin_cap = ellipse_interp(c.v_max_x, c.v_max_y, dominant_direction)
    if delta_h == 0 or delta_x == 0:
        return AllocatedLimits(v_lin_cap, c.v_max_h, kv_lin)
    ratio = delta_x / delta_h
    v_ang = c.v_battery / (ratio / kv_lin + 1.0 / c.kv_h)
    v = ratio * v_ang
    return AllocatedLimits(min(v, v_lin_cap), min(v_ang, c.v_max_h), kv_lin)


@dataclass(frozen=True)
class HolonomicProfiles:
    translational: MotionProfile
    angular: MotionProfile
    total_time: float
    rotation_sign: float
    dominant_direction: float
    limits: AllocatedLimits


def dominant_direction(path: Path) -> float:
    """Bearing of the net displacement, relative to the starting heading."""
    dx, dy = path.end.x - path.start.x, path.end.y - path.start.y
    if math.hypot(dx, dy) <= 1e-12:
        tx, ty = path.tangent_at(0.0)
        dx, dy = tx, ty
    if dx == 0 and dy == 0:
        return 0.0
    return angle_diff(math.atan2(dy, dx), path.start.heading)


def _linear_limits(c: RobotConstraints, direction: float) -> tuple[float, float]:
    return (
        ellipse_interp(c.a_max_x, c.a_max_y, direction),
        ellipse_interp(c.j_max_x, c.j_max_y, direction),
    )


def _sync(distance: float, v_max: float, a_max: float, j_max: float, target_time: float,
          tol: float = 1e-7) -> MotionProfile:
    """Rebuild with a lower cruise velocity so the profile lasts ``target_time``."""
    lo, hi = 0.0, v_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= 0:
            break
        if profile_duration(distance, mid, a_max, j_max) > target_time:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * v_max:
            break
    prof = build_profile(distance, hi, a_max, j_max)
    assert isinstance(prof, MotionProfile)
    if abs(prof.total_time - target_time) > tol:
        raise RuntimeError(f"profile sync missed by {prof.total_time - target_time:g} s")
    return prof


def build_holonomic_profiles(
    path: Path, constraints: RobotConstraints
) -> Union[HolonomicProfiles, TooShort]:
    disp = total_displacement(path)
    direction = dominant_direction(path)
    limits = allocate_power(constraints, disp.delta_x, disp.delta_h, direction)
    a_lin, j_lin = _linear_limits(constraints, direction)
    c = constraints
    sign = math.copysign(1.0, disp.signed_delta_h) if disp.delta_h > 0 else 0.0

    trans = MotionProfile.zero()
    ang = MotionProfile.zero()
    if disp.delta_x > 0:
        trans = build_profile(disp.delta_x, limits.v_linear_eff, a_lin, j_lin)
        if isinstance(trans, TooShort):
            return trans
    if disp.delta_h > 0:
        ang = build_profile(disp.delta_h, limits.v_h_eff, c.a_max_h, c.j_max_h)
        if isinstance(ang, TooShort):
            return ang

    if not trans.is_zero and not ang.is_zero:
        if trans.total_time < ang.total_time:
            trans = _sync(disp.delta_x, limits.v_linear_eff, a_lin, j_lin, ang.total_time)
        elif ang.total_time < trans.total_time:
            ang = _sync(disp.delta_h, limits.v_h_eff, c.a_max_h, c.j_max_h, trans.total_time)
    total = max(trans.total_time, ang.total_time)
    return HolonomicProfiles(trans, ang, total, sign, direction, limits)


def triangular_time_estimate(path: Path, constraints: RobotConstraints) -> float:
    """Fallback motion-time estimate for moves too short to profile.

    Per axis T = 2 sqrt(distance / a_max); the largest axis wins.
    """
    disp = total_displacement(path)
    direction = dominant_direction(path)
    a_lin, _ = _linear_limits(constraints, direction)
    times = [2.0 * math.sqrt(disp.delta_x / a_lin), 2.0 * math.sqrt(disp.delta_h / constraints.a_max_h)]
    return max(times)
