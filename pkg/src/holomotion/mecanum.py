"""Mecanum drive kinematics and three-module odometry.

Robot frame: +x to the right, +y forward, omega counter-clockwise. Wheel order
is front-left, front-right, back-left, back-right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .geometry import Pose2D, Twist2D


@dataclass(frozen=True)
class MecanumGeometry:
    half_length: float = 7.0
    half_width: float = 7.5
    wheel_radius: float = 2.0
    kv_wheel: float = 4.5

    def __post_init__(self):
        for name, val in vars(self).items():
            if not val > 0:
                raise ValueError(f"{name} must be positive, got {val!r}")

    @property
    def lever(self) -> float:
        """Rotational lever arm l_x + l_y of the standard mecanum matrix."""
        return self.half_length + self.half_width


class WheelCommand(NamedTuple):
    v_fl: float
    v_fr: float
    v_bl: float
    v_br: float

    def peak(self) -> float:
        return max(abs(v) for v in self)


def desaturate(cmd: WheelCommand, v_battery: float) -> WheelCommand:
    """Scale all four wheels together so none exceeds the battery voltage."""
    peak = cmd.peak()
    if peak <= v_battery:
        return cmd
    k = v_battery / peak
    return WheelCommand(*(v * k for v in cmd))


def inverse_kinematics(twist: Twist2D, geom: MecanumGeometry,
                       v_battery: float | None = None) -> WheelCommand:
    """Wheel voltages for a robot-frame twist, desaturated when a battery limit is given."""
    k = geom.lever * twist.omega
    speeds = (
        twist.vy + twist.vx - k,
        twist.vy - twist.vx + k,
        twist.vy - twist.vx - k,
        twist.vy + twist.vx + k,
    )
    cmd = WheelCommand(*(s / geom.kv_wheel for s in speeds))
    return cmd if v_battery is None else desaturate(cmd, v_battery)


def forward_kinematics(wheels: WheelCommand, geom: MecanumGeometry) -> Twist2D:
    """Least-squares robot twist for four wheel voltages (steady-state speeds kv_wheel * V)."""
    fl, fr, bl, br = (v * geom.kv_wheel for v in wheels)
    return Twist2D(
        (fl - fr - bl + br) / 4.0,
        (fl + fr + bl + br) / 4.0,
        (-fl + fr - bl + br) / (4.0 * geom.lever),
    )


def mix_chassis_volts(vx: float, vy: float, vh: float, geom: MecanumGeometry,
                      v_battery: float) -> WheelCommand:
    """Per-axis chassis voltages to wheel voltages (wheel = vy +/- vx +/- vh)."""
    kvw = geom.kv_wheel
    return inverse_kinematics(Twist2D(vx * kvw, vy * kvw, vh * kvw / geom.lever), geom, v_battery)


def chassis_volts(wheels: WheelCommand, geom: MecanumGeometry) -> tuple[float, float, float]:
    """Inverse of :func:`mix_chassis_volts` without desaturation."""
    tw = forward_kinematics(wheels, geom)
    kvw = geom.kv_wheel
    return tw.vx / kvw, tw.vy / kvw, tw.omega * geom.lever / kvw


@dataclass(frozen=True)
class OdometryGeometry:
    """Dead-wheel layout.

    ``back_offset`` is the distance of the x-facing module behind the centre
    (positive toward the back).
    """

    track_half_width: float = 7.0
    back_offset: float = 6.0
    counts_per_inch: float = 1900.0

    def __post_init__(self):
        if not self.track_half_width > 0:
            raise ValueError("track_half_width must be positive")
        if not self.counts_per_inch > 0:
            raise ValueError("counts_per_inch must be positive")


def module_travel(dx: float, dy: float, dtheta: float,
                  geom: OdometryGeometry) -> tuple[float, float, float]:
    """Ground-truth (left, right, back) module travel for a constant-twist step."""
    b = geom.track_half_width
    return dy - b * dtheta, dy + b * dtheta, dx + geom.back_offset * dtheta


def odometry_update(pose: Pose2D, delta_counts: tuple[float, float, float],
                    geom: OdometryGeometry) -> Pose2D:
    left, right, back = (c / geom.counts_per_inch for c in delta_counts)
    dtheta = (right - left) / (2.0 * geom.track_half_width)
    dy = (right + left) / 2.0
    dx = back - geom.back_offset * dtheta
    return pose.exp(dx, dy, dtheta)
