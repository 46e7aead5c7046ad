"""Deterministic discrete-time plant for a mecanum robot.

Each chassis axis follows the affine motor model dv/dt = ka (V - v / kv),
integrated exactly over a step, then limited by a traction (slip) clamp on
acceleration and by the configured top speed. Noise is seeded Gaussian on
the realized velocity and on the encoder counts.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .geometry import Pose2D, Twist2D
from .mecanum import (
    MecanumGeometry,
    OdometryGeometry,
    WheelCommand,
    chassis_volts,
    mix_chassis_volts,
    module_travel,
)
from .profile import RobotConstraints

AXES = ("x", "y", "h")


class QuasiStaticViolation(UserWarning):
    pass


class NoSteadyState(RuntimeError):
    pass


@dataclass(frozen=True)
class PlantConfig:
    constraints: RobotConstraints
    mecanum: MecanumGeometry = field(default_factory=MecanumGeometry)
    odometry: OdometryGeometry = field(default_factory=OdometryGeometry)
    slip_accel_limit: float = 220.0
    noise_seed: int = 0
    velocity_noise_sd: float = 0.0
    encoder_noise_sd: float = 0.0
    loop_dt: float = 0.02
    # transport delay between computing a command and the motors seeing it (s)
    command_delay: float = 0.0

    def __post_init__(self):
        if not self.loop_dt > 0:
            raise ValueError("loop_dt must be positive")
        if not (math.isfinite(self.command_delay) and self.command_delay >= 0):
            raise ValueError("command_delay must be finite and non-negative")
        if self.velocity_noise_sd < 0 or self.encoder_noise_sd < 0:
            raise ValueError("noise parameters must be non-negative")
        if not self.slip_accel_limit > 0:
            raise ValueError("slip_accel_limit must be positive")

    def axis_slip_limit(self, axis: str) -> float:
        # heading traction limit: wheel tangential accel = alpha * lever
        return self.slip_accel_limit / self.mecanum.lever if axis == "h" else self.slip_accel_limit

    def axis_speed_limit(self, axis: str) -> float:
        c = self.constraints
        return min(getattr(c, f"v_max_{axis}"), c.kv(axis) * c.v_battery)

    def without_noise(self) -> PlantConfig:
        return replace(self, velocity_noise_sd=0.0, encoder_noise_sd=0.0)


@dataclass(frozen=True)
class PlantState:
    true_pose: Pose2D = Pose2D()
    true_twist: Twist2D = Twist2D()
    encoder_counts: tuple[int, int, int] = (0, 0, 0)
    sim_time: float = 0.0
    encoder_raw: tuple[float, float, float] = (0.0, 0.0, 0.0)
    slip_events: int = 0
    last_acceleration: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @classmethod
    def at(cls, pose: Pose2D) -> PlantState:
        return cls(true_pose=pose)


def plant_step(state: PlantState, command: WheelCommand, config: PlantConfig,
               rng: np.random.Generator | None = None) -> PlantState:
    """Advance the plant by one ``config.loop_dt``.

    ``rng`` is required whenever a noise level is non-zero.
    """
    dt = config.loop_dt
    c = config.constraints
    volts = chassis_volts(command, config.mecanum)
    v_now = (state.true_twist.vx, state.true_twist.vy, state.true_twist.omega)
    noisy = config.velocity_noise_sd > 0
    v_next = []
    accels = []
    slips = 0
    for axis, v, volt in zip(AXES, v_now, volts):
        kv, ka = c.kv(axis), c.ka(axis)
        v_ss = kv * volt
        target = v_ss + (v - v_ss) * math.exp(-ka / kv * dt)
        if noisy:
            target *= 1.0 + config.velocity_noise_sd * rng.standard_normal()
        accel = (target - v) / dt
        limit = config.axis_slip_limit(axis)
        if abs(accel) > limit:
            accel = math.copysign(limit, accel)
            slips += 1
        cap = config.axis_speed_limit(axis)
        v_new = max(-cap, min(cap, v + accel * dt))
        accels.append((v_new - v) / dt)
        v_next.append(v_new)

    # constant-twist (average) motion over the step
    dx, dy, dth = ((a + b) * 0.5 * dt for a, b in zip(v_now, v_next))
    pose = state.true_pose.exp(dx, dy, dth)

    cpi = config.odometry.counts_per_inch
    travel = module_travel(dx, dy, dth, config.odometry)
    raw = []
    for r, s in zip(state.encoder_raw, travel):
        inc = s * cpi
        if config.encoder_noise_sd > 0:
            inc += config.encoder_noise_sd * rng.standard_normal()
        raw.append(r + inc)
    return PlantState(
        true_pose=pose,
        true_twist=Twist2D(*v_next),
        encoder_counts=tuple(int(round(r)) for r in raw),
        sim_time=state.sim_time + dt,
        encoder_raw=tuple(raw),
        slip_events=state.slip_events + slips,
        last_acceleration=tuple(accels),
    )


class Plant:
    """A plant state, the run's private random stream and the delayed command line."""

    def __init__(self, config: PlantConfig, start: Pose2D = Pose2D(), seed: int | None = None):
        self.config = config
        self.rng = np.random.default_rng(config.noise_seed if seed is None else seed)
        self.state = PlantState.at(start)
        ticks = config.command_delay / config.loop_dt
        self._lag = int(math.floor(ticks + 1e-9))
        self._frac = max(ticks - self._lag, 0.0) if ticks - self._lag > 1e-9 else 0.0
        idle = WheelCommand(0.0, 0.0, 0.0, 0.0)
        self._history = deque([idle] * (self._lag + 1), maxlen=self._lag + 2)

    def applied(self, command: WheelCommand) -> WheelCommand:
        """Mean voltage the motors see over the coming step.

        Commands are held for a whole tick, so with a delay of n + r ticks the
        step sees the command from n ticks ago for (1 - r) of its length and
        the one from n + 1 ticks ago for the rest.
        """
        self._history.append(command)
        newer = self._history[-1 - self._lag]
        if self._frac == 0.0:
            return newer
        older = self._history[-2 - self._lag]
        r = self._frac
        return WheelCommand(*((1.0 - r) * a + r * b for a, b in zip(newer, older)))

    def step(self, command: WheelCommand) -> PlantState:
        self.state = plant_step(self.state, self.applied(command), self.config, self.rng)
        return self.state


def axis_command(config: PlantConfig, axis: str, volts: float) -> WheelCommand:
    vx = volts if axis == "x" else 0.0
    vy = volts if axis == "y" else 0.0
    vh = volts if axis == "h" else 0.0
    return mix_chassis_volts(vx, vy, vh, config.mecanum, config.constraints.v_battery)


def _axis_velocity(state: PlantState, axis: str) -> float:
    tw = state.true_twist
    return {"x": tw.vx, "y": tw.vy, "h": tw.omega}[axis]


@dataclass(frozen=True)
class SysIdResult:
    axis: str
    value: float
    warnings: tuple[Warning, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.warnings and math.isfinite(self.value)


def time_constant(config: PlantConfig, axis: str) -> float:
    c = config.constraints
    return c.kv(axis) / c.ka(axis)


def sysid_kv(config: PlantConfig, axis: str, ramp_duration: float = 20.0,
             ramp_fraction: float = 0.8, seed: int | None = None,
             quasi_static_factor: float = 50.0) -> SysIdResult:
    """Quasi-static voltage ramp; slope of velocity against voltage.

    The ramp is quasi-static when it lasts at least ``quasi_static_factor``
    plant time constants. The first fifth of the ramp is discarded as
    start-up transient.
    """
    tau = time_constant(config, axis)
    warns: list[Warning] = []
    if ramp_duration < quasi_static_factor * tau:
        warns.append(QuasiStaticViolation(
            f"ramp of {ramp_duration:g} s is shorter than {quasi_static_factor:g} time constants "
            f"({quasi_static_factor * tau:g} s)"))
    steps = int(ramp_duration / config.loop_dt)
    if steps < 10:
        return SysIdResult(axis, float("nan"), tuple(warns))
    plant = Plant(config, seed=seed)
    v_end = ramp_fraction * config.constraints.v_battery
    volts, vels = [], []
    for k in range(1, steps + 1):
        volt = v_end * k / steps
        plant.step(axis_command(config, axis, volt))
        volts.append(volt)
        vels.append(_axis_velocity(plant.state, axis))
    skip = steps // 5
    slope, _ = np.polyfit(np.array(volts[skip:]), np.array(vels[skip:]), 1)
    return SysIdResult(axis, float(slope), tuple(warns))


def sysid_vmax(config: PlantConfig, axis: str, tolerance: float | None = None,
               dwell: float = 0.5, timeout: float = 30.0, seed: int | None = None) -> SysIdResult:
    """Full battery voltage until the velocity settles; returns the settled speed."""
    c = config.constraints
    if tolerance is None:
        tolerance = 1e-4 * c.kv(axis) * c.v_battery
    plant = Plant(config, seed=seed)
    cmd = axis_command(config, axis, c.v_battery)
    need = max(1, int(round(dwell / config.loop_dt)))
    quiet = 0
    window: list[float] = []
    prev = 0.0
    while plant.state.sim_time < timeout:
        plant.step(cmd)
        v = _axis_velocity(plant.state, axis)
        if abs(v - prev) < tolerance:
            quiet += 1
            window.append(v)
            if quiet >= need:
                return SysIdResult(axis, float(np.mean(window[-need:])))
        else:
            quiet = 0
            window.clear()
        prev = v
    raise NoSteadyState(f"{axis} velocity did not settle within {timeout:g} s")


def run_open_loop(config: PlantConfig, commands: Sequence[WheelCommand],
                  start: Pose2D = Pose2D(), seed: int | None = None) -> list[PlantState]:
    plant = Plant(config, start, seed)
    return [plant.step(cmd) for cmd in commands]
