"""PI(t)D(t) axis controller, starting-error scaling, and the baseline PID.

Both controllers work on a *normalized* error: the raw axis error divided by
the (scaled) error the axis started with. Outputs are fractions of full
power in [-1, 1].

Two deliberate readings of the control law live here:

* the proportional ramp factor is capped with ``min(..., 1.0)``; a ``max``
  against 1.0 could never keep the output under full power;
* the integral is square-rooted and the derivative *divided* by the time
  factor ``(t/T + 1)**4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import Pose2D, angle_diff

SCALE_KNEE = 8.5


class InvalidError(ValueError):
    pass


class InvalidTimestep(ValueError):
    pass


class InvalidState(ValueError):
    pass


def scale_starting_error(x: float) -> float:
    """Inflate small starting errors so normalized errors stay bounded.

    Below 8.5 in the offset decays as 5 / (0.6 (x + 0.9) + 1); above it is a
    flat 0.746. The two branches disagree by ~0.007 at the knee.
    """
    if x < 0:
        raise InvalidError(f"starting error must be non-negative, got {x!r}")
    if x < SCALE_KNEE:
        return x + 5.0 / (0.6 * (x + 0.9) + 1.0)
    return x + 0.746


@dataclass(frozen=True)
class ControllerGains:
    kp: float
    ki: float
    kd: float
    u0: float = 1.0
    a_rampup: float = 0.0

    def __post_init__(self):
        if min(self.kp, self.ki, self.kd) < 0:
            raise ValueError("gains must be non-negative")
        if not 0 < self.u0 <= 1:
            raise ValueError(f"start power u0 must lie in (0, 1], got {self.u0}")
        if self.a_rampup < 0:
            raise ValueError("ramp-up must be non-negative")


@dataclass(frozen=True)
class ControllerState:
    T: float
    starting_error_scaled: float
    t: float = 0.0
    integral_accumulator: float = 0.0
    previous_error: float = 0.0
    last_output: float = 0.0

    @classmethod
    def start(cls, raw_starting_error: float, T: float, initial_error: float | None = None) -> ControllerState:
        """Fresh state; ``initial_error`` (raw, signed) seeds the derivative history."""
        scaled = scale_starting_error(abs(raw_starting_error))
        prev = 0.0 if initial_error is None else initial_error / scaled
        return cls(T=T, starting_error_scaled=scaled, previous_error=prev)

    def normalize(self, raw_error: float) -> float:
        return raw_error / self.starting_error_scaled


def _check(state: ControllerState, dt: float) -> None:
    if not dt > 0:
        raise InvalidTimestep(f"dt must be positive, got {dt!r}")
    if not state.T > 0:
        raise InvalidState(f"estimated motion time T must be positive, got {state.T!r}")


def _clamp(u: float) -> float:
    return max(-1.0, min(1.0, u))


def ramp_factor(gains: ControllerGains, e: float) -> float:
    """Proportional power cap: starts at u0 and rises with progress, never above 1."""
    return min(gains.u0 + gains.a_rampup * max(0.0, 1.0 - e), 1.0)


def pitdt_terms(gains: ControllerGains, state: ControllerState, current_error: float,
                dt: float) -> tuple[float, float, float, float]:
    """(u_p, u_i, u_d, updated accumulator) for one step, before clamping.

    Terms carry the sign of the error; for a non-negative error history they
    equal the textbook magnitudes.
    """
    _check(state, dt)
    e = state.normalize(current_error)
    mag = abs(e)
    time_factor = state.t / state.T + 1.0

    u_p = gains.kp * ramp_factor(gains, mag) * e

    acc = state.integral_accumulator
    if abs(state.last_output) < 1.0:
        acc += e * dt
    u_i = gains.ki * math.copysign(math.sqrt(abs(acc)), acc) * time_factor

    u_d = gains.kd * ((e - state.previous_error) / dt) / time_factor ** 4
    return u_p, u_i, u_d, acc


def pitdt_step(gains: ControllerGains, state: ControllerState, current_error: float,
               dt: float) -> tuple[float, ControllerState]:
    u_p, u_i, u_d, acc = pitdt_terms(gains, state, current_error, dt)
    out = _clamp(u_p + u_i + u_d)
    return out, replace(
        state,
        t=state.t + dt,
        integral_accumulator=acc,
        previous_error=state.normalize(current_error),
        last_output=out,
    )


def pid_step(kp: float, ki: float, kd: float, state: ControllerState, current_error: float,
             dt: float) -> tuple[float, ControllerState]:
    """Parallel-form PID on the normalized error with a clamped integral."""
    _check(state, dt)
    e = state.normalize(current_error)
    acc = state.integral_accumulator + e * dt
    if ki > 0:
        limit = 1.0 / ki
        acc = max(-limit, min(limit, acc))
    out = _clamp(kp * e + ki * acc + kd * (e - state.previous_error) / dt)
    return out, replace(state, t=state.t + dt, integral_accumulator=acc, previous_error=e, last_output=out)


@dataclass(frozen=True)
class AxisStates:
    x: ControllerState
    y: ControllerState
    heading: ControllerState
    heading_radius: float


def make_axis_controllers(target: Pose2D, start: Pose2D, T: float,
                          heading_radius: float) -> AxisStates:
    """One controller state per axis, normalized by that axis' starting error.

    Heading errors are measured as arc length at ``heading_radius`` inches so
    the inch-based scaling applies to them too.
    """
    if not T > 0:
        raise InvalidState(f"T must be positive, got {T!r}")
    return make_axis_controllers_from_extent(
        abs(target.x - start.x),
        abs(target.y - start.y),
        abs(angle_diff(target.heading, start.heading)),
        T,
        heading_radius,
        initial=(target.x - start.x, target.y - start.y, angle_diff(target.heading, start.heading)),
    )


def make_axis_controllers_from_extent(ex: float, ey: float, eh: float, T: float,
                                      heading_radius: float,
                                      initial: tuple[float, float, float] | None = None) -> AxisStates:
    if not T > 0:
        raise InvalidState(f"T must be positive, got {T!r}")
    ix = iy = ih = None
    if initial is not None:
        ix, iy, ih = initial[0], initial[1], initial[2] * heading_radius
    return AxisStates(
        ControllerState.start(ex, T, ix),
        ControllerState.start(ey, T, iy),
        ControllerState.start(eh * heading_radius, T, ih),
        heading_radius,
    )
