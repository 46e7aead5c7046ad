"""Planar poses, twists and polyline paths.

Units are inches, seconds and radians everywhere in the core. Field frame is
right-handed; a pose's heading is the field angle of the robot's x axis, and
the robot drives "forward" along its own +y axis.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import NamedTuple, Sequence

import numpy as np

COINCIDENT_TOL = 1e-9


class PathError(ValueError):
    """Raised when a waypoint list violates the path invariants.

    ``index`` is the waypoint index of the first violation (or None).
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"waypoint {index}: {message}")
        self.index = index


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    assert math.isfinite(theta), f"non-finite angle {theta!r}"
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def angle_diff(a: float, b: float) -> float:
    """Shortest signed rotation taking heading ``b`` to heading ``a``."""
    return wrap_angle(a - b)


@dataclass(frozen=True)
class Pose2D:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite pose position ({self.x}, {self.y})")
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))

    def distance_to(self, other: Pose2D) -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def exp(self, dx: float, dy: float, dtheta: float) -> Pose2D:
        """Advance by a robot-frame displacement travelled at constant twist.

        ``dx``/``dy`` are the robot-frame arc displacements (velocity * dt) and
        ``dtheta`` the heading change over the same interval.
        """
        if abs(dtheta) < 1e-9:
            # second-order series of sin(t)/t and (1 - cos t)/t
            s = 1.0 - dtheta * dtheta / 6.0
            c = 0.5 * dtheta
        else:
            s = math.sin(dtheta) / dtheta
            c = (1.0 - math.cos(dtheta)) / dtheta
        lx = s * dx - c * dy
        ly = c * dx + s * dy
        cos_h, sin_h = math.cos(self.heading), math.sin(self.heading)
        return Pose2D(
            self.x + cos_h * lx - sin_h * ly,
            self.y + sin_h * lx + cos_h * ly,
            self.heading + dtheta,
        )


@dataclass(frozen=True)
class Twist2D:
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.vx, self.vy, self.omega)):
            raise ValueError(f"non-finite twist {self!r}")

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    def scaled(self, k: float) -> Twist2D:
        return Twist2D(self.vx * k, self.vy * k, self.omega * k)


def to_robot_frame(fx: float, fy: float, heading: float) -> tuple[float, float]:
    c, s = math.cos(heading), math.sin(heading)
    return c * fx + s * fy, -s * fx + c * fy


def to_field_frame(rx: float, ry: float, heading: float) -> tuple[float, float]:
    c, s = math.cos(heading), math.sin(heading)
    return c * rx - s * ry, s * rx + c * ry


class Displacement(NamedTuple):
    delta_x: float
    delta_h: float
    signed_delta_h: float


class ClosestPoint(NamedTuple):
    arc_length: float
    x: float
    y: float
    distance: float


@dataclass(frozen=True)
class Path:
    waypoints: tuple[Pose2D, ...]
    cumulative_arc_length: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        wps = tuple(self.waypoints)
        if len(wps) < 2:
            raise PathError("a path needs at least two waypoints")
        cum = [0.0]
        for i in range(1, len(wps)):
            seg = wps[i - 1].distance_to(wps[i])
            if seg <= COINCIDENT_TOL and wps[i].heading == wps[i - 1].heading:
                raise PathError("coincident with previous waypoint", i)
            cum.append(cum[-1] + seg)
        object.__setattr__(self, "waypoints", wps)
        object.__setattr__(self, "cumulative_arc_length", tuple(cum))
        object.__setattr__(self, "_xy", np.array([[p.x, p.y] for p in wps]))

    @classmethod
    def from_points(cls, points: Sequence[tuple[float, float, float]]) -> Path:
        return cls(tuple(Pose2D(*p) for p in points))

    @property
    def length(self) -> float:
        return self.cumulative_arc_length[-1]

    @property
    def start(self) -> Pose2D:
        return self.waypoints[0]

    @property
    def end(self) -> Pose2D:
        return self.waypoints[-1]

    @property
    def xy(self) -> np.ndarray:
        return self._xy

    def reversed(self) -> Path:
        return Path(self.waypoints[::-1])

    def concat(self, other: Path) -> Path:
        """Join two paths; a shared junction waypoint is kept once."""
        tail = other.waypoints
        if tail[0] == self.waypoints[-1]:
            tail = tail[1:]
        return Path(self.waypoints + tail)

    def segment_headings(self) -> list[float]:
        return [angle_diff(b.heading, a.heading) for a, b in zip(self.waypoints, self.waypoints[1:])]

    def per_axis_travel(self) -> tuple[float, float, float]:
        """Summed absolute x, y and heading change over all segments."""
        d = np.abs(np.diff(self._xy, axis=0)).sum(axis=0)
        return float(d[0]), float(d[1]), sum(abs(h) for h in self.segment_headings())

    def _locate(self, s: float) -> tuple[int, float]:
        cum = self.cumulative_arc_length
        i = bisect.bisect_right(cum, s) - 1
        i = min(max(i, 0), len(cum) - 2)
        # skip zero-length (rotate-in-place) segments ending at s
        while i < len(cum) - 2 and cum[i + 1] - cum[i] <= COINCIDENT_TOL and cum[i + 1] <= s:
            i += 1
        seg = cum[i + 1] - cum[i]
        frac = 0.0 if seg <= COINCIDENT_TOL else (s - cum[i]) / seg
        return i, min(max(frac, 0.0), 1.0)

    def tangent_at(self, s: float) -> tuple[float, float]:
        """Unit direction of travel (field frame) at arc length ``s``."""
        s = min(max(s, 0.0), self.length)
        i, _ = self._locate(s)
        cum = self.cumulative_arc_length
        # pick the nearest segment that actually translates
        for j in list(range(i, len(cum) - 1)) + list(range(i - 1, -1, -1)):
            seg = cum[j + 1] - cum[j]
            if seg > COINCIDENT_TOL:
                d = self._xy[j + 1] - self._xy[j]
                return float(d[0] / seg), float(d[1] / seg)
        return 0.0, 0.0

    def closest_point(self, x: float, y: float) -> ClosestPoint:
        """Closest point of the polyline to (x, y); ties resolve to the lowest arc length."""
        a = self._xy[:-1]
        d = self._xy[1:] - a
        seg_len2 = np.einsum("ij,ij->i", d, d)
        p = np.array([x, y])
        with np.errstate(invalid="ignore", divide="ignore"):
            u = np.einsum("ij,ij->i", p - a, d) / seg_len2
        u = np.where(seg_len2 > 0, np.clip(u, 0.0, 1.0), 0.0)
        proj = a + u[:, None] * d
        dist = np.hypot(proj[:, 0] - x, proj[:, 1] - y)
        k = int(np.argmin(dist))
        s = self.cumulative_arc_length[k] + float(u[k]) * math.sqrt(float(seg_len2[k]))
        return ClosestPoint(min(s, self.length), float(proj[k, 0]), float(proj[k, 1]), float(dist[k]))

    def distances_to(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized XY distance from each row of ``pts`` to the polyline."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        a = self._xy[:-1]
        d = self._xy[1:] - a
        seg_len2 = np.einsum("ij,ij->i", d, d)
        safe = np.where(seg_len2 > 0, seg_len2, 1.0)
        rel = pts[:, None, :] - a[None, :, :]
        u = np.einsum("nij,ij->ni", rel, d) / safe
        u = np.where(seg_len2 > 0, np.clip(u, 0.0, 1.0), 0.0)
        proj = a[None, :, :] + u[..., None] * d[None, :, :]
        dist = np.linalg.norm(pts[:, None, :] - proj, axis=2)
        return dist.min(axis=1)


def total_displacement(path: Path) -> Displacement:
    signed = sum(path.segment_headings())
    return Displacement(path.length, abs(signed), signed)


def point_at_arc_length(path: Path, s: float) -> Pose2D:
    """Pose on the polyline at arc length ``s`` (clamped to the path)."""
    if s <= 0.0:
        return path.start
    if s >= path.length:
        return path.end
    i, frac = path._locate(s)
    a, b = path.waypoints[i], path.waypoints[i + 1]
    return Pose2D(
        a.x + frac * (b.x - a.x),
        a.y + frac * (b.y - a.y),
        a.heading + frac * angle_diff(b.heading, a.heading),
    )


def load_path(source: str | FsPath) -> Path:
    """Load a JSON array of ``{x_in, y_in, heading_rad}`` objects."""
    with open(source) as f:
        raw = json.load(f)
    return path_from_records(raw)


def path_from_records(raw) -> Path:
    if not isinstance(raw, list):
        raise PathError("path file must hold a JSON array")
    poses = []
    for i, rec in enumerate(raw):
        try:
            vals = [float(rec[k]) for k in ("x_in", "y_in", "heading_rad")]
        except (KeyError, TypeError, ValueError) as exc:
            raise PathError(f"bad record {rec!r} ({exc})", i) from None
        if not all(math.isfinite(v) for v in vals):
            raise PathError("non-finite coordinate", i)
        poses.append(Pose2D(*vals))
    return Path(tuple(poses))


def path_to_records(path: Path) -> list[dict]:
    return [{"x_in": p.x, "y_in": p.y, "heading_rad": p.heading} for p in path.waypoints]
