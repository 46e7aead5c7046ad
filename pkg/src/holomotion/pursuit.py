"""Pure pursuit look-ahead point selection on a polyline."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import Path, Pose2D, point_at_arc_length

DEFAULT_LOOKAHEAD_IN = 12.0


@dataclass(frozen=True)
class PursuitState:
    lookahead_distance: float = DEFAULT_LOOKAHEAD_IN
    last_progress: float = 0.0

    def __post_init__(self):
        if not self.lookahead_distance > 0:
            raise ValueError("look-ahead distance must be positive")


def circle_intersections(path: Path, cx: float, cy: float, r: float) -> list[float]:
    """Arc lengths where the circle (cx, cy, r) crosses the polyline."""
    hits = []
    cum = path.cumulative_arc_length
    for i in range(len(path.waypoints) - 1):
        seg = cum[i + 1] - cum[i]
        if seg <= 0:
            continue
        ax, ay = path.xy[i]
        bx, by = path.xy[i + 1]
        dx, dy = bx - ax, by - ay
        fx, fy = ax - cx, ay - cy
        a = dx * dx + dy * dy
        b = 2.0 * (fx * dx + fy * dy)
        c = fx * fx + fy * fy - r * r
        disc = b * b - 4.0 * a * c
        if disc < 0:
            continue
        root = math.sqrt(disc)
        for u in ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a)):
            if 0.0 <= u <= 1.0:
                hits.append(cum[i] + u * seg)
    return hits


def find_lookahead(path: Path, robot: Pose2D, state: PursuitState) -> tuple[Pose2D, PursuitState]:
    """Pick the pursuit target and advance the progress marker.

    Among circle/path crossings at or beyond the last progress the farthest one
    wins. With no crossing the robot is either inside the circle around the
    remaining path (target the end) or off the path entirely (target the
    closest path point).
    """
    d = state.lookahead_distance
    total = path.length
    if total - state.last_progress < d:
        s = total
    else:
        ahead = [s for s in circle_intersections(path, robot.x, robot.y, d) if s >= state.last_progress]
        if ahead:
            s = max(ahead)
        else:
            closest = path.closest_point(robot.x, robot.y)
            if closest.distance > d:
                s = max(closest.arc_length, state.last_progress)
            elif math.hypot(path.end.x - robot.x, path.end.y - robot.y) <= d:
                s = total
            else:
                # only crossings behind the progress marker; hold position on the path
                s = state.last_progress
    s = max(s, state.last_progress)
    target = path.end if s >= total else point_at_arc_length(path, s)
    return target, replace(state, last_progress=s)
