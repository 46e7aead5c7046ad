"""Benchmark paths.

The three comparison scenarios are stand-ins of increasing difficulty: a
straight run with a quarter turn, an L with a half turn spread along it, and
an S-curve whose heading swings back and forth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .geometry import Path


@dataclass(frozen=True)
class Scenario:
    name: str
    path: Path
    description: str = ""


def straight_path(length: float, heading_start: float = 0.0, heading_end: float | None = None) -> Path:
    """Straight run along field +y."""
    end = heading_start if heading_end is None else heading_end
    return Path.from_points([(0.0, 0.0, heading_start), (0.0, length, end)])


def setpoint_path(distance: float) -> Path:
    return straight_path(distance)


def l_path(leg: float = 48.0, n_per_leg: int = 8) -> Path:
    """Up one leg, then left along the other; heading turns 0 -> pi evenly with arc length."""
    total = 2.0 * leg
    pts = []
    for i in range(2 * n_per_leg + 1):
        s = total * i / (2 * n_per_leg)
        x, y = (0.0, s) if s <= leg else (-(s - leg), leg)
        pts.append((x, y, math.pi * s / total))
    return Path.from_points(pts)


def _s_curve_arc(amplitude: float, span: float) -> float:
    k = 2.0 * math.pi / span
    return quad(lambda y: math.hypot(1.0, amplitude * k * math.cos(k * y)), 0.0, span)[0]


def s_curve(length: float = 120.0, amplitude: float = 12.0, n: int = 41) -> Path:
    """One full sine period x = A sin(2 pi y / Y), with Y chosen so the arc is ``length``.

    Heading follows (pi/4) sin(2 pi u) + (pi/2) u over the normalized
    parameter u, so it rises, falls back and rises again.
    """
    if not amplitude > 0 or not length > 0:
        raise ValueError("length and amplitude must be positive")
    span = brentq(lambda y: _s_curve_arc(amplitude, y) - length, 1e-6, length)
    u = np.linspace(0.0, 1.0, n)
    ys = span * u
    xs = amplitude * np.sin(2.0 * math.pi * u)
    hs = (math.pi / 4) * np.sin(2.0 * math.pi * u) + (math.pi / 2) * u
    return Path.from_points(list(zip(xs.tolist(), ys.tolist(), hs.tolist())))


def default_scenarios() -> list[Scenario]:
    return [
        Scenario("scenario1", straight_path(108.0, 0.0, math.pi / 2),
                 "9 ft straight, heading turns 90 degrees along the way"),
        Scenario("scenario2", l_path(48.0),
                 "8 ft L, heading turns 180 degrees along the way"),
        Scenario("scenario3", s_curve(120.0, 12.0),
                 "10 ft S-curve, heading swings back and forth"),
    ]


def scenario_by_name(name: str) -> Scenario:
    for sc in default_scenarios():
        if sc.name == name:
            return sc
    raise KeyError(f"unknown scenario {name!r}")
