"""Evaluation metrics over trial records: path deviation, speed, repeatability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import Path
from .orchestrator import TrialRecord

INTERP_STEP = 0.001


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class TrialMetrics:
    mean_deviation: float
    max_deviation: float
    avg_speed: float
    time_to_setpoint: float | None

    def __post_init__(self):
        if not (self.max_deviation + 1e-12 >= self.mean_deviation >= 0):
            raise ValueError(f"inconsistent deviations: mean {self.mean_deviation}, max {self.max_deviation}")
        if self.avg_speed < 0:
            raise ValueError("average speed must be non-negative")


def deviation_series(record: TrialRecord, path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Sample times and XY distance from each recorded pose to the path."""
    t = np.array([s.t for s in record.samples])
    xy = np.array([[s.pose.x, s.pose.y] for s in record.samples]).reshape(-1, 2)
    return t, path.distances_to(xy)


def interpolated_mean(t: np.ndarray, values: np.ndarray, step: float = INTERP_STEP) -> float:
    """Mean of a series after linear interpolation onto a uniform ``step`` grid."""
    if len(t) < 2:
        raise InsufficientData("need at least two samples")
    span = t[-1] - t[0]
    n = int(round(span / step))
    grid = np.linspace(t[0], t[-1], max(n, 1) + 1)
    return float(np.interp(grid, t, values).mean())


def mean_deviation(record: TrialRecord, path: Path, step: float = INTERP_STEP) -> float:
    if len(record.samples) < 2:
        raise InsufficientData("mean deviation needs at least two samples")
    t, dev = deviation_series(record, path)
    return interpolated_mean(t, dev, step)


def max_deviation(records: Sequence[TrialRecord], path: Path) -> float:
    if not records:
        raise InsufficientData("no trials given")
    return max(float(deviation_series(r, path)[1].max()) for r in records)


def average_speed(record: TrialRecord) -> float:
    """Distance actually travelled divided by the time to the setpoint (or record end)."""
    samples = record.samples
    if record.reached:
        cutoff = record.outcome.t_final
        samples = [s for s in samples if s.t <= cutoff + 1e-12]
    if len(samples) < 2 or samples[-1].t - samples[0].t <= 0:
        raise InsufficientData("record spans no time")
    xy = np.array([[s.pose.x, s.pose.y] for s in samples])
    travelled = float(np.hypot(*np.diff(xy, axis=0).T).sum())
    return travelled / (samples[-1].t - samples[0].t)


def trial_metrics(record: TrialRecord, path: Path) -> TrialMetrics:
    t, dev = deviation_series(record, path)
    return TrialMetrics(
        mean_deviation=interpolated_mean(t, dev),
        max_deviation=float(dev.max()),
        avg_speed=average_speed(record),
        time_to_setpoint=record.time_to_setpoint,
    )


@dataclass(frozen=True)
class Histogram:
    field: str
    bin_width: float
    bins: tuple[tuple[float, float, int], ...]
    excluded: int = 0

    @property
    def occupied(self) -> int:
        return sum(1 for *_, n in self.bins if n)

    def rows(self) -> list[tuple[float, float, int]]:
        return list(self.bins)


def spread_histogram(metrics: Iterable[TrialMetrics], field: str, bin_width: float) -> Histogram:
    """Trials per ``bin_width``-wide bin of ``field``; bins are anchored at zero.

    Trials whose value is None (timeouts, for ``time_to_setpoint``) are
    counted in ``excluded`` rather than dropped silently.
    """
    metrics = list(metrics)
    if not metrics:
        raise InsufficientData("no trials given")
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    values = [getattr(m, field) for m in metrics]
    present = [v for v in values if v is not None]
    excluded = len(values) - len(present)
    if not present:
        return Histogram(field, bin_width, (), excluded)
    idx = [math.floor(v / bin_width + 1e-9) for v in present]
    lo, hi = min(idx), max(idx)
    counts = [0] * (hi - lo + 1)
    for i in idx:
        counts[i - lo] += 1
    bins = tuple(((lo + k) * bin_width, (lo + k + 1) * bin_width, n) for k, n in enumerate(counts))
    return Histogram(field, bin_width, bins, excluded)


def spread(metrics: Iterable[TrialMetrics], field: str) -> float:
    values = [getattr(m, field) for m in metrics if getattr(m, field) is not None]
    if not values:
        raise InsufficientData("no values")
    return max(values) - min(values)
