"""Run configuration: one INI file with sections, parsed with configparser.

Lengths may carry a unit suffix (``in``, ``ft``, ``m``, ``cm``); bare numbers
are inches. The annotated default lives next to this module as
``default.ini`` and is the single source of every benchmark constant.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path as FsPath

from .controller import ControllerGains
from .mecanum import MecanumGeometry, OdometryGeometry
from .orchestrator import AxisGains, SetpointCriterion
from .profile import RobotConstraints
from .simulator import PlantConfig

INCHES_PER = {"in": 1.0, "inch": 1.0, "ft": 12.0, "m": 1.0 / 0.0254, "cm": 1.0 / 2.54}

_LENGTH = re.compile(r"^\s*([-+0-9.eE]+)\s*([a-z]*)\s*$")


class ConfigError(ValueError):
    pass


def parse_length(text: str) -> float:
    """'9 ft' -> 108.0; bare numbers are inches."""
    m = _LENGTH.match(str(text).lower())
    if not m:
        raise ConfigError(f"cannot parse length {text!r}")
    value, unit = m.groups()
    unit = unit or "in"
    if unit not in INCHES_PER:
        raise ConfigError(f"unknown length unit {unit!r} in {text!r}")
    return float(value) * INCHES_PER[unit]


def parse_list(text: str, item=float) -> list:
    return [item(tok) for tok in re.split(r"[,\s]+", text.strip()) if tok]


def parse_seeds(text: str) -> list[int]:
    """Either an explicit list or ``start..stop`` (inclusive)."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(v) for v in text.split(".."))
        if hi < lo:
            raise ConfigError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    return parse_list(text, int)


@dataclass(frozen=True)
class ControllerSet:
    """Gains for one controller family (translation axes and heading)."""

    translation: ControllerGains
    heading: ControllerGains

    def axis_gains(self) -> AxisGains:
        return AxisGains(self.translation, self.heading)


@dataclass(frozen=True)
class AcceptanceThresholds:
    max_long_improvement_pct: float = 15.0
    system_time_ratio: float = 0.85
    mean_deviation_limit_in: float = 2.5
    spread_limit_in: float = 1.0
    sweep_unstable_in: float = 6.0
    sweep_reference_in: float = 12.0


@dataclass(frozen=True)
class RunConfig:
    plant: PlantConfig
    pitdt: ControllerSet
    pid: ControllerSet
    lookahead: float = 12.0
    sweep: tuple[float, ...] = (6.0, 8.0, 12.0, 16.0, 24.0)
    setpoint_distances: tuple[float, ...] = (12.0, 24.0, 36.0, 48.0, 72.0, 108.0)
    trials_per_cell: int = 10
    seeds: tuple[int, ...] = tuple(range(1, 11))
    timeout: float = 30.0
    heading_radius: float = 7.5
    per_update_denominators: bool = False
    criterion: SetpointCriterion = SetpointCriterion()
    acceptance: AcceptanceThresholds = field(default_factory=AcceptanceThresholds)
    source: str = "<defaults>"

    def __post_init__(self):
        if self.trials_per_cell < 1:
            raise ConfigError("trials_per_cell must be at least 1")
        if len(self.seeds) < self.trials_per_cell:
            raise ConfigError(
                f"{len(self.seeds)} seeds given for {self.trials_per_cell} trials per cell")
        if not self.lookahead > 0:
            raise ConfigError("lookahead must be positive")
        if not self.timeout > 0:
            raise ConfigError("timeout must be positive")

    def gains_for(self, pitdt: bool) -> AxisGains:
        return (self.pitdt if pitdt else self.pid).axis_gains()


def _section(cp: configparser.ConfigParser, name: str) -> configparser.SectionProxy:
    if not cp.has_section(name):
        raise ConfigError(f"missing section [{name}]")
    return cp[name]


def _floats(sec: configparser.SectionProxy, names) -> dict[str, float]:
    try:
        return {n: sec.getfloat(n) for n in names if n in sec}
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}] {exc}") from None


def _gains(sec: configparser.SectionProxy, prefix: str = "") -> ControllerGains:
    g = _floats(sec, [f"{prefix}{k}" for k in ("kp", "ki", "kd", "u0", "a")])
    try:
        return ControllerGains(
            kp=g[f"{prefix}kp"], ki=g.get(f"{prefix}ki", 0.0), kd=g.get(f"{prefix}kd", 0.0),
            u0=g.get(f"{prefix}u0", 1.0), a_rampup=g.get(f"{prefix}a", 0.0))
    except KeyError as exc:
        raise ConfigError(f"[{sec.name}] missing {exc.args[0]}") from None


def _controller_set(cp, name: str) -> ControllerSet:
    sec = _section(cp, name)
    return ControllerSet(_gains(sec), _gains(sec, "heading_"))


def from_parser(cp: configparser.ConfigParser, source: str = "<string>") -> RunConfig:
    keys = [f"{q}_{a}" for q in ("kv", "ka", "v_max", "a_max", "j_max") for a in "xyh"]
    cons = _floats(_section(cp, "constraints"), keys + ["v_battery"])
    missing = [k for k in keys if k not in cons]
    if missing:
        raise ConfigError(f"[constraints] missing {', '.join(missing)}")
    constraints = RobotConstraints(**cons)

    mec = MecanumGeometry(**_floats(_section(cp, "mecanum"),
                                    ("half_length", "half_width", "wheel_radius", "kv_wheel")))
    odo = OdometryGeometry(**_floats(_section(cp, "odometry"),
                                     ("track_half_width", "back_offset", "counts_per_inch")))
    p = _section(cp, "plant")
    plant = PlantConfig(
        constraints, mec, odo,
        slip_accel_limit=p.getfloat("slip_accel_limit", 220.0),
        noise_seed=p.getint("noise_seed", 0),
        velocity_noise_sd=p.getfloat("velocity_noise_sd", 0.0),
        encoder_noise_sd=p.getfloat("encoder_noise_sd", 0.0),
        loop_dt=p.getfloat("loop_dt", 0.02),
        command_delay=p.getfloat("command_delay", 0.0),
    )

    pur = _section(cp, "pursuit")
    run = _section(cp, "run")
    suite = _section(cp, "suite")
    acc = cp["acceptance"] if cp.has_section("acceptance") else {}
    d = AcceptanceThresholds()
    acceptance = AcceptanceThresholds(
        max_long_improvement_pct=float(acc.get("max_long_improvement_pct", d.max_long_improvement_pct)),
        system_time_ratio=float(acc.get("system_time_ratio", d.system_time_ratio)),
        mean_deviation_limit_in=float(acc.get("mean_deviation_limit_in", d.mean_deviation_limit_in)),
        spread_limit_in=float(acc.get("spread_limit_in", d.spread_limit_in)),
        sweep_unstable_in=parse_length(acc.get("sweep_unstable", "6 in")),
        sweep_reference_in=parse_length(acc.get("sweep_reference", "12 in")),
    )
    criterion = SetpointCriterion(
        threshold_in=parse_length(run.get("setpoint_threshold", "1 in")),
        v_negligible=run.getfloat("v_negligible", 0.5),
        dwell=run.getfloat("dwell", 0.1),
    )
    trials = suite.getint("trials_per_cell", 10)
    return RunConfig(
        plant=plant,
        pitdt=_controller_set(cp, "gains.pitdt"),
        pid=_controller_set(cp, "gains.pid"),
        lookahead=parse_length(pur.get("lookahead", "12 in")),
        sweep=tuple(parse_length(v) for v in re.split(r",\s*", pur.get("sweep", "6, 8, 12, 16, 24"))),
        setpoint_distances=tuple(parse_length(v) for v in
                                 re.split(r",\s*", suite.get("setpoint_distances", "1 ft"))),
        trials_per_cell=trials,
        seeds=tuple(parse_seeds(suite.get("seeds", f"1..{trials}"))),
        timeout=run.getfloat("timeout", 30.0),
        heading_radius=parse_length(run.get("heading_radius", "7.5 in")),
        per_update_denominators=run.getboolean("per_update_denominators", False),
        criterion=criterion,
        acceptance=acceptance,
        source=source,
    )


def default_config_text() -> str:
    return resources.files("holomotion").joinpath("default.ini").read_text()


def load_config(path: str | FsPath | None = None) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is None:
        cp.read_string(default_config_text(), source="default.ini")
        return from_parser(cp, "default.ini")
    path = FsPath(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp.read(path)
    return from_parser(cp, str(path))


def loads_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(text)
    return from_parser(cp)
