"""Command-line entry point.

    holomotion [--config FILE] [--out DIR] [--seed N] [--trials N] [--lookahead-in F] <command>

Commands: profile, sysid, run, setpoint-suite, lookahead-sweep, compare.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import replace
from pathlib import Path as FsPath

import numpy as np

from .config import ConfigError, RunConfig, load_config, parse_length
from .geometry import PathError, load_path
from .harness import (
    EXIT_DIRECTION,
    EXIT_OK,
    EXIT_TIMEOUT,
    TrialSpec,
    cmd_compare,
    cmd_lookahead_sweep,
    cmd_setpoint_suite,
    run_specs,
)
from .metrics import trial_metrics
from .orchestrator import Mode, write_record_csv
from .profile import TooShort, build_holonomic_profiles
from .scenarios import scenario_by_name, setpoint_path
from .simulator import AXES, NoSteadyState, sysid_kv, sysid_vmax

EXIT_USAGE = 1
PROFILE_COLUMNS = ("t", "position", "velocity", "acceleration", "jerk",
                   "heading", "angular_velocity", "angular_acceleration", "angular_jerk")


def _global_parser(suppress: bool = False) -> argparse.ArgumentParser:
    """Global options; the copy given to subcommands must not reset values set before them."""
    g = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g.add_argument("--config", type=FsPath, default=d(None),
                   help="INI config file (default: bundled default.ini)")
    g.add_argument("--out", type=FsPath, default=d(None), help="output directory")
    g.add_argument("--seed", type=int, default=d(None), help="base seed; trial i uses seed + i")
    g.add_argument("--trials", type=int, default=d(None), help="trials per cell")
    g.add_argument("--lookahead-in", type=float, default=d(None),
                   help="pure pursuit look-ahead distance (in)")
    g.add_argument("--jobs", type=int, default=d(1), help="worker processes for trial batches")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_parser(suppress=True)
    ap = argparse.ArgumentParser(prog="holomotion", parents=[_global_parser()],
                                 description="Holonomic motion control simulator and benchmarks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], help="build motion profiles for a path")
    _path_args(p)
    p.add_argument("--step", type=float, default=0.001, help="sample spacing (s)")

    sub.add_parser("sysid", parents=[common],
                   help="identify kv and top speed per axis (exit 1 if any fit is unreliable)")

    p = sub.add_parser("run", parents=[common], help="run one closed-loop trial")
    _path_args(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.PITDT_SYSTEM.value)

    for name, text in (("setpoint-suite", "PI(t)D(t) vs PID from rest at several distances"),
                       ("lookahead-sweep", "both systems on the 9 ft path at several look-aheads"),
                       ("compare", "both systems on the three scenarios")):
        sub.add_parser(name, parents=[common], help=text)
    return ap


def _path_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--path", type=FsPath, help="JSON waypoint file")
    src.add_argument("--scenario", help="built-in scenario name")
    src.add_argument("--distance", help="straight move, e.g. '3 ft' or 36")


def apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    changes = {}
    if args.trials is not None:
        changes["trials_per_cell"] = args.trials
    if args.seed is not None:
        n = max(args.trials or cfg.trials_per_cell, 1)
        changes["seeds"] = tuple(args.seed + i for i in range(n))
    elif args.trials is not None and args.trials > len(cfg.seeds):
        base = cfg.seeds[0]
        changes["seeds"] = tuple(base + i for i in range(args.trials))
    if args.lookahead_in is not None:
        changes["lookahead"] = args.lookahead_in
    return replace(cfg, **changes) if changes else cfg


def _resolve_path(args):
    if args.path is not None:
        return load_path(args.path)
    if args.scenario:
        return scenario_by_name(args.scenario).path
    return setpoint_path(parse_length(args.distance or "9 ft"))


def _out_dir(args) -> FsPath | None:
    if args.out is None:
        return None
    args.out.mkdir(parents=True, exist_ok=True)
    summary = args.out / "summary.txt"
    if summary.exists():
        summary.unlink()
    return args.out


def do_profile(cfg: RunConfig, args) -> int:
    path = _resolve_path(args)
    prof = build_holonomic_profiles(path, cfg.plant.constraints)
    if isinstance(prof, TooShort):
        print(f"too short to profile: {prof.distance:.6f} in < {prof.min_distance:.6f} in "
              "(feedback only)")
        return EXIT_OK
    lim = prof.limits
    print(f"total time {prof.total_time:.6f} s, linear cap {lim.v_linear_eff:.4f} in/s, "
          f"angular cap {lim.v_h_eff:.4f} rad/s")
    out = _out_dir(args)
    if out is not None:
        ts = np.arange(0.0, prof.total_time + args.step, args.step)
        with open(out / "profile.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(PROFILE_COLUMNS)
            lin, ang, sg = prof.translational, prof.angular, prof.rotation_sign
            for t in ts:
                s, v, a = lin.sample(t)
                h, om, al = ang.sample(t)
                row = (t, s, v, a, lin.jerk_at(t), sg * h, sg * om, sg * al, sg * ang.jerk_at(t))
                w.writerow([f"{x:.6f}" for x in row])
    return EXIT_OK


def do_sysid(cfg: RunConfig, args) -> int:
    c = cfg.plant.constraints
    seed = cfg.seeds[0]
    print(f"{'axis':>4} {'kv_cfg':>10} {'kv_fit':>10} {'vmax_cfg':>10} {'vmax_fit':>10}")
    failed = False
    for axis in AXES:
        kv = sysid_kv(cfg.plant, axis, seed=seed)
        notes = [str(w) for w in kv.warnings]
        try:
            vmax = sysid_vmax(cfg.plant.without_noise(), axis).value
        except NoSteadyState as exc:
            vmax = math.nan
            notes.append(str(exc))
        failed |= bool(notes)
        flag = "  (" + "; ".join(notes) + ")" if notes else ""
        print(f"{axis:>4} {c.kv(axis):10.4f} {kv.value:10.4f} "
              f"{cfg.plant.axis_speed_limit(axis):10.4f} {vmax:10.4f}{flag}")
    return EXIT_USAGE if failed else EXIT_OK


def do_run(cfg: RunConfig, args) -> int:
    path = _resolve_path(args)
    mode = Mode(args.mode)
    spec = TrialSpec(f"run_{mode.value}", path, mode, cfg.lookahead, cfg.seeds[0])
    rec = run_specs(cfg, [spec])[0]
    out = _out_dir(args)
    if out is not None:
        write_record_csv(rec, out / f"{spec.label}.csv")
    m = trial_metrics(rec, path)
    t = "timeout" if m.time_to_setpoint is None else f"{m.time_to_setpoint:.3f} s"
    print(f"{mode.value}: {t}, mean deviation {m.mean_deviation:.3f} in, "
          f"max deviation {m.max_deviation:.3f} in, avg speed {m.avg_speed:.3f} in/s, "
          f"slip events {rec.slip_events}, profiled {rec.profiled}")
    return EXIT_OK if rec.reached else EXIT_TIMEOUT


def _suite(fn):
    def run(cfg: RunConfig, args) -> int:
        t0 = time.perf_counter()
        result = fn(cfg, _out_dir(args), args.jobs)
        report = getattr(result, "report", result)
        print(report.summary(), end="")
        print(f"({time.perf_counter() - t0:.1f} s)")
        return report.exit_code
    return run


COMMANDS = {
    "profile": do_profile,
    "sysid": do_sysid,
    "run": do_run,
    "setpoint-suite": _suite(cmd_setpoint_suite),
    "lookahead-sweep": _suite(cmd_lookahead_sweep),
    "compare": _suite(cmd_compare),
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = apply_overrides(load_config(args.config), args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, PathError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_TIMEOUT", "EXIT_DIRECTION"]
