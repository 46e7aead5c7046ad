"""Benchmark suites: setpoint distances, look-ahead sweep and scenario comparison.

Every suite writes one CSV per trial, CSV tables built only from those
trials, and a plain-text summary. Nothing time-dependent goes into the
files, so identical configs and seeds give byte-identical outputs.
"""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Callable, Sequence

from .config import RunConfig
from .geometry import Path
from .metrics import TrialMetrics, spread, spread_histogram, trial_metrics
from .orchestrator import Mode, RunPlan, TrialRecord, run_trial, write_record_csv
from .scenarios import Scenario, default_scenarios, setpoint_path, straight_path

EXIT_OK = 0
EXIT_TIMEOUT = 2
EXIT_DIRECTION = 3

DEVIATION_BIN_IN = 0.25
TIME_BIN_S = 0.1


@dataclass(frozen=True)
class TrialSpec:
    label: str
    path: Path
    mode: Mode
    lookahead: float
    seed: int


@dataclass
class SuiteReport:
    name: str
    rows: list[dict]
    directions: dict[str, bool] = field(default_factory=dict)
    timeouts: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.timeouts:
            return EXIT_TIMEOUT
        if not all(self.directions.values()):
            return EXIT_DIRECTION
        return EXIT_OK

    def summary(self) -> str:
        lines = [f"== {self.name} =="]
        if self.rows:
            cols = list(self.rows[0])
            lines.append("  ".join(f"{c:>14}" for c in cols))
            for r in self.rows:
                lines.append("  ".join(f"{_fmt(r[c]):>14}" for c in cols))
        for name, ok in self.directions.items():
            lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}")
        for label in self.timeouts:
            lines.append(f"[TIMEOUT] {label}")
        lines.extend(self.notes)
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "timeout"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _plan(cfg: RunConfig, spec: TrialSpec) -> RunPlan:
    return RunPlan(
        spec.path, spec.mode, cfg.gains_for(spec.mode.is_pitdt),
        lookahead=spec.lookahead, timeout=cfg.timeout, criterion=cfg.criterion,
        heading_radius=cfg.heading_radius, per_update_denominators=cfg.per_update_denominators)


def _run_one(args: tuple[RunConfig, TrialSpec]) -> TrialRecord:
    cfg, spec = args
    return run_trial(_plan(cfg, spec), cfg.plant, spec.seed)


def run_specs(cfg: RunConfig, specs: Sequence[TrialSpec], jobs: int = 1) -> list[TrialRecord]:
    """Run trials, optionally across processes; results keep the order of ``specs``."""
    work = [(cfg, s) for s in specs]
    if jobs <= 1 or len(work) < 2:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))


def _write_trials(out: FsPath | None, specs, records) -> None:
    if out is None:
        return
    trials = out / "trials"
    trials.mkdir(parents=True, exist_ok=True)
    for spec, rec in zip(specs, records):
        write_record_csv(rec, trials / f"{spec.label}.csv")


def write_table(dest: FsPath, rows: list[dict]) -> None:
    with open(dest, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        if not rows:
            return
        cols = list(rows[0])
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])


def _finish(report: SuiteReport, out: FsPath | None, table: str) -> SuiteReport:
    if out is not None:
        write_table(out / table, report.rows)
        with open(out / "summary.txt", "a") as f:
            f.write(report.summary())
    return report


def improvement_pct(t_pitdt: float | None, t_pid: float | None) -> float | None:
    """Percentage less time taken by PI(t)D(t) than PID."""
    if t_pitdt is None or t_pid is None or t_pid <= 0:
        return None
    return 100.0 * (t_pid - t_pitdt) / t_pid


def cmd_setpoint_suite(cfg: RunConfig, out: FsPath | None = None, jobs: int = 1) -> SuiteReport:
    seed = cfg.seeds[0]
    specs = []
    for d in cfg.setpoint_distances:
        for mode in (Mode.PITDT_ONLY, Mode.PID_ONLY):
            specs.append(TrialSpec(f"setpoint_{mode.value}_{d:g}in", setpoint_path(d), mode,
                                   cfg.lookahead, seed))
    records = run_specs(cfg, specs, jobs)
    _write_trials(out, specs, records)

    rows, timeouts = [], []
    for i, d in enumerate(cfg.setpoint_distances):
        r_pit, r_pid = records[2 * i], records[2 * i + 1]
        for spec, rec in ((specs[2 * i], r_pit), (specs[2 * i + 1], r_pid)):
            if not rec.reached:
                timeouts.append(spec.label)
        rows.append({
            "distance_in": d,
            "pitdt_time_s": r_pit.time_to_setpoint,
            "pid_time_s": r_pid.time_to_setpoint,
            "improvement_pct": improvement_pct(r_pit.time_to_setpoint, r_pid.time_to_setpoint),
        })

    imps = [r["improvement_pct"] for r in rows]
    directions = {}
    if all(v is not None for v in imps):
        directions["PI(t)D(t) no slower than PID at every distance"] = all(
            r["pitdt_time_s"] <= r["pid_time_s"] for r in rows)
        directions["improvement at shortest distance > at longest"] = imps[0] > imps[-1]
        cap = cfg.acceptance.max_long_improvement_pct
        directions[f"improvement at longest distance within [0, {cap:g}]%"] = 0.0 <= imps[-1] <= cap
    report = SuiteReport("setpoint suite", rows, directions, timeouts)
    return _finish(report, out, "setpoint_suite.csv")


def sweep_path() -> Path:
    return straight_path(108.0)


def cmd_lookahead_sweep(cfg: RunConfig, out: FsPath | None = None, jobs: int = 1) -> SuiteReport:
    seed = cfg.seeds[0]
    path = sweep_path()
    specs = [TrialSpec(f"sweep_{mode.value}_{d:g}in", path, mode, d, seed)
             for d in cfg.sweep for mode in (Mode.PITDT_SYSTEM, Mode.PID_SYSTEM)]
    records = run_specs(cfg, specs, jobs)
    _write_trials(out, specs, records)

    rows, timeouts = [], []
    by_key = {}
    for spec, rec in zip(specs, records):
        if not rec.reached:
            timeouts.append(spec.label)
        by_key[(spec.mode, spec.lookahead)] = rec
        rows.append({
            "lookahead_in": spec.lookahead,
            "system": spec.mode.value,
            "time_s": rec.time_to_setpoint,
            "slip_events": rec.slip_events,
            "end_slip_events": rec.end_slip_events,
        })

    acc = cfg.acceptance
    directions, notes = {}, []
    lo, ref = acc.sweep_unstable_in, acc.sweep_reference_in
    if (Mode.PITDT_SYSTEM, lo) in by_key and (Mode.PITDT_SYSTEM, ref) in by_key:
        a = by_key[(Mode.PITDT_SYSTEM, lo)].slip_events
        b = by_key[(Mode.PITDT_SYSTEM, ref)].slip_events
        directions[f"PI(t)D(t) slips more at d={lo:g} in than at d={ref:g} in"] = a > b
        t_pit = by_key[(Mode.PITDT_SYSTEM, ref)].time_to_setpoint
        t_pid = by_key[(Mode.PID_SYSTEM, ref)].time_to_setpoint
        if t_pit is not None and t_pid is not None:
            ratio = t_pit / t_pid
            directions[f"PI(t)D(t) system <= {acc.system_time_ratio:g} x PID system at d={ref:g} in"] = (
                ratio <= acc.system_time_ratio)
            notes.append(f"time ratio PI(t)D(t)/PID at d={ref:g} in: {ratio:.4f}")
        p_lo = by_key[(Mode.PID_SYSTEM, lo)].time_to_setpoint
        p_ref = by_key[(Mode.PID_SYSTEM, ref)].time_to_setpoint
        if p_lo is not None and p_ref is not None:
            notes.append(f"PID system d={lo:g} vs d={ref:g} in: {p_lo - p_ref:+.3f} s "
                         f"({100 * (p_lo - p_ref) / p_ref:+.1f}%)")
    report = SuiteReport("look-ahead sweep", rows, directions, timeouts, notes)
    return _finish(report, out, "lookahead_sweep.csv")


@dataclass
class CompareResult:
    report: SuiteReport
    metrics: dict[tuple[str, Mode], list[TrialMetrics]]
    records: dict[tuple[str, Mode], list[TrialRecord]]


SYSTEMS = (Mode.PITDT_SYSTEM, Mode.PID_SYSTEM)


def compare_specs(cfg: RunConfig, scenarios: Sequence[Scenario]) -> list[TrialSpec]:
    n = cfg.trials_per_cell
    return [TrialSpec(f"{sc.name}_{mode.value}_{i:02d}", sc.path, mode, cfg.lookahead, cfg.seeds[i])
            for sc in scenarios for mode in SYSTEMS for i in range(n)]


def cmd_compare(cfg: RunConfig, out: FsPath | None = None, jobs: int = 1,
                scenarios: Sequence[Scenario] | None = None) -> CompareResult:
    scenarios = list(scenarios or default_scenarios())
    n = cfg.trials_per_cell
    specs = compare_specs(cfg, scenarios)
    records = run_specs(cfg, specs, jobs)
    _write_trials(out, specs, records)

    cells: dict[tuple[str, Mode], list[TrialRecord]] = {}
    for spec, rec in zip(specs, records):
        cells.setdefault((_scenario_of(spec, scenarios), spec.mode), []).append(rec)
    paths = {sc.name: sc.path for sc in scenarios}
    mets = {k: [trial_metrics(r, paths[k[0]]) for r in recs] for k, recs in cells.items()}
    timeouts = [s.label for s, r in zip(specs, records) if not r.reached]

    per_trial = []
    for i in range(n):
        row = {"trial": i + 1}
        for sc in scenarios:
            for mode in SYSTEMS:
                row[f"{sc.name}_{mode.value}"] = mets[(sc.name, mode)][i].mean_deviation
        per_trial.append(row)

    speed_rows, max_rows, summary_rows = [], [], []
    acc = cfg.acceptance
    directions = {}
    for sc in scenarios:
        cell = {m: mets[(sc.name, m)] for m in SYSTEMS}
        speed = {m: statistics.fmean(x.avg_speed for x in cell[m]) for m in SYSTEMS}
        dev = {m: statistics.fmean(x.mean_deviation for x in cell[m]) for m in SYSTEMS}
        worst = {m: max(x.max_deviation for x in cell[m]) for m in SYSTEMS}
        spreads = {m: spread(cell[m], "mean_deviation") for m in SYSTEMS}
        speed_rows.append({"scenario": sc.name, **{f"{m.value}_avg_speed_in_s": speed[m] for m in SYSTEMS}})
        max_rows.append({"scenario": sc.name, **{f"{m.value}_max_deviation_in": worst[m] for m in SYSTEMS}})
        for m in SYSTEMS:
            times = [x.time_to_setpoint for x in cell[m] if x.time_to_setpoint is not None]
            summary_rows.append({
                "scenario": sc.name, "system": m.value,
                "avg_speed_in_s": speed[m], "mean_deviation_in": dev[m],
                "max_deviation_in": worst[m], "deviation_spread_in": spreads[m],
                "mean_time_s": statistics.fmean(times) if times else None,
                "timeouts": len(cell[m]) - len(times),
            })
        p, q = Mode.PITDT_SYSTEM, Mode.PID_SYSTEM
        directions[f"{sc.name}: PI(t)D(t) average speed > PID"] = speed[p] > speed[q]
        directions[f"{sc.name}: PI(t)D(t) mean deviation >= PID"] = dev[p] >= dev[q]
        directions[f"{sc.name}: PI(t)D(t) mean deviation <= {acc.mean_deviation_limit_in:g} in"] = (
            dev[p] <= acc.mean_deviation_limit_in)
        for m in SYSTEMS:
            directions[f"{sc.name}: {m.value} deviation spread < {acc.spread_limit_in:g} in"] = (
                spreads[m] < acc.spread_limit_in)

    report = SuiteReport("scenario comparison", summary_rows, directions, timeouts)
    if out is not None:
        write_table(out / "table1_avg_speed.csv", speed_rows)
        write_table(out / "table2_mean_deviation.csv", per_trial)
        write_table(out / "table3_max_deviation.csv", max_rows)
        write_histograms(out, mets)
    _finish(report, out, "compare_summary.csv")
    return CompareResult(report, mets, cells)


def _scenario_of(spec: TrialSpec, scenarios: Sequence[Scenario]) -> str:
    for sc in scenarios:
        if spec.label.startswith(sc.name + "_"):
            return sc.name
    raise KeyError(spec.label)


def write_histograms(out: FsPath, mets: dict[tuple[str, Mode], list[TrialMetrics]]) -> None:
    for fname, fld, width in (("hist_mean_deviation.csv", "mean_deviation", DEVIATION_BIN_IN),
                              ("hist_time_to_setpoint.csv", "time_to_setpoint", TIME_BIN_S)):
        rows = []
        for (sc, mode), cell in mets.items():
            h = spread_histogram(cell, fld, width)
            for lo, hi, count in h.bins:
                rows.append({"scenario": sc, "system": mode.value, "bin_lo": lo, "bin_hi": hi,
                             "count": count, "excluded": h.excluded})
        write_table(out / fname, rows)


def run_suites(cfg: RunConfig, out: FsPath | None, names: Sequence[str], jobs: int = 1,
               log: Callable[[str], None] = print) -> int:
    """Run named suites in order and combine their exit codes (worst wins)."""
    suites = {"setpoint-suite": cmd_setpoint_suite, "lookahead-sweep": cmd_lookahead_sweep,
              "compare": lambda c, o, j: cmd_compare(c, o, j).report}
    code = EXIT_OK
    for name in names:
        report = suites[name](cfg, out, jobs)
        log(report.summary())
        code = _worst(code, report.exit_code)
    return code


def _worst(a: int, b: int) -> int:
    rank = {EXIT_OK: 0, EXIT_DIRECTION: 1, EXIT_TIMEOUT: 2}
    return a if rank[a] >= rank[b] else b
