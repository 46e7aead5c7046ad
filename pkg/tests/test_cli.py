import json
from functools import partial

import numpy as np
import pytest

from holomotion import cli
from holomotion.cli import EXIT_USAGE, PROFILE_COLUMNS, apply_overrides, build_parser, main
from holomotion.config import default_config_text, load_config
from holomotion.harness import EXIT_OK, EXIT_TIMEOUT
from holomotion.simulator import sysid_kv

CFG = load_config()


def _args(*argv):
    return build_parser().parse_args([*argv, "sysid"])


def test_global_options_either_side_of_command():
    before = build_parser().parse_args(["--trials", "3", "sysid"])
    after = build_parser().parse_args(["sysid", "--trials", "3"])
    assert before.trials == after.trials == 3
    assert build_parser().parse_args(["sysid"]).jobs == 1


def test_overrides_trials_and_seed():
    cfg = apply_overrides(CFG, _args("--trials", "3", "--seed", "40"))
    assert cfg.trials_per_cell == 3 and cfg.seeds == (40, 41, 42)
    cfg = apply_overrides(CFG, _args("--trials", "12"))
    assert cfg.trials_per_cell == 12 and cfg.seeds == tuple(range(1, 13))
    cfg = apply_overrides(CFG, _args("--lookahead-in", "8"))
    assert cfg.lookahead == 8.0
    assert apply_overrides(CFG, _args()) is CFG


def test_profile_writes_samples(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "profile", "--distance", "3 ft"]) == EXIT_OK
    assert "total time" in capsys.readouterr().out
    lines = (tmp_path / "profile.csv").read_text().splitlines()
    assert lines[0] == ",".join(PROFILE_COLUMNS)
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert rows[1, 0] - rows[0, 0] == pytest.approx(0.001)
    assert rows[-1, 1] == pytest.approx(36.0, abs=1e-3)
    assert set(np.unique(np.abs(rows[:, 4]))) <= {0.0, CFG.plant.constraints.j_max_y}


def test_profile_too_short(capsys):
    assert main(["profile", "--distance", "0.01"]) == EXIT_OK
    assert "too short" in capsys.readouterr().out


def test_sysid_table(capsys):
    assert main(["sysid"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["axis", "kv_cfg", "kv_fit", "vmax_cfg", "vmax_fit"]
    assert [line.split()[0] for line in out[1:4]] == ["x", "y", "h"]


def test_sysid_flags_unreliable_fit(monkeypatch, capsys):
    # a zero-length ramp is not quasi-static, so the kv fit is flagged
    monkeypatch.setattr(cli, "sysid_kv", partial(sysid_kv, ramp_duration=0.0))
    assert main(["sysid"]) == EXIT_USAGE
    assert "time constants" in capsys.readouterr().out


def test_run_from_path_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps([{"x_in": 0, "y_in": 0, "heading_rad": 0},
                             {"x_in": 12, "y_in": 24, "heading_rad": 1.0}]))
    code = main(["--out", str(tmp_path / "o"), "run", "--path", str(f), "--mode", "pid_only"])
    assert code == EXIT_OK
    assert "pid_only:" in capsys.readouterr().out
    assert (tmp_path / "o" / "run_pid_only.csv").exists()


def test_run_timeout_exit_code(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(default_config_text().replace("timeout = 30.0", "timeout = 0.2"))
    assert main(["--config", str(cfg), "run", "--distance", "9 ft"]) == EXIT_TIMEOUT


def test_usage_errors(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "missing.ini"), "sysid"]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text('[{"x_in": 0}]')
    assert main(["run", "--path", str(bad)]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["no-such-command"])
