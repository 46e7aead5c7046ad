import math

import pytest

from holomotion.config import (
    ConfigError,
    default_config_text,
    load_config,
    loads_config,
    parse_length,
    parse_seeds,
)
from holomotion.scenarios import default_scenarios, l_path, s_curve, scenario_by_name, straight_path


@pytest.mark.parametrize("text, inches", [("9 ft", 108.0), ("12", 12.0), ("2.54 cm", 1.0), ("0.0254 m", 1.0),
                                          ("6in", 6.0)])
def test_parse_length(text, inches):
    assert parse_length(text) == pytest.approx(inches)


@pytest.mark.parametrize("bad", ["", "ft", "3 parsecs"])
def test_parse_length_rejects(bad):
    with pytest.raises(ConfigError):
        parse_length(bad)


def test_parse_seeds():
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    assert parse_seeds("3, 5 8") == [3, 5, 8]
    with pytest.raises(ConfigError):
        parse_seeds("5..1")


def test_default_config_contents():
    cfg = load_config()
    assert cfg.setpoint_distances == (12.0, 24.0, 36.0, 48.0, 72.0, 108.0)
    assert cfg.lookahead == 12.0
    assert cfg.sweep == (6.0, 8.0, 12.0, 16.0, 24.0)
    assert cfg.trials_per_cell == 10 and len(cfg.seeds) == 10
    assert cfg.criterion.threshold_in == 1.0
    assert cfg.acceptance.system_time_ratio == 0.85
    assert cfg.gains_for(True) != cfg.gains_for(False)


def test_load_from_file_matches_default(tmp_path):
    f = tmp_path / "c.ini"
    f.write_text(default_config_text())
    cfg = load_config(f)
    assert cfg.plant == load_config().plant
    assert cfg.source == str(f)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/holomotion.ini")


def test_missing_section_and_key():
    text = default_config_text()
    with pytest.raises(ConfigError, match="gains.pid"):
        loads_config(text.replace("[gains.pid]", "[gains.other]"))
    with pytest.raises(ConfigError, match="kv_x"):
        loads_config(text.replace("kv_x = 4.0", ""))


def test_too_few_seeds():
    text = default_config_text().replace("seeds = 1..10", "seeds = 1..3")
    with pytest.raises(ConfigError):
        loads_config(text)


def test_scenarios():
    names = [s.name for s in default_scenarios()]
    assert names == ["scenario1", "scenario2", "scenario3"]
    s1 = scenario_by_name("scenario1").path
    assert s1.length == pytest.approx(108.0)
    assert s1.end.heading == pytest.approx(math.pi / 2)
    lp = l_path(48.0)
    assert lp.length == pytest.approx(96.0)
    assert (lp.end.x, lp.end.y) == pytest.approx((-48.0, 48.0))
    assert abs(lp.end.heading) == pytest.approx(math.pi)
    sc = s_curve(120.0, 12.0)
    assert sc.length == pytest.approx(120.0, rel=1e-3)
    # heading swings up, back and up again
    h = [p.heading for p in sc.waypoints]
    d = [b - a for a, b in zip(h, h[1:])]
    changes = sum(1 for a, b in zip(d, d[1:]) if a * b < 0)
    assert changes == 2
    with pytest.raises(KeyError):
        scenario_by_name("nope")
    assert straight_path(24.0).end.y == 24.0
