import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kp2lab.config import KEYS, ConfigError, RunConfig, load_config, parse_config


def test_defaults():
    cfg = parse_config("")
    for key, spec in KEYS.items():
        if key != "output.dir":
            assert cfg[key] == spec.default
    assert cfg["output.dir"]


def test_output_dir_env(monkeypatch):
    monkeypatch.setenv("KP2_OUTPUT_DIR", "/tmp/somewhere")
    assert RunConfig()["output.dir"] == "/tmp/somewhere"
    assert parse_config("output.dir = here")["output.dir"] == "here"


def test_parse_values_and_comments():
    text = """
    # a comment
    grid.nx = 64   # trailing comment
    domain.Lx = 12.5
    solver.quadrature = trapezoid
    estimate.N1 = 4
    estimate.N2 = none
    """
    cfg = parse_config(text)
    assert cfg["grid.nx"] == 64
    assert cfg["domain.Lx"] == 12.5
    assert cfg["solver.quadrature"] == "trapezoid"
    assert cfg["estimate.N1"] == 4.0
    assert cfg["estimate.N2"] is None


def test_override_wins():
    cfg = parse_config("grid.nx = 64", ["grid.nx=32"])
    assert cfg["grid.nx"] == 32


@pytest.mark.parametrize("text,key,line", [
    ("grid.nx = 64\ngrid.bogus = 3", "grid.bogus", "2"),
    ("grid.ny = 7", "grid.ny", "1"),
    ("\n\ntime.nodes = 48", "time.nodes", "3"),
    ("solver.quadrature = gauss", "solver.quadrature", "1"),
    ("time.T = -1", "time.T", "1"),
    ("time.T = nan", "time.T", "1"),
    ("estimate.N1 = 3", "estimate.N1", "1"),
    ("grid.nx = 1.5", "grid.nx", "1"),
    ("grid.nx = 8\ngrid.nx = 16", "grid.nx", "2"),
])
def test_errors_name_line_and_key(text, key, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert str(info.value.line) == line
    assert f"line {line}" in str(info.value) and f"'{key}'" in str(info.value)


def test_missing_equals():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("grid.nx 64")


def test_override_errors():
    with pytest.raises(ConfigError, match="--set #2"):
        parse_config("", ["grid.nx=16", "grid.nope=1"])


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.cfg"))


def test_solver_and_estimate_views():
    cfg = parse_config("grid.nx = 32\ngrid.ny = 16\ntime.nodes = 16\ndata.seed = 9\n"
                       "estimate.name = bilinear_N1N2\nestimate.N1 = 1\nestimate.N2 = 4")
    sc = cfg.solver_config(brackets=False)
    assert (sc.nx, sc.ny, sc.nodes, sc.data.seed) == (32, 16, 16, 9)
    es = cfg.estimate_spec()
    assert (es.nx, es.N1, es.N2, es.seed) == (32, 1.0, 4.0, 9)
    assert math.isclose(es.T, 1.0)


_line = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\n"),
                max_size=40)


@settings(max_examples=500, deadline=None)
@given(st.lists(_line, max_size=6))
def test_parser_is_total(lines):
    try:
        parse_config("\n".join(lines))
    except ConfigError as exc:
        assert "line" in str(exc)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(sorted(KEYS)), _line)
def test_every_key_value_is_handled(key, raw):
    try:
        parse_config(f"{key} = {raw}")
    except ConfigError as exc:
        assert key in str(exc) and "line 1" in str(exc)
