import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kp2lab.report import DIAGNOSTICS_SCHEMA, SchemaError, emit_report, format_value, read_csv


def test_empty_rows_header_only(tmp_path):
    csv_path, jsonl_path, plot_path = emit_report([], ("a", "b"), str(tmp_path / "r"))
    assert open(csv_path).read() == "a,b\n"
    assert open(jsonl_path).read() == ""
    assert "r.csv" in open(plot_path).read()


def test_schema_mismatch(tmp_path):
    with pytest.raises(SchemaError):
        emit_report([{"a": 1}], ("a", "b"), str(tmp_path / "r"))
    with pytest.raises(SchemaError):
        emit_report([{"a": 1, "b": 2, "c": 3}], ("a", "b"), str(tmp_path / "r"))
    with pytest.raises(SchemaError):
        emit_report([], ("a", "a"), str(tmp_path / "r"))


def test_diagnostics_schema():
    assert DIAGNOSTICS_SCHEMA == ("iter", "residual", "rho", "I0", "I1")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=20))
def test_csv_round_trip_exact(tmp_path_factory, xs):
    d = tmp_path_factory.mktemp("rep")
    rows = [{"i": i, "x": x} for i, x in enumerate(xs)]
    csv_path, jsonl_path, _ = emit_report(rows, ("i", "x"), str(d / "r"))
    header, body = read_csv(csv_path)
    assert header == ["i", "x"]
    assert [float(r[1]) for r in body] == xs
    back = [json.loads(line) for line in open(jsonl_path)]
    for r, x in zip(back, xs):
        assert (float(r["x"]) if isinstance(r["x"], str) else r["x"]) == x


def test_nan_and_bool_formatting():
    assert format_value(float("nan")) == "nan"
    assert format_value(True) == "true"
    assert format_value(np.float64(0.1)) == "0.10000000000000001"
    assert format_value(np.int64(3)) == "3"


def test_plot_script_mentions_columns(tmp_path):
    _, _, plot = emit_report([{"t": 0.0, "I0": 1.0}], ("t", "I0"), str(tmp_path / "inv"))
    text = open(plot).read()
    assert "inv.csv" in text and "'I0'" in text
    compile(text, plot, "exec")
