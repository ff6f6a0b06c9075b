import json

import numpy as np
import pytest

from pmsquare.reports import Report, render_json, render_text, validate_envelope


def test_render_json_sorts_keys_and_round_trips():
    report = Report("ch", {"b": 1, "a": 2}, {"z": [1, 2.5], "m": {"y": True, "x": None}}, True)
    text = render_json(report)
    assert text.index('"inputs"') < text.index('"pass"') < text.index('"results"')
    assert text.index('"a"') < text.index('"b"')
    parsed = json.loads(text)
    assert parsed["pass"] is True
    assert parsed["results"]["m"] == {"y": True, "x": None}


def test_render_json_floats_carry_17_significant_digits():
    value = 1.0 / 3.0
    report = Report("ch", {}, {"v": value}, True)
    text = render_json(report)
    assert format(value, ".17g") in text
    assert json.loads(text)["results"]["v"] == value  # round-trip exact


def test_render_json_handles_numpy_scalars():
    report = Report(
        "ch", {}, {"f": np.float64(0.5), "i": np.int64(3), "b": np.bool_(True)}, True
    )
    assert json.loads(render_json(report))["results"] == {"f": 0.5, "i": 3, "b": True}


def test_render_json_rejects_non_finite_and_odd_types():
    with pytest.raises(ValueError):
        render_json(Report("ch", {}, {"v": float("nan")}, True))
    with pytest.raises(TypeError):
        render_json(Report("ch", {}, {"v": object()}, True))
    with pytest.raises(TypeError):
        render_json(Report("ch", {}, {1: "non-string key"}, True))


def test_render_json_is_deterministic():
    report = Report("verify", {}, {"values": [0.1, 0.2, {"k": 1 / 7}]}, False)
    assert render_json(report) == render_json(report)


def test_render_text_mentions_pass_and_command():
    text = render_text(Report("verify", {}, {"ok": True}, True))
    assert text.startswith("command: verify")
    assert text.endswith("pass: true")


def test_validate_envelope():
    good = Report("verify", {}, {}, True).to_document()
    validate_envelope(good)
    with pytest.raises(ValueError):
        validate_envelope({"command": "verify", "inputs": {}, "results": {}})
    with pytest.raises(ValueError):
        validate_envelope({**good, "pass": "yes"})
    with pytest.raises(ValueError):
        validate_envelope({**good, "extra": 1})
