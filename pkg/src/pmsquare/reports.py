"""Report envelope shared by the CLI commands, plus deterministic renderers.

Every run produces one document ``{"command", "inputs", "results",
"pass"}``.  The JSON renderer sorts keys at every level and prints floats
with 17 significant digits, so identical runs emit byte-identical text;
the schema lives in docs/report-schema.json.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass
class Report:
    command: str
    inputs: dict[str, Any]
    results: dict[str, Any]
    passed: bool

    def to_document(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "pass": self.passed,
        }


def _format_float(value: float) -> str:
    if not np.isfinite(value):
        raise ValueError(f"reports must not contain non-finite numbers, got {value!r}")
    return format(value, ".17g")


def _render(value: Any, pieces: list[str]) -> None:
    if isinstance(value, dict):
        pieces.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            if i:
                pieces.append(",")
            pieces.append(json.dumps(key))
            pieces.append(":")
            _render(value[key], pieces)
        pieces.append("}")
    elif isinstance(value, (list, tuple)):
        pieces.append("[")
        for i, item in enumerate(value):
            if i:
                pieces.append(",")
            _render(item, pieces)
        pieces.append("]")
    elif isinstance(value, (bool, np.bool_)):
        pieces.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        pieces.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        pieces.append(_format_float(float(value)))
    elif isinstance(value, str):
        pieces.append(json.dumps(value))
    elif value is None:
        pieces.append("null")
    else:
        raise TypeError(f"cannot render {type(value).__name__} in a report")


def render_json(report: Report) -> str:
    pieces: list[str] = []
    _render(report.to_document(), pieces)
    return "".join(pieces)


def _render_text(value: Any, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list, tuple)) and item:
                lines.append(f"{pad}{key}:")
                _render_text(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key}: {_scalar_text(item)}")
    elif isinstance(value, (list, tuple)):
        for item in value:
            if isinstance(item, (dict, list, tuple)) and item:
                lines.append(f"{pad}-")
                _render_text(item, indent + 1, lines)
            else:
                lines.append(f"{pad}- {_scalar_text(item)}")
    else:
        lines.append(f"{pad}{_scalar_text(value)}")


def _scalar_text(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, (dict, list, tuple)):
        return "[]" if isinstance(value, (list, tuple)) else "{}"
    return str(value)


def render_text(report: Report) -> str:
    lines = [f"command: {report.command}"]
    if report.inputs:
        lines.append("inputs:")
        _render_text(report.inputs, 1, lines)
    lines.append("results:")
    _render_text(report.results, 1, lines)
    lines.append(f"pass: {'true' if report.passed else 'false'}")
    return "\n".join(lines)


def validate_envelope(document: dict[str, Any]) -> None:
    """Structural self-check mirroring docs/report-schema.json."""
    expected = {"command", "inputs", "results", "pass"}
    if set(document) != expected:
        raise ValueError(f"report fields {sorted(document)} != {sorted(expected)}")
    if not isinstance(document["command"], str):
        raise ValueError("report command must be a string")
    if not isinstance(document["inputs"], dict) or not isinstance(document["results"], dict):
        raise ValueError("report inputs/results must be objects")
    if not isinstance(document["pass"], bool):
        raise ValueError("report pass must be a boolean")
