"""JSON field files.

A file holds either a stream function or a vector field::

    {"alpha": 1.0, "kind": "streamfunction", "modes": [{"k": [1, 0], "re": 0.5, "im": 0.0}, ...]}
    {"alpha": 1.0, "kind": "vector", "modes_x": [...], "modes_y": [...]}

Mirror modes may be omitted; they are filled in on read. Floats are written
with ``repr`` so a read-write cycle is exact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .operators import perp_grad
from .torus import TorusGeometry, TrigScalar, VectorField, trig_from_modes


class FieldFormatError(ValueError):
    pass


def _modes_to_json(f: TrigScalar) -> list:
    return [{"k": [int(k[0]), int(k[1])], "re": float(c.real), "im": float(c.imag)}
            for k, c in zip(f.keys, f.coeffs)]


def _modes_from_json(geom: TorusGeometry, entries) -> TrigScalar:
    if not isinstance(entries, list):
        raise FieldFormatError("modes must be a list")
    pairs = []
    for e in entries:
        try:
            k = e["k"]
            if len(k) != 2 or any(isinstance(x, bool) or int(x) != x for x in k):
                raise FieldFormatError(f"bad wavevector {k!r}")
            pairs.append(((int(k[0]), int(k[1])), complex(float(e["re"]), float(e.get("im", 0.0)))))
        except (KeyError, TypeError) as exc:
            raise FieldFormatError(f"malformed mode entry {e!r}") from exc
    try:
        return trig_from_modes(geom, pairs)
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc


def field_to_dict(field) -> dict:
    if isinstance(field, TrigScalar):
        return {"alpha": field.geometry.alpha, "kind": "streamfunction",
                "modes": _modes_to_json(field)}
    if isinstance(field, VectorField):
        return {"alpha": field.geometry.alpha, "kind": "vector",
                "modes_x": _modes_to_json(field.x), "modes_y": _modes_to_json(field.y)}
    raise TypeError(f"cannot serialize {type(field).__name__}")


def field_from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise FieldFormatError("field document must be a JSON object")
    try:
        alpha = float(doc["alpha"])
        kind = doc["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldFormatError("field document needs numeric 'alpha' and 'kind'") from exc
    if not math.isfinite(alpha) or alpha <= 0:
        raise FieldFormatError(f"alpha must be positive, got {alpha!r}")
    geom = TorusGeometry(alpha)
    if kind == "streamfunction":
        return _modes_from_json(geom, doc.get("modes"))
    if kind == "vector":
        return VectorField(_modes_from_json(geom, doc.get("modes_x")),
                           _modes_from_json(geom, doc.get("modes_y")))
    raise FieldFormatError(f"unknown field kind {kind!r}")


def dumps(field) -> str:
    return json.dumps(field_to_dict(field), indent=1)


def write_field(field, path) -> None:
    Path(path).write_text(dumps(field) + "\n")


def read_field(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FieldFormatError(f"{path}: not valid JSON ({exc})") from exc
    return field_from_dict(doc)


def read_velocity(path) -> VectorField:
    """Read a field file as a velocity; stream functions go through ``perp_grad``."""
    f = read_field(path)
    return perp_grad(f) if isinstance(f, TrigScalar) else f
