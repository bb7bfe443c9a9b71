import json

import numpy as np
import pytest

from conjscan.fieldio import (
    FieldFormatError,
    dumps,
    field_from_dict,
    field_to_dict,
    read_field,
    read_velocity,
    write_field,
)
from conjscan.kolmogorov import KolmogorovParams, kolmogorov_field, kolmogorov_stream
from conjscan.operators import perp_grad
from conjscan.torus import TorusGeometry

from conftest import random_stream, random_vector


def test_round_trip_is_exact(tmp_path, rng):
    g = TorusGeometry(0.37)
    for f in (random_stream(g, rng, mean=True), random_vector(g, rng)):
        path = tmp_path / "f.json"
        write_field(f, path)
        back = read_field(path)
        assert type(back) is type(f)
        assert dumps(back) == dumps(f)
        assert back.geometry == f.geometry


def test_stream_read_as_velocity(tmp_path):
    p = KolmogorovParams(6, 2, 1)
    path = tmp_path / "psi.json"
    write_field(kolmogorov_stream(p), path)
    assert read_velocity(path).allclose(kolmogorov_field(p), atol=0)


def test_missing_mirrors_completed():
    doc = {"alpha": 1.0, "kind": "streamfunction", "modes": [{"k": [1, 0], "re": 0.0, "im": 0.5}]}
    f = field_from_dict(doc)
    assert f.coeff(-1, 0) == -0.5j


@pytest.mark.parametrize("doc", [
    [],
    {"kind": "vector"},
    {"alpha": 0, "kind": "streamfunction", "modes": []},
    {"alpha": "x", "kind": "streamfunction", "modes": []},
    {"alpha": 1, "kind": "tensor"},
    {"alpha": 1, "kind": "streamfunction", "modes": {}},
    {"alpha": 1, "kind": "streamfunction", "modes": [{"k": [1], "re": 1}]},
    {"alpha": 1, "kind": "streamfunction", "modes": [{"k": [1.5, 0], "re": 1}]},
    {"alpha": 1, "kind": "streamfunction", "modes": [{"k": [1, 0]}]},
    {"alpha": 1, "kind": "streamfunction",
     "modes": [{"k": [1, 0], "re": 1}, {"k": [-1, 0], "re": 2}]},
])
def test_malformed_documents(doc):
    with pytest.raises(FieldFormatError):
        field_from_dict(doc)


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(FieldFormatError):
        read_field(p)
    with pytest.raises(TypeError):
        field_to_dict(3.0)
