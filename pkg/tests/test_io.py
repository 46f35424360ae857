import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dualmink import io
from dualmink.errors import FormatError, InvalidBody, InvalidMeasure
from dualmink.geometry import DiscreteMeasure, random_polytope


@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_body_round_trip_is_exact(tmp_path_factory, seed, dim):
    P = random_polytope(dim, 9, np.random.default_rng(seed))
    path = tmp_path_factory.mktemp("b") / "body.json"
    io.write_body(path, P)
    Q = io.read_body(path)
    np.testing.assert_array_equal(Q.normals, P.normals)
    np.testing.assert_array_equal(Q.supports, P.supports)


@given(st.lists(st.floats(1e-300, 1e300), min_size=3, max_size=3))
def test_measure_round_trip_is_exact(tmp_path_factory, w):
    V = [[1.0, 0.0], [-0.6, 0.8], [-0.6, -0.8]]
    mu = DiscreteMeasure(V, w)
    path = tmp_path_factory.mktemp("m") / "mu.json"
    io.write_measure(path, mu)
    nu = io.read_measure(path)
    np.testing.assert_array_equal(nu.weights, mu.weights)
    np.testing.assert_array_equal(nu.directions, mu.directions)


def test_float_format():
    assert io.dumps(0.1) == "0.10000000000000001"
    assert io.dumps({"a": [1, 2.5, 1e16, None, True]}) == '{"a": [1, 2.5, 10000000000000000.0, null, true]}'
    assert io.dumps(float("nan")) == "null"


def test_file_layouts(tmp_path, sq, square_measure):
    io.write_body(tmp_path / "b.json", sq)
    io.write_measure(tmp_path / "m.json", square_measure)
    b = json.loads((tmp_path / "b.json").read_text())
    m = json.loads((tmp_path / "m.json").read_text())
    assert set(b) == {"dim", "normals", "supports"} and b["dim"] == 2
    assert set(m) == {"dim", "atoms"} and set(m["atoms"][0]) == {"v", "w"}


@pytest.mark.parametrize("text,exc", [
    ("{", FormatError),
    ('{"dim": 2}', FormatError),
    ('{"dim": 2, "atoms": [{"v": [1, 0]}]}', InvalidMeasure),
    ('{"dim": 3, "atoms": [{"v": [1, 0], "w": 1}]}', InvalidMeasure),
    ('{"dim": 2, "atoms": [{"v": [2, 0], "w": 1}]}', InvalidMeasure),
])
def test_bad_measure_files(tmp_path, text, exc):
    (tmp_path / "m.json").write_text(text)
    with pytest.raises(exc):
        io.read_measure(tmp_path / "m.json")


@pytest.mark.parametrize("text,exc", [
    ("[]", FormatError),
    ('{"dim": 2, "normals": [[1, 0]]}', FormatError),
    ('{"dim": 2, "normals": [[1, 0], [0, 1]], "supports": [1, 1]}', InvalidBody),
])
def test_bad_body_files(tmp_path, text, exc):
    (tmp_path / "b.json").write_text(text)
    with pytest.raises(exc):
        io.read_body(tmp_path / "b.json")


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        io.read_body(tmp_path / "nope.json")
