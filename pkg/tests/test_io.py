import json
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rosslerlab import io
from rosslerlab.manifolds import icosphere
from rosslerlab.symbols import SymbolSequence


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=6))
def test_float_text_roundtrip(vals):
    assert [float(io.fmt(v)) for v in vals] == vals


def test_csv_roundtrip(tmp_path):
    f = tmp_path / "t.csv"
    io.write_csv(f, io.TRAJECTORY_HEADER, [(0.0, 1.0, 2.0, 3.0), (0.1, 1 / 3, -2.5e-17, 1e300)])
    header, rows = io.read_csv(f)
    assert header == io.TRAJECTORY_HEADER
    assert float(rows[1][1]) == 1 / 3 and float(rows[1][3]) == 1e300
    assert f.read_bytes().count(b"\r") == 0


def test_header_only_csv(tmp_path):
    f = tmp_path / "empty.csv"
    io.write_csv(f, io.SCAN_HEADER, [])
    assert f.read_text() == ",".join(io.SCAN_HEADER) + "\n"


def test_jsonable_conversions():
    @dataclass
    class R:
        x: np.ndarray
        s: SymbolSequence
        z: complex

    out = io.to_jsonable({"r": R(np.array([1.0, np.inf]), SymbolSequence.parse("(12)"), 1 + 2j),
                          "n": np.int64(3), "b": np.bool_(True), "nan": float("nan")})
    assert out["r"]["x"] == [1.0, "inf"] and out["r"]["z"] == {"re": 1.0, "im": 2.0}
    assert out["n"] == 3 and out["b"] is True and out["nan"] == "nan"
    assert out["r"]["s"]["word"] == [1, 2]
    json.dumps(out)


def test_json_is_deterministic(tmp_path):
    a = io.dump_json({"b": 1, "a": [1.5, 2]})
    b = io.dump_json({"a": [1.5, 2], "b": 1}, tmp_path / "r.json")
    assert a == b == (tmp_path / "r.json").read_text()


def test_config_parsing(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("# comment\na = 0.2\nh-max = 0.05  # trailing\n\n")
    assert io.read_config(f) == {"a": "0.2", "h_max": "0.05"}
    f.write_text("no equals sign\n")
    with pytest.raises(ValueError):
        io.read_config(f)


def test_triangle_soup_roundtrip(tmp_path):
    tris = icosphere(subdivisions=1)
    f = tmp_path / "s.tri"
    io.write_triangle_soup(f, tris, comment="sphere\nunit")
    back = io.read_triangle_soup(f)
    assert np.array_equal(back, tris)
    f.write_text("1 2 3 4 5 6 7 8\n")
    with pytest.raises(ValueError):
        io.read_triangle_soup(f)
