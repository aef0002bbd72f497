"""File formats: CSV tables, JSON reports, key=value configs and triangle soups."""

from __future__ import annotations

import csv
import dataclasses
import enum
import json
import math
from pathlib import Path

import numpy as np

CROSSING_HEADER = ["t", "x", "y", "z", "side", "transversality"]
POLYLINE_HEADER = ["generation", "index", "x", "y", "z"]
KNEADING_HEADER = ["word", "c", "admissible", "c_sup"]
TRAJECTORY_HEADER = ["t", "x", "y", "z"]
SCAN_HEADER = ["param", "value", "status", "fold_x", "kneading", "pi_d", "n_per", "error"]


def fmt(v) -> str:
    """Shortest round-trip text for floats; everything else via str."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def crossing_rows(crossings):
    for c in crossings:
        yield (c.time, c.point[0], c.point[1], c.point[2], c.side, c.transversality)


def polyline_rows(polyline, generation=0):
    for i, s in enumerate(np.asarray(polyline).reshape(-1, 3)):
        yield (generation, i, s[0], s[1], s[2])


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.repr}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, Path):
        return str(obj)
    if obj is None or isinstance(obj, (str, int)):
        return obj
    return str(obj)


def dump_json(obj, path=None) -> str:
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_config(path) -> dict:
    """Plain ``key = value`` lines; '#' starts a comment. Values stay strings."""
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def read_triangle_soup(path) -> np.ndarray:
    """Nine floats per non-comment line: the three vertices of one triangle."""
    tris = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        vals = line.replace(",", " ").split()
        if len(vals) != 9:
            raise ValueError(f"{path}:{n}: expected 9 floats, got {len(vals)}")
        tris.append([float(v) for v in vals])
    return np.array(tris, dtype=float).reshape(-1, 3, 3)


def write_triangle_soup(path, tris, comment=None):
    tris = np.asarray(tris, dtype=float).reshape(-1, 9)
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for t in tris:
            fh.write(" ".join(fmt(v) for v in t) + "\n")
