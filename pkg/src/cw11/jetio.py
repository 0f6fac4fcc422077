"""File formats: JSON documents for all inputs and reports, CSV for plot data.

Jet files look like::

    {
      "dim": 1,
      "points": [
        {"x": [0.0], "f": 0.0, "g": [0.0]},
        {"x": [1.0], "f": 0.5, "g": [1.0]}
      ]
    }

Floats are written with Python's shortest round-trip ``repr``, so writing a
parsed canonical file reproduces it byte for byte.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .body import BodyData, BodyDataError
from .jet import Jet, JetError


class FileFormatError(ValueError):
    """Malformed input file; the message names the offending record."""


def _load(text: str, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{what}: top level must be an object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FileFormatError(f"{what}: 'dim' must be a positive integer, got {dim!r}")
    return doc


def _vector(v, dim: int, where: str) -> list[float]:
    if not isinstance(v, list) or len(v) != dim:
        raise FileFormatError(f"{where}: expected a list of {dim} numbers, got {v!r}")
    out = []
    for c in v:
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise FileFormatError(f"{where}: non-numeric or non-finite coordinate {c!r}")
        out.append(float(c))
    return out


def _scalar(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise FileFormatError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def _records(doc: dict, key: str, what: str) -> list:
    recs = doc.get(key)
    if not isinstance(recs, list):
        raise FileFormatError(f"{what}: '{key}' must be a list")
    return recs


def parse_jet(text: str) -> Jet:
    doc = _load(text, "jet file")
    dim = doc["dim"]
    xs, fs, gs = [], [], []
    for k, rec in enumerate(_records(doc, "points", "jet file")):
        where = f"jet file, record {k}"
        if not isinstance(rec, dict) or set(rec) != {"x", "f", "g"}:
            raise FileFormatError(f"{where}: expected keys x, f, g")
        xs.append(_vector(rec["x"], dim, where + " 'x'"))
        fs.append(_scalar(rec["f"], where + " 'f'"))
        gs.append(_vector(rec["g"], dim, where + " 'g'"))
    if not xs:
        raise FileFormatError("jet file: no points")
    try:
        return Jet(np.array(xs), np.array(fs), np.array(gs))
    except JetError as exc:
        raise FileFormatError(f"jet file: {exc}") from exc


def _fmt(v) -> str:
    return json.dumps(v, separators=(", ", ": "))


def format_jet(jet: Jet) -> str:
    lines = [_fmt({"x": [float(c) for c in e.x], "f": float(e.f), "g": [float(c) for c in e.g]})
             for e in jet.entries]
    return '{\n  "dim": %d,\n  "points": [\n    %s\n  ]\n}\n' % (jet.dim, ",\n    ".join(lines))


def parse_queries(text: str) -> np.ndarray:
    doc = _load(text, "queries file")
    dim = doc["dim"]
    Q = [_vector(q, dim, f"queries file, record {k}")
         for k, q in enumerate(_records(doc, "queries", "queries file"))]
    return np.array(Q, dtype=float).reshape(len(Q), dim)


def format_queries(Q) -> str:
    Q = np.asarray(Q, dtype=float)
    rows = ",\n    ".join(_fmt([float(c) for c in q]) for q in Q)
    body = f"\n    {rows}\n  " if len(Q) else ""
    return '{\n  "dim": %d,\n  "queries": [%s]\n}\n' % (Q.shape[1], body)


def parse_body(text: str) -> BodyData:
    doc = _load(text, "body file")
    dim = doc["dim"]
    ys, ns = [], []
    for k, rec in enumerate(_records(doc, "points", "body file")):
        where = f"body file, record {k}"
        if not isinstance(rec, dict) or set(rec) != {"y", "n"}:
            raise FileFormatError(f"{where}: expected keys y, n")
        ys.append(_vector(rec["y"], dim, where + " 'y'"))
        ns.append(_vector(rec["n"], dim, where + " 'n'"))
    if not ys:
        raise FileFormatError("body file: no points")
    try:
        return BodyData(np.array(ys), np.array(ns))
    except BodyDataError as exc:
        raise FileFormatError(f"body file: {exc}") from exc


def format_body(body: BodyData) -> str:
    lines = [_fmt({"y": [float(c) for c in y], "n": [float(c) for c in n]})
             for y, n in zip(body.points, body.normals)]
    return '{\n  "dim": %d,\n  "points": [\n    %s\n  ]\n}\n' % (body.dim, ",\n    ".join(lines))


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# --- reports -----------------------------------------------------------------

def to_jsonable(v: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return to_jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def from_jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {k: from_jsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [from_jsonable(x) for x in v]
    if isinstance(v, str) and v in _NONFINITE:
        return _NONFINITE[v]
    return v


@dataclass
class RunReport:
    command: list[str]
    status: str
    exit_code: int
    inputs: dict[str, str] = field(default_factory=dict)  # name -> sha256
    outputs: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(to_jsonable(asdict(self)), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**from_jsonable(json.loads(text)))


# --- CSV ---------------------------------------------------------------------

def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(c)) if not isinstance(c, (int, np.integer)) else int(c) for c in row])
    return buf.getvalue()


def points_csv(X, f, G) -> str:
    X, G = np.atleast_2d(X), np.atleast_2d(G)
    d = X.shape[1]
    header = [f"x_{i + 1}" for i in range(d)] + ["f"] + [f"g_{i + 1}" for i in range(d)]
    return _csv(header, (list(x) + [fx] + list(g) for x, fx, g in zip(X, f, G)))


def sweep_csv(rows) -> str:
    return _csv(["k", "tangent", "bound"], rows)
