"""JSON files for bodies, measures and solver reports.

Body:     {"dim": n, "normals": [[...], ...], "supports": [...]}
Measure:  {"dim": n, "atoms": [{"v": [...], "w": w}, ...]}

Floats are written with 17 significant digits so that a write/read cycle
reproduces every double exactly.
"""
import json
import math

import numpy as np

from .errors import FormatError, InvalidMeasure
from .geometry import DiscreteMeasure, Polytope


def _encode(obj):
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize non-finite value {x}")
        text = format(x, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "value"):  # enums
        return _encode(obj.value)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    """JSON text with 17-significant-digit floats; non-finite floats become null."""
    return _encode(_finite_or_none(obj))


def _finite_or_none(obj):
    if isinstance(obj, (float, np.floating)) and not math.isfinite(float(obj)):
        return None
    if isinstance(obj, dict):
        return {k: _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_none(v) for v in obj]
    return obj


def write_json(path, obj):
    text = dumps(obj) + "\n"
    if path is None or path == "-":
        print(text, end="")
        return
    with open(path, "w") as fh:
        fh.write(text)


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def body_to_dict(P):
    return {"dim": P.dim, "normals": P.normals, "supports": P.supports}


def body_from_dict(d):
    try:
        dim = int(d["dim"])
        normals = np.array(d["normals"], dtype=np.float64)
        supports = np.array(d["supports"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed body: {exc!r}") from None
    if normals.ndim != 2 or normals.shape[1] != dim:
        raise FormatError(f"body normals must be an (m, {dim}) array")
    return Polytope(normals, supports)


def measure_to_dict(mu):
    return {"dim": mu.dim,
            "atoms": [{"v": v, "w": w} for v, w in zip(mu.directions, mu.weights)]}


def measure_from_dict(d):
    try:
        dim = int(d["dim"])
        atoms = d["atoms"]
        iter(atoms)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed measure: {exc!r}") from None
    try:
        V = [[float(c) for c in a["v"]] for a in atoms]
        w = [float(a["w"]) for a in atoms]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMeasure(f"malformed atom: {exc!r}") from None
    if any(len(v) != dim for v in V):
        raise InvalidMeasure(f"every atom direction must have {dim} coordinates")
    return DiscreteMeasure(np.array(V).reshape(-1, dim), w)


def read_body(path):
    return body_from_dict(read_json(path))


def write_body(path, P):
    write_json(path, body_to_dict(P))


def read_measure(path):
    return measure_from_dict(read_json(path))


def write_measure(path, mu):
    write_json(path, measure_to_dict(mu))
