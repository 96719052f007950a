"""JSON formats: matrix literals, channel files, graph files."""
import json
from pathlib import Path

import numpy as np

from .channel import Channel
from .errors import ValidationError
from .generators import RegularGraph, graph_from_edges


def matrix_to_literal(m):
    """[[ [re, im], ... ], ...] row by row."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_literal(rows, where="matrix"):
    try:
        m = np.array([[complex(float(e[0]), float(e[1])) for e in row] for row in rows])
    except (TypeError, ValueError, IndexError) as exc:
        raise ValidationError(f"{where}: entries must be [re, im] pairs ({exc})") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{where}: not a square matrix literal")
    if len(rows) and any(len(e) != 2 for row in rows for e in row):
        raise ValidationError(f"{where}: entries must have exactly two components")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{where}: non-finite entry")
    return m


def channel_to_dict(T: Channel):
    return {"dim": T.dim, "degree": T.degree,
            "unitaries": [matrix_to_literal(u) for u in T.unitaries]}


def channel_from_dict(doc) -> Channel:
    try:
        dim, degree, us = int(doc["dim"]), int(doc["degree"]), doc["unitaries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"channel document missing or bad field: {exc}") from exc
    if len(us) != degree:
        raise ValidationError(f"degree {degree} but {len(us)} unitaries")
    mats = [matrix_from_literal(u, f"unitaries[{j}]") for j, u in enumerate(us)]
    for j, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise ValidationError(f"unitaries[{j}] has shape {m.shape}, expected {(dim, dim)}")
    return Channel(tuple(mats))


def graph_to_dict(g: RegularGraph):
    return {"n": g.n, "edges": [list(e) for e in g.edges]}


def graph_from_dict(doc) -> RegularGraph:
    try:
        return graph_from_edges(int(doc["n"]), [tuple(e) for e in doc["edges"]])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"graph document missing or bad field: {exc}") from exc


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path is None:
        return text
    Path(path).write_text(text)
    return text


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_instance(path):
    """Channel or graph, chosen by the document's keys."""
    doc = load_json(path)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")
    if "edges" in doc:
        return graph_from_dict(doc)
    return channel_from_dict(doc)
