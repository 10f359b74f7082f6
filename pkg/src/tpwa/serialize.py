"""JSON formats for data sets, templates and models.

Model files are written canonically (sorted keys, floats with 17 significant
digits, ``null`` for infinite offsets) so that read-then-write is
byte-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import AffinePiece, DataSet, PwaModel, DEFAULT_TOL
from .template import TemplateSpec


def canonical_json(obj) -> str:
    """Deterministic JSON text with fixed 17-significant-digit floats."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError("non-finite floats must be encoded as null before serialising")
        return format(v, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ", ".join(f"{json.dumps(str(k))}: {canonical_json(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(canonical_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dataset_to_dict(data: DataSet) -> dict:
    return {
        "d": data.d,
        "e": data.e,
        "points": [{"x": x.tolist(), "y": y.tolist()} for x, y in zip(data.X, data.Y)],
    }


def dataset_from_dict(obj: dict) -> DataSet:
    points = obj["points"]
    if not points:
        raise ValueError("data set has no points")
    data = DataSet(
        np.array([p["x"] for p in points], dtype=float),
        np.array([p["y"] for p in points], dtype=float),
    )
    if "d" in obj and int(obj["d"]) != data.d or "e" in obj and int(obj["e"]) != data.e:
        raise ValueError("declared d/e do not match the points")
    return data


def template_to_dict(t: TemplateSpec) -> dict:
    return {"kind": t.kind, "d": t.d, "components": t.weights.tolist()}


def template_from_dict(obj: dict) -> TemplateSpec:
    kind = obj.get("kind", "custom")
    t = TemplateSpec(kind, np.array(obj["components"], dtype=float))
    if "d" in obj and int(obj["d"]) != t.d:
        raise ValueError("declared template dimension does not match its components")
    return t


def _offset_out(c: np.ndarray) -> list:
    return [None if math.isinf(v) and v > 0 else float(v) for v in c]


def _offset_in(c: list) -> np.ndarray:
    return np.array([math.inf if v is None else float(v) for v in c])


def model_to_dict(model: PwaModel) -> dict:
    return {
        "template": template_to_dict(model.template),
        "epsilon": float(model.epsilon),
        "tol": float(model.tol),
        "pieces": [
            {
                "A": p.A.tolist(),
                "b": p.b.tolist(),
                "c": _offset_out(p.c),
                "support": list(p.support),
            }
            for p in model.pieces
        ],
    }


def model_from_dict(obj: dict) -> PwaModel:
    pieces = tuple(
        AffinePiece(
            np.array(p["A"], dtype=float),
            np.array(p["b"], dtype=float),
            _offset_in(p["c"]),
            p.get("support", ()),
        )
        for p in obj["pieces"]
    )
    return PwaModel(
        pieces,
        template_from_dict(obj["template"]),
        float(obj["epsilon"]),
        float(obj.get("tol", DEFAULT_TOL)),
    )


def write_json(obj: dict, path) -> None:
    text = canonical_json(obj) + "\n"
    if path in (None, "-"):
        print(text, end="")
    else:
        Path(path).write_text(text)


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def load_dataset(path) -> DataSet:
    return dataset_from_dict(read_json(path))


def save_dataset(data: DataSet, path) -> None:
    write_json(dataset_to_dict(data), path)


def load_model(path) -> PwaModel:
    return model_from_dict(read_json(path))


def save_model(model: PwaModel, path) -> None:
    write_json(model_to_dict(model), path)
