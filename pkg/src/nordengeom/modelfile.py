"""JSON model files.

A model file looks like::

    {
      "format": "nordengeom-model/1",
      "label": "w3 dim=4 seed=7",
      "dim": 4,
      "structure_constants": [[0, 1, 2, 0.5], ...],
      "metric": [[...], ...],
      "J": [[...], ...]
    }

A record ``[i, j, k, c]`` means ``[e_i, e_j] = c e_k`` (0-based). Omitted
entries are zero and the antisymmetric partner ``[j, i, k, -c]`` may be left
out. ``J[m][j]`` is the ``e_m`` component of ``J e_j``.

Floats are written with Python's shortest round-trip representation, so a
write/read cycle is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import AntisymmetryViolation, ParseError
from .lie import validate_lie_algebra
from .model import NordenModel
from .structure import validate_norden

FORMAT = "nordengeom-model/1"
CONFLICT_TOL = 1e-15


def brackets_from_records(dim: int, records) -> np.ndarray:
    """Dense ``C[i, j, k]`` from sparse records, completing antisymmetry."""
    C = np.zeros((dim, dim, dim))
    seen: dict[tuple[int, int, int], float] = {}
    for rec in records:
        if not isinstance(rec, (list, tuple)) or len(rec) != 4:
            raise ParseError(f"structure constant record must be [i, j, k, value], got {rec!r}")
        i, j, k, val = rec
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j, k)):
            raise ParseError(f"indices must be integers in {rec!r}")
        if not all(0 <= v < dim for v in (i, j, k)):
            raise ParseError(f"index out of range [0, {dim}) in {rec!r}")
        try:
            val = float(val)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad value in {rec!r}") from exc
        if not np.isfinite(val):
            raise ParseError(f"non-finite value in {rec!r}")
        if i == j:
            if val != 0.0:
                raise AntisymmetryViolation(f"[e_{i}, e_{i}] has nonzero component {val}")
            continue
        for key, v in (((i, j, k), val), ((j, i, k), -val)):
            if key in seen and abs(seen[key] - v) > CONFLICT_TOL:
                raise ParseError(f"conflicting entries for C[{key}]: {seen[key]} vs {v}")
            seen[key] = v
            C[key] = v
    return C


def records_from_brackets(C) -> list[list]:
    C = np.asarray(C)
    dim = C.shape[0]
    return [
        [i, j, k, float(C[i, j, k])]
        for i in range(dim)
        for j in range(i + 1, dim)
        for k in range(dim)
        if C[i, j, k] != 0.0
    ]


def _matrix(doc, key, dim):
    try:
        M = np.array(doc[key], dtype=float)
    except KeyError as exc:
        raise ParseError(f"missing field {key!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {key!r} is not a numeric matrix") from exc
    if M.shape != (dim, dim):
        raise ParseError(f"field {key!r} must be {dim}x{dim}, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ParseError(f"field {key!r} has non-finite entries")
    return M


def parse_model(text: str) -> dict:
    """Parse model JSON into raw arrays, without geometric validation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("model file must hold a JSON object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2 or dim % 2:
        raise ParseError(f"dim must be an even integer >= 2, got {dim!r}")
    records = doc.get("structure_constants", [])
    if not isinstance(records, list):
        raise ParseError("structure_constants must be a list of records")
    return {
        "label": str(doc.get("label", "")),
        "dim": dim,
        "C": brackets_from_records(dim, records),
        "metric": _matrix(doc, "metric", dim),
        "J": _matrix(doc, "J", dim),
    }


def model_from_raw(raw: dict) -> NordenModel:
    """Validate raw arrays; raises the specific invariant error on failure."""
    alg = validate_lie_algebra(raw["C"])
    s = validate_norden(raw["J"], raw["metric"])
    return NordenModel(alg, s, label=raw["label"])


def read_model(path) -> NordenModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return model_from_raw(parse_model(text))


def model_to_dict(model: NordenModel, extra: dict | None = None) -> dict:
    doc = {
        "format": FORMAT,
        "label": model.label,
        "dim": model.dim,
        "structure_constants": records_from_brackets(model.algebra.structure_constants),
        "metric": model.structure.g.tolist(),
        "J": model.structure.J.tolist(),
    }
    if extra:
        doc.update(extra)
    return doc


def dumps(doc: dict) -> str:
    """Deterministic JSON text; refuses NaN and infinities."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
