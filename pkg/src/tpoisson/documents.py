"""JSON interchange for structure constants (format_version "1").

Tensors are stored as sorted sparse quadruples [i, j, k, c] with 1 <= c < p.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import TwoProductAlgebra
from .errors import UsageError
from .reps import Representation
from .superalg import OneProductAlgebra, SuperAlgebra

FORMAT_VERSION = "1"

__all__ = [
    "FORMAT_VERSION",
    "to_document",
    "from_document",
    "dumps",
    "loads",
    "save",
    "load",
    "sparse_entries",
    "dense_tensor",
]


def sparse_entries(t: np.ndarray) -> list:
    idx = np.argwhere(t != 0)
    return [[*map(int, ijk), int(t[tuple(ijk)])] for ijk in idx]


def dense_tensor(entries, shape, p: int, what: str) -> np.ndarray:
    t = np.zeros(shape, dtype=np.int64)
    seen = set()
    for e in entries:
        if not isinstance(e, list) or len(e) != len(shape) + 1 or not all(isinstance(v, int) for v in e):
            raise UsageError(f"{what}: malformed entry {e!r}")
        *ijk, c = e
        if any(not 0 <= v < n for v, n in zip(ijk, shape)):
            raise UsageError(f"{what}: index out of range in {e!r}")
        if not 1 <= c < p:
            raise UsageError(f"{what}: coefficient {c} not in [1, {p})")
        if tuple(ijk) in seen:
            raise UsageError(f"{what}: duplicate entry for {tuple(ijk)}")
        seen.add(tuple(ijk))
        t[tuple(ijk)] = c
    return t


def to_document(obj) -> dict:
    if isinstance(obj, TwoProductAlgebra):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "two_product",
            "p": obj.p,
            "dim": obj.dim,
            "basis_labels": list(obj.basis_labels),
            "circ": sparse_entries(obj.circ),
            "bracket": sparse_entries(obj.bracket),
            "flags": {"tp_verified": bool(obj.tp_verified)},
        }
    if isinstance(obj, SuperAlgebra):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "superalgebra",
            "p": obj.p,
            "dim": obj.dim,
            "product": sparse_entries(obj.product),
            "grading": {"even_dim": obj.even_dim, "odd_dim": obj.odd_dim},
        }
    if isinstance(obj, OneProductAlgebra):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "one_product",
            "p": obj.p,
            "dim": obj.dim,
            "product": sparse_entries(obj.product),
        }
    if isinstance(obj, Representation):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "representation",
            "p": obj.p,
            "module_dim": obj.module_dim,
            "algebra": to_document(obj.algebra),
            "alpha": sparse_entries(obj.alpha),
            "beta": sparse_entries(obj.beta),
        }
    raise UsageError(f"cannot serialise {type(obj).__name__}")


def _field(doc: dict, key: str, typ):
    if key not in doc:
        raise UsageError(f"document is missing {key!r}")
    val = doc[key]
    if not isinstance(val, typ) or isinstance(val, bool) and typ is int:
        raise UsageError(f"document field {key!r} has the wrong type")
    return val


def from_document(doc: dict):
    if not isinstance(doc, dict):
        raise UsageError("document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise UsageError(f"unsupported format_version {doc.get('format_version')!r}")
    kind = doc.get("kind", "two_product")
    p = _field(doc, "p", int)
    if kind == "representation":
        alg = from_document(_field(doc, "algebra", dict))
        m = _field(doc, "module_dim", int)
        shape = (alg.dim, m, m)
        return Representation(
            alg,
            dense_tensor(_field(doc, "alpha", list), shape, p, "alpha"),
            dense_tensor(_field(doc, "beta", list), shape, p, "beta"),
        )
    d = _field(doc, "dim", int)
    if d < 0:
        raise UsageError("dim must be non-negative")
    shape = (d, d, d)
    if kind == "two_product":
        labels = doc.get("basis_labels")
        if labels is not None and (not isinstance(labels, list) or len(labels) != d):
            raise UsageError("basis_labels must list one name per basis vector")
        flags = doc.get("flags", {})
        return TwoProductAlgebra(
            p,
            dense_tensor(_field(doc, "circ", list), shape, p, "circ"),
            dense_tensor(_field(doc, "bracket", list), shape, p, "bracket"),
            tuple(labels) if labels is not None else (),
            tp_verified=bool(flags.get("tp_verified", False)),
        )
    if kind == "superalgebra":
        g = _field(doc, "grading", dict)
        even, odd = g.get("even_dim"), g.get("odd_dim")
        if not isinstance(even, int) or not isinstance(odd, int) or even + odd != d:
            raise UsageError("grading must give even_dim + odd_dim = dim")
        return SuperAlgebra(p, even, odd, dense_tensor(_field(doc, "product", list), shape, p, "product"))
    if kind == "one_product":
        return OneProductAlgebra(p, dense_tensor(_field(doc, "product", list), shape, p, "product"))
    raise UsageError(f"unknown document kind {kind!r}")


def dumps(obj) -> str:
    return json.dumps(to_document(obj), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None
    return from_document(doc)


def save(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)
