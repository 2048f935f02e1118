"""JSON documents for spaces, function spaces, operators and reports.

Rationals travel as "p/q" strings (integers as "p"). Every document carries
``"format": 1``. A ``space`` field may hold an inline space document or a
path to one, resolved relative to the referring file.
"""
from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .function_space import FunctionElement, FunctionSpace, PointSet
from .isometry_engine import BlockOperator, Decomposition
from .polyhedral_space import NormedSpace, build_space
from .rational import fmt, mat, vec
from .st_norm_layer import FiniteMetric, MaxNormSpec

FORMAT = 1


class FormatError(ValueError):
    pass


def _q_list(v) -> list:
    return [fmt(x) for x in v]


def _q_matrix(m) -> list:
    return [_q_list(r) for r in m]


def _check_format(doc: dict, what: str) -> None:
    if not isinstance(doc, dict):
        raise FormatError(f"{what} must be a JSON object")
    if doc.get("format", FORMAT) != FORMAT:
        raise FormatError(f"unsupported {what} format {doc.get('format')!r}")


# -- spaces --------------------------------------------------------------------


def space_to_doc(E: NormedSpace) -> dict:
    return {
        "format": FORMAT,
        "dim": E.dim,
        "vertices": _q_matrix(E.vertices),
        "facets": _q_matrix(E.normals),
    }


def space_from_doc(doc: dict) -> NormedSpace:
    _check_format(doc, "space")
    try:
        dim = doc["dim"]
        verts = doc.get("vertices")
        facets = doc.get("facets")
        return build_space(
            int(dim),
            [vec(v) for v in verts] if verts is not None else None,
            [vec(a) for a in facets] if facets is not None else None,
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad space document: {exc}") from exc


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _resolve_space(ref, base: Path | None) -> NormedSpace:
    if isinstance(ref, str):
        p = Path(ref)
        if base is not None and not p.is_absolute():
            p = base / p
        return space_from_doc(load_json(p))
    return space_from_doc(ref)


# -- function spaces and specs -------------------------------------------------


def metric_to_doc(m: FiniteMetric) -> dict:
    labels = m.points.labels
    return {
        "distances": [
            [labels[i], labels[j], fmt(m.table[i][j])] for i in range(len(labels)) for j in range(i + 1, len(labels))
        ]
    }


def fspace_to_doc(fs: FunctionSpace, metric: FiniteMetric | None = None) -> dict:
    doc = {"points": list(fs.points.labels), "space": space_to_doc(fs.space)}
    if metric is not None:
        doc["seminorm"] = {"type": "lipschitz", "metric": metric_to_doc(metric)}
    return doc


def spec_from_doc(doc: dict, base: Path | None = None) -> MaxNormSpec:
    """Function space (with optional seminorm) from a domain/codomain object."""
    if not isinstance(doc, dict):
        raise FormatError("function space must be a JSON object")
    try:
        pts = PointSet(tuple(str(p) for p in doc["points"]))
        fs = FunctionSpace(pts, _resolve_space(doc["space"], base))
        sn = doc.get("seminorm")
        if sn is None or sn.get("type") == "zero":
            return MaxNormSpec(fs)
        if sn.get("type") != "lipschitz":
            raise FormatError(f"unknown seminorm type {sn.get('type')!r}")
        pairs = [(str(x), str(y), vec([d])[0]) for x, y, d in sn["metric"]["distances"]]
        return MaxNormSpec(fs, FiniteMetric.from_pairs(pts, pairs))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad function space: {exc}") from exc


def spec_to_doc(spec: MaxNormSpec) -> dict:
    doc = fspace_to_doc(spec.fspace, spec.metric)
    doc["format"] = FORMAT
    return doc


def element_to_doc(f: FunctionElement) -> dict:
    return {
        "format": FORMAT,
        "points": list(f.fspace.points.labels),
        "space": space_to_doc(f.fspace.space),
        "values": {x: _q_list(v) for x, v in zip(f.fspace.points, f.values)},
    }


def element_from_doc(doc: dict, base: Path | None = None) -> FunctionElement:
    _check_format(doc, "function element")
    spec = spec_from_doc(doc, base)
    try:
        return spec.fspace.element({str(k): vec(v) for k, v in doc["values"].items()})
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad function element: {exc}") from exc


# -- operators -----------------------------------------------------------------


def operator_to_doc(T: BlockOperator, specA: MaxNormSpec | None = None, specB: MaxNormSpec | None = None) -> dict:
    return {
        "format": FORMAT,
        "domain": fspace_to_doc(T.domain, specA.metric if specA else None),
        "codomain": fspace_to_doc(T.codomain, specB.metric if specB else None),
        "matrix": _q_matrix(T.matrix),
    }


def operator_from_doc(doc: dict, base: Path | None = None) -> tuple[BlockOperator, MaxNormSpec, MaxNormSpec]:
    _check_format(doc, "operator")
    try:
        A = spec_from_doc(doc["domain"], base)
        B = spec_from_doc(doc["codomain"], base)
        return BlockOperator(A.fspace, B.fspace, mat(doc["matrix"])), A, B
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad operator document: {exc}") from exc


def wc_from_doc(doc: dict, base: Path | None = None):
    """(domain spec, codomain spec, phi, fibers) from a weighted-composition document."""
    _check_format(doc, "weighted composition")
    try:
        A = spec_from_doc(doc["domain"], base)
        B = spec_from_doc(doc["codomain"], base)
        phi = {str(y): str(x) for y, x in doc["phi"].items()}
        fibers = {str(y): mat(m) for y, m in doc["fibers"].items()}
        return A, B, phi, fibers
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"bad weighted-composition document: {exc}") from exc


def decomposition_to_doc(D: Decomposition) -> dict:
    return {
        "phi": dict(D.phi),
        "fibers": {y: _q_matrix(V) for y, V in D.fibers.items()},
        "certificates": [
            {"facet": c.facet_id, "y": c.y, "x": c.x, "covector": _q_list(c.covector)} for c in D.certificates
        ],
        "codomain_has_Dw": D.codomain_has_dw,
    }


# -- generic conversion and digests --------------------------------------------


def jsonable(obj):
    """Recursively turn results into JSON-ready values with "p/q" rationals."""
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, FunctionElement):
        return {x: _q_list(v) for x, v in zip(obj.fspace.points, obj.values)}
    if isinstance(obj, Decomposition):
        return decomposition_to_doc(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(x) for x in items]
    return obj


def canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(*docs) -> str:
    h = hashlib.sha256()
    for d in docs:
        h.update(canonical(d).encode())
        h.update(b"\n")
    return "sha256:" + h.hexdigest()
