"""JSON documents for graphs, transforms, transformed graphs and reports.

Complex entries are ``[re, im]`` pairs, quantum matrices are row-major in
canonical label order, classical tables are flat row-major in neighbor order.
Floats are written by ``json`` with the shortest repr that round-trips, so
``dumps(parse(text)) == text`` for any text this module produced.
"""
from __future__ import annotations

import json
import math

import jsonschema
import numpy as np

from .classical import (
    ClassicalEdgeTransform,
    ClassicalFactor,
    ClassicalFactorGraph,
    ClassicalVariable,
    TransformedClassicalGraph,
)
from .errors import DocumentError
from .linalg import LabeledOperator, base_label
from .qholo import EdgeTransform, QuantumTransformSet
from .quantum import QuantumFactor, QuantumFactorGraph, QuantumVariable
from .report import HolantReport

VERSION = 1

_NUM = {"type": "number"}
_CPLX = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_CMAT = {"type": "array", "items": {"type": "array", "items": _CPLX}}
_RMAT = {"type": "array", "items": {"type": "array", "items": _NUM}}
_VEC = {"type": "array", "items": _NUM}
_ID = {"type": "string", "minLength": 1}
_EDGE = {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}


def _header(fmt):
    return {
        "format": {"const": fmt},
        "version": {"const": VERSION},
        "kind": {"enum": ["classical", "quantum"]},
    }


GRAPH_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "kind", "variables", "factors"],
    "additionalProperties": False,
    "properties": {
        **_header("qholant-graph"),
        "variables": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "dim"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "dim": {"type": "integer", "minimum": 1},
                    "weights": _VEC,
                    "matrix": _CMAT,
                },
            },
        },
        "factors": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "neighbors"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "neighbors": {"type": "array", "items": _ID},
                    "table": _VEC,
                    "matrix": _CMAT,
                },
            },
        },
    },
}

TRANSFORM_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "kind", "edges"],
    "additionalProperties": False,
    "properties": {
        **_header("qholant-transforms"),
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["variable", "factor", "phi", "phi_hat"],
                "additionalProperties": False,
                "properties": {
                    "variable": _ID,
                    "factor": _ID,
                    "mode": {"enum": ["STRONG", "DIAGONAL", "BIORTHOGONAL"]},
                    "phi": {"anyOf": [_RMAT, _CMAT]},
                    "phi_hat": {"anyOf": [_RMAT, _CMAT]},
                },
            },
        },
    },
}

_NUMMAP = {"type": "object", "additionalProperties": _NUM}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "tool_version", "seed", "wall_clock", "tolerances", "report"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": "qholant-report"},
        "version": {"const": VERSION},
        "tool_version": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "wall_clock": _NUM,
        "tolerances": _NUMMAP,
        "report": {
            "type": "object",
            "required": ["kind", "verdict", "z_original", "z_transformed", "discrepancy"],
            "properties": {
                "kind": {"enum": ["classical", "quantum"]},
                "verdict": {"enum": ["PASS", "FAIL", "EXPLORATORY"]},
                "z_original": _CPLX,
                "z_transformed": _CPLX,
                "discrepancy": _NUM,
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["variable", "factor", "mode", "residual"],
                        "properties": {"variable": _ID, "factor": _ID, "mode": {"type": "string"}, "residual": _NUM},
                    },
                },
                "node_commutation": _NUMMAP,
                "factor_commutation": _NUM,
                "factor_dephasing": _NUMMAP,
                "transposed_discrepancy": _NUM,
                "form_disagreement": _NUM,
                "order_sensitivity": _NUM,
                "failures": {"type": "array", "items": {"type": "string"}},
                "failed_edges": {"type": "array", "items": _EDGE},
            },
        },
    },
}

SCHEMAS = {
    "qholant-graph": GRAPH_SCHEMA,
    "qholant-transforms": TRANSFORM_SCHEMA,
    "qholant-report": REPORT_SCHEMA,
}


# --- low level ----------------------------------------------------------------

def dumps(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def loads(text: str, schema=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if schema is not None:
        validate(doc, schema)
    return doc


def validate(doc, schema):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise DocumentError(e.message, e.json_path)


def read_json(path, schema=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(exc.strerror or str(exc), str(path)) from None
    return loads(text, schema)


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


def _num(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DocumentError(f"non-finite value {x}")
    return x


def complex_to_json(z):
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def matrix_to_json(m):
    m = np.asarray(m)
    return [[complex_to_json(x) for x in row] for row in m]


def real_matrix_to_json(m):
    return [[_num(x) for x in row] for row in np.asarray(m)]


def _matrix(payload, where, shape=None):
    a = np.asarray(payload, dtype=float)
    if a.ndim == 3 and a.shape[2] == 2:
        a = a[..., 0] + 1j * a[..., 1]
    elif a.ndim != 2:
        raise DocumentError("expected a matrix", where)
    if shape is not None and a.shape != tuple(shape):
        raise DocumentError(f"matrix has shape {a.shape}, expected {tuple(shape)}", where)
    return a


# --- graphs -------------------------------------------------------------------

def graph_to_doc(g) -> dict:
    if isinstance(g, ClassicalFactorGraph):
        return {
            "format": "qholant-graph",
            "version": VERSION,
            "kind": "classical",
            "variables": [
                {"id": v.id, "dim": v.size, "weights": [_num(x) for x in v.weights]} for v in g.variables
            ],
            "factors": [
                {"id": f.id, "neighbors": list(f.neighbors), "table": [_num(x) for x in f.table.ravel()]}
                for f in g.factors
            ],
        }
    return {
        "format": "qholant-graph",
        "version": VERSION,
        "kind": "quantum",
        "variables": [{"id": v.id, "dim": v.dim, "matrix": matrix_to_json(v.op.matrix)} for v in g.variables],
        "factors": [
            {"id": f.id, "neighbors": list(f.neighbors), "matrix": matrix_to_json(f.op.matrix)} for f in g.factors
        ],
    }


def doc_to_graph(doc):
    """Build and validate a graph; invariant violations propagate as ``InvariantError``."""
    validate(doc, GRAPH_SCHEMA)
    dims = {}
    for k, v in enumerate(doc["variables"]):
        if v["id"] in dims:
            raise DocumentError(f"duplicate variable id {v['id']}", f"$.variables[{k}]")
        dims[v["id"]] = v["dim"]
    for k, f in enumerate(doc["factors"]):
        for i in f["neighbors"]:
            if i not in dims:
                raise DocumentError(f"unknown variable {i}", f"$.factors[{k}].neighbors")

    if doc["kind"] == "classical":
        variables = []
        for k, v in enumerate(doc["variables"]):
            w = v.get("weights")
            if w is None or len(w) != v["dim"]:
                raise DocumentError(f"expected {v['dim']} weights", f"$.variables[{k}]")
            variables.append(ClassicalVariable(v["id"], np.array(w, dtype=float)))
        factors = []
        for k, f in enumerate(doc["factors"]):
            shape = [dims[i] for i in f["neighbors"]]
            t = f.get("table")
            if t is None or len(t) != math.prod(shape):
                raise DocumentError(f"expected {math.prod(shape)} table entries", f"$.factors[{k}]")
            factors.append(ClassicalFactor(f["id"], tuple(f["neighbors"]), np.array(t, dtype=float).reshape(shape)))
        return ClassicalFactorGraph(tuple(variables), tuple(factors))

    variables = []
    for k, v in enumerate(doc["variables"]):
        where = f"$.variables[{k}].matrix"
        if "matrix" not in v:
            raise DocumentError("missing matrix", f"$.variables[{k}]")
        variables.append(QuantumVariable.from_matrix(v["id"], _matrix(v["matrix"], where, (v["dim"], v["dim"]))))
    factors = []
    for k, f in enumerate(doc["factors"]):
        where = f"$.factors[{k}].matrix"
        if "matrix" not in f:
            raise DocumentError("missing matrix", f"$.factors[{k}]")
        labels = sorted((base_label(i, dims[i]) for i in f["neighbors"]), key=lambda lab: lab.key)
        d = math.prod(lab.dim for lab in labels)
        m = _matrix(f["matrix"], where, (d, d))
        factors.append(QuantumFactor(f["id"], tuple(f["neighbors"]), LabeledOperator(labels, m)))
    return QuantumFactorGraph(tuple(variables), tuple(factors))


def parse_graph(path):
    return doc_to_graph(read_json(path, GRAPH_SCHEMA))


def write_graph(path, g):
    write_json(path, graph_to_doc(g))


# --- transforms ---------------------------------------------------------------

def transforms_to_doc(ts) -> dict:
    if isinstance(ts, QuantumTransformSet):
        return {
            "format": "qholant-transforms",
            "version": VERSION,
            "kind": "quantum",
            "edges": [
                {
                    "variable": t.variable,
                    "factor": t.factor,
                    "mode": t.mode,
                    "phi": matrix_to_json(t.phi.cj.matrix),
                    "phi_hat": matrix_to_json(t.phi_hat.cj.matrix),
                }
                for t in ts
            ],
        }
    items = list(ts.values()) if isinstance(ts, dict) else list(ts)
    return {
        "format": "qholant-transforms",
        "version": VERSION,
        "kind": "classical",
        "edges": [
            {
                "variable": t.variable,
                "factor": t.factor,
                "mode": "BIORTHOGONAL",
                "phi": real_matrix_to_json(t.phi),
                "phi_hat": real_matrix_to_json(t.phi_hat),
            }
            for t in items
        ],
    }


def doc_to_transforms(doc):
    validate(doc, TRANSFORM_SCHEMA)
    out = []
    for k, e in enumerate(doc["edges"]):
        where = f"$.edges[{k}]"
        phi = _matrix(e["phi"], where + ".phi")
        phi_hat = _matrix(e["phi_hat"], where + ".phi_hat")
        if doc["kind"] == "classical":
            if np.iscomplexobj(phi) or np.iscomplexobj(phi_hat):
                raise DocumentError("classical transforms must be real", where)
            out.append(ClassicalEdgeTransform(e["variable"], e["factor"], phi, phi_hat))
        else:
            q = math.isqrt(phi.shape[0])
            if q * q != phi.shape[0] or phi.shape != phi_hat.shape or phi.shape[0] != phi.shape[1]:
                raise DocumentError("CJ matrices must be square of size q^2", where)
            out.append(EdgeTransform.from_cj(e["variable"], e["factor"], phi, phi_hat, e.get("mode", "STRONG")))
    if doc["kind"] == "quantum":
        return QuantumTransformSet.of(out)
    return out


def parse_transforms(path):
    return doc_to_transforms(read_json(path, TRANSFORM_SCHEMA))


def write_transforms(path, ts):
    write_json(path, transforms_to_doc(ts))


# --- transformed graphs -------------------------------------------------------

def transformed_to_doc(t, z_hat=None) -> dict:
    doc = {"format": "qholant-transformed", "version": VERSION}
    if isinstance(t, TransformedClassicalGraph):
        doc["kind"] = "classical"
        doc["factors"] = [
            {"id": a, "edges": [list(e) for e in t.factor_edges[a]], "table": [_num(x) for x in tab.ravel()]}
            for a, tab in t.factor_tables.items()
        ]
        doc["variables"] = [
            {"id": i, "edges": [list(e) for e in t.variable_edges[i]], "table": [_num(x) for x in np.ravel(tab)]}
            for i, tab in t.variable_tables.items()
        ]
    else:
        doc["kind"] = "quantum"
        for name, family in (("factors", t.factor_hats), ("variables", t.variable_hats)):
            doc[name] = [
                {"id": k, "edges": [list(lab.ident) for lab in op.labels], "matrix": matrix_to_json(op.matrix)}
                for k, op in family.items()
            ]
    if z_hat is not None:
        doc["z_transformed"] = complex_to_json(z_hat)
    return doc


# --- reports ------------------------------------------------------------------

def report_to_doc(r: HolantReport, tol, seed=None, wall_clock=0.0, tool_version=None) -> dict:
    if tool_version is None:
        from . import __version__ as tool_version
    body = {
        "kind": r.kind,
        "verdict": r.verdict,
        "z_original": complex_to_json(r.z_original),
        "z_transformed": complex_to_json(r.z_transformed),
        "discrepancy": _num(r.discrepancy),
        "edges": [
            {"variable": e[0], "factor": e[1], "mode": r.edge_modes.get(e, ""), "residual": _num(res)}
            for e, res in r.edge_residuals.items()
        ],
        "node_commutation": {str(k): _num(v) for k, v in r.node_commutation.items()},
        "factor_commutation": _num(r.factor_commutation),
        "factor_dephasing": {str(k): _num(v) for k, v in r.factor_dephasing.items()},
        "transposed_discrepancy": _num(r.transposed_discrepancy),
        "form_disagreement": _num(r.form_disagreement),
        "order_sensitivity": _num(r.order_sensitivity),
        "failures": list(r.failures),
        "failed_edges": [list(e) for e in r.failed_edges],
    }
    return {
        "format": "qholant-report",
        "version": VERSION,
        "tool_version": tool_version,
        "seed": seed,
        "wall_clock": _num(wall_clock),
        "tolerances": tol.as_dict(),
        "report": body,
    }


def doc_to_report(doc) -> HolantReport:
    validate(doc, REPORT_SCHEMA)
    b = doc["report"]
    edges = b.get("edges", [])
    return HolantReport(
        kind=b["kind"],
        z_original=complex(*b["z_original"]),
        z_transformed=complex(*b["z_transformed"]),
        discrepancy=b["discrepancy"],
        edge_residuals={(e["variable"], e["factor"]): e["residual"] for e in edges},
        edge_modes={(e["variable"], e["factor"]): e["mode"] for e in edges},
        node_commutation=dict(b.get("node_commutation", {})),
        factor_commutation=b.get("factor_commutation", 0.0),
        factor_dephasing=dict(b.get("factor_dephasing", {})),
        transposed_discrepancy=b.get("transposed_discrepancy", 0.0),
        form_disagreement=b.get("form_disagreement", 0.0),
        order_sensitivity=b.get("order_sensitivity", 0.0),
        verdict=b["verdict"],
        failures=list(b.get("failures", [])),
        failed_edges=[tuple(e) for e in b.get("failed_edges", [])],
    )
