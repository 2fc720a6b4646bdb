"""Classical factor graphs, exact partition functions and holographic transforms.

A transform on edge ``(i, a)`` is a pair of real square matrices ``phi``
(indexed ``[x, y]``) and ``phi_hat`` (indexed ``[y, z]``) with
``phi @ phi_hat = I``.  The factor side absorbs ``phi_hat`` and the variable
side absorbs ``phi``; the summed product of the transformed tables over edge
variables reproduces the partition function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, MAX_CLASSICAL_STATES, Tolerances
from .errors import DimensionError, InvariantError, SizeGuardError, TransformError
from .report import FAIL, PASS, HolantReport, edge_name


@dataclass(frozen=True)
class ClassicalVariable:
    id: str
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class ClassicalFactor:
    id: str
    neighbors: tuple
    table: np.ndarray  # one axis per neighbor, in neighbor order


@dataclass(frozen=True)
class ClassicalFactorGraph:
    variables: tuple
    factors: tuple = ()

    def __post_init__(self):
        variables = tuple(
            v if isinstance(v, ClassicalVariable) else ClassicalVariable(str(v[0]), v[1])
            for v in self.variables
        )
        clean_vars = []
        sizes = {}
        for v in variables:
            w = np.array(v.weights, dtype=float)
            if w.ndim != 1 or w.size < 1:
                raise InvariantError(f"variable {v.id}: weights must be a non-empty vector", v.id)
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise InvariantError(f"variable {v.id}: weights must be finite and >= 0", v.id)
            if v.id in sizes:
                raise InvariantError(f"duplicate variable id {v.id}", v.id)
            w.setflags(write=False)
            sizes[v.id] = w.size
            clean_vars.append(ClassicalVariable(str(v.id), w))

        factors = tuple(
            f if isinstance(f, ClassicalFactor) else ClassicalFactor(str(f[0]), tuple(f[1]), f[2])
            for f in self.factors
        )
        clean_factors = []
        seen = set()
        for f in factors:
            if f.id in seen:
                raise InvariantError(f"duplicate factor id {f.id}", f.id)
            seen.add(f.id)
            nbrs = tuple(str(i) for i in f.neighbors)
            if len(set(nbrs)) != len(nbrs):
                raise InvariantError(f"factor {f.id}: repeated neighbor", f.id)
            for i in nbrs:
                if i not in sizes:
                    raise InvariantError(f"factor {f.id}: unknown variable {i}", f.id)
            shape = tuple(sizes[i] for i in nbrs)
            t = np.array(f.table, dtype=float)
            if t.size != math.prod(shape):
                raise InvariantError(
                    f"factor {f.id}: table has {t.size} entries, expected {math.prod(shape)}", f.id
                )
            t = t.reshape(shape)
            if np.any(t < 0) or not np.all(np.isfinite(t)):
                raise InvariantError(f"factor {f.id}: table entries must be finite and >= 0", f.id)
            t.setflags(write=False)
            clean_factors.append(ClassicalFactor(f.id, nbrs, t))

        object.__setattr__(self, "variables", tuple(clean_vars))
        object.__setattr__(self, "factors", tuple(clean_factors))

    @property
    def variable_ids(self):
        return [v.id for v in self.variables]

    def variable(self, i) -> ClassicalVariable:
        for v in self.variables:
            if v.id == i:
                return v
        raise KeyError(i)

    @property
    def edges(self):
        """Edges ``(i, a)`` in factor order, then neighbor order."""
        return [(i, f.id) for f in self.factors for i in f.neighbors]

    def incident(self, i):
        """Factors adjacent to variable ``i`` in stored factor order."""
        return [f.id for f in self.factors if i in f.neighbors]

    @property
    def state_space(self) -> int:
        return math.prod(v.size for v in self.variables)


def z_classical(g: ClassicalFactorGraph) -> float:
    """Exact partition function by summing over the full joint state space."""
    if g.state_space > MAX_CLASSICAL_STATES:
        raise SizeGuardError(
            f"state space {g.state_space} exceeds brute-force limit {MAX_CLASSICAL_STATES}"
        )
    pos = {v.id: k for k, v in enumerate(g.variables)}
    ops = []
    for v in g.variables:
        ops += [v.weights, [pos[v.id]]]
    for f in g.factors:
        ops += [f.table, [pos[i] for i in f.neighbors]]
    return float(np.einsum(*ops, [], optimize=True))


@dataclass(frozen=True)
class ClassicalEdgeTransform:
    variable: str
    factor: str
    phi: np.ndarray
    phi_hat: np.ndarray

    def __post_init__(self):
        for name in ("phi", "phi_hat"):
            m = np.array(getattr(self, name), dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DimensionError(f"edge ({self.variable},{self.factor}): {name} must be square")
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        if self.phi.shape != self.phi_hat.shape:
            raise DimensionError(
                f"edge ({self.variable},{self.factor}): phi {self.phi.shape} "
                f"and phi_hat {self.phi_hat.shape} differ"
            )

    @property
    def edge(self):
        return (self.variable, self.factor)


def check_biorthogonality(t: ClassicalEdgeTransform) -> float:
    """Largest entry of ``|phi @ phi_hat - I|``."""
    q = t.phi.shape[0]
    return float(np.max(np.abs(t.phi @ t.phi_hat - np.eye(q))))


@dataclass(frozen=True)
class TransformedClassicalGraph:
    """Hatted tables over edge variables.

    ``factor_tables[a]`` has one axis per edge ``(i, a)`` in the factor's
    neighbor order, ``variable_tables[i]`` one axis per edge ``(i, a)`` in
    the variable's incident-factor order.
    """

    edges: tuple
    edge_sizes: dict
    factor_edges: dict
    variable_edges: dict
    factor_tables: dict = field(default_factory=dict)
    variable_tables: dict = field(default_factory=dict)

    @property
    def state_space(self) -> int:
        return math.prod(self.edge_sizes[e] for e in self.edges)


def _index_transforms(g, transforms):
    if isinstance(transforms, dict):
        items = list(transforms.values())
    else:
        items = list(transforms)
    by_edge = {}
    for t in items:
        if t.edge in by_edge:
            raise TransformError(f"duplicate transform for edge {edge_name(t.edge)}")
        by_edge[t.edge] = t
    edges = set(g.edges)
    missing = [e for e in g.edges if e not in by_edge]
    extra = [e for e in by_edge if e not in edges]
    if missing:
        raise TransformError("missing transform for edge(s) " + ", ".join(map(edge_name, missing)))
    if extra:
        raise TransformError("transform for non-edge(s) " + ", ".join(map(edge_name, extra)))
    for (i, a), t in by_edge.items():
        q = g.variable(i).size
        if t.phi.shape[0] != q:
            raise DimensionError(f"edge {edge_name((i, a))}: transform size {t.phi.shape[0]} != {q}")
    return by_edge


def classical_transform(
    g: ClassicalFactorGraph, transforms, tol: Tolerances = DEFAULT_TOL, check: bool = True
) -> TransformedClassicalGraph:
    """Push ``phi_hat`` into every factor and ``phi`` into every variable."""
    by_edge = _index_transforms(g, transforms)
    if check:
        for e, t in by_edge.items():
            r = check_biorthogonality(t)
            if r > tol.biorthogonality:
                raise InvariantError(
                    f"edge {edge_name(e)}: phi @ phi_hat deviates from identity by {r:.3e}", e, r
                )

    factor_tables = {}
    factor_edges = {}
    for f in g.factors:
        t = np.array(f.table)
        for axis, i in enumerate(f.neighbors):
            # fhat[..., y, ...] = sum_z phi_hat[y, z] f[..., z, ...]
            t = np.moveaxis(np.tensordot(by_edge[(i, f.id)].phi_hat, t, axes=([1], [axis])), 0, axis)
        factor_tables[f.id] = t
        factor_edges[f.id] = tuple((i, f.id) for i in f.neighbors)

    variable_tables = {}
    variable_edges = {}
    for v in g.variables:
        inc = g.incident(v.id)
        ops = [v.weights, [0]]
        for k, a in enumerate(inc):
            ops += [by_edge[(v.id, a)].phi, [0, k + 1]]
        variable_tables[v.id] = np.einsum(*ops, list(range(1, len(inc) + 1)))
        variable_edges[v.id] = tuple((v.id, a) for a in inc)

    return TransformedClassicalGraph(
        edges=tuple(g.edges),
        edge_sizes={e: g.variable(e[0]).size for e in g.edges},
        factor_edges=factor_edges,
        variable_edges=variable_edges,
        factor_tables=factor_tables,
        variable_tables=variable_tables,
    )


def z_transformed_classical(t: TransformedClassicalGraph) -> float:
    """Sum over edge configurations of the product of all hatted tables."""
    if t.state_space > MAX_CLASSICAL_STATES:
        raise SizeGuardError(
            f"transformed state space {t.state_space} exceeds limit {MAX_CLASSICAL_STATES}"
        )
    idx = {e: k for k, e in enumerate(t.edges)}
    ops = []
    for a, table in t.factor_tables.items():
        ops += [table, [idx[e] for e in t.factor_edges[a]]]
    for i, table in t.variable_tables.items():
        ops += [table, [idx[e] for e in t.variable_edges[i]]]
    return float(np.einsum(*ops, [], optimize=True))


def verify_classical_holant(
    g: ClassicalFactorGraph, transforms, tol: Tolerances = DEFAULT_TOL
) -> HolantReport:
    by_edge = _index_transforms(g, transforms)
    residuals = {e: check_biorthogonality(t) for e, t in by_edge.items()}
    transformed = classical_transform(g, by_edge, tol, check=False)
    z = z_classical(g)
    zh = z_transformed_classical(transformed)
    disc = abs(z - zh) / max(1.0, abs(z))
    report = HolantReport(
        kind="classical",
        z_original=complex(z),
        z_transformed=complex(zh),
        discrepancy=disc,
        edge_residuals=residuals,
        edge_modes={e: "BIORTHOGONAL" for e in residuals},
    )
    for e in g.edges:
        if residuals[e] > tol.biorthogonality:
            report.failed_edges.append(e)
            report.failures.append(
                f"edge {edge_name(e)}: biorthogonality residual {residuals[e]:.3e} "
                f"> {tol.biorthogonality:g}"
            )
    if disc > tol.holant_classical:
        report.failures.append(f"relative discrepancy {disc:.3e} > {tol.holant_classical:g}")
    report.verdict = FAIL if report.failures else PASS
    return report


def random_classical_graph(
    rng, n_variables=4, n_factors=3, max_domain=3, max_arity=3, min_domain=2
) -> ClassicalFactorGraph:
    """Random graph with nonnegative uniform weights and random factor scopes."""
    variables = [
        ClassicalVariable(f"x{k}", rng.uniform(0.0, 1.0, int(rng.integers(min_domain, max_domain + 1))))
        for k in range(n_variables)
    ]
    factors = []
    for k in range(n_factors):
        arity = int(rng.integers(1, min(max_arity, n_variables) + 1))
        nbrs = [variables[j].id for j in sorted(rng.choice(n_variables, arity, replace=False))]
        rng.shuffle(nbrs)
        shape = [len(variables[int(i[1:])].weights) for i in nbrs]
        factors.append(ClassicalFactor(f"f{k}", tuple(nbrs), rng.uniform(0.0, 1.0, shape)))
    return ClassicalFactorGraph(tuple(variables), tuple(factors))


def random_classical_transforms(rng, g: ClassicalFactorGraph, max_cond=1e2):
    """One random real invertible pair ``(phi, inv(phi))`` per edge."""
    from .sampling import random_invertible

    out = []
    for i, a in g.edges:
        phi = random_invertible(rng, g.variable(i).size, real=True, max_cond=max_cond)
        out.append(ClassicalEdgeTransform(i, a, phi, np.linalg.inv(phi)))
    return out


def hadamard_pair(q=2):
    """The pair ``H`` and ``H/2`` for binary domains (``H @ H/2 = I``)."""
    if q != 2:
        raise ValueError("Hadamard pair is defined for binary domains")
    h = np.array([[1.0, 1.0], [1.0, -1.0]])
    return h, h / 2
