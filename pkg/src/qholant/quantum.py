"""Quantum factor graphs and the operator products built on PSD matrices.

``star_n`` is the symmetric Trotter product
``(L^(1/2n) M^(1/n) L^(1/2n))^n``; ``odot`` is its ``n -> infinity`` limit
``exp(log L|S + log M|S)`` on the intersection ``S`` of the two supports.
Operators with different label sets are identity-extended to the union of
their labels before either product is formed.

The partition function of a quantum factor graph is
``Tr((prod_a f_a)(tensor_i f_i))`` for pairwise commuting PSD factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_TOL, MAX_DIM, Tolerances
from .errors import DegenerateModelError, InvariantError, LabelError, SizeGuardError
from .linalg import (
    LabeledOperator,
    SpaceLabel,
    base_label,
    commutation_residual,
    extend_identity,
    label_union,
    partial_trace,
    psd_eigh,
    psd_power,
    psd_violation,
    tensor_all,
    trace,
    _support_basis,
)
from .sampling import random_psd, rng_from


@dataclass(frozen=True)
class QuantumVariable:
    id: str
    op: LabeledOperator

    @property
    def dim(self) -> int:
        return self.op.dim

    @classmethod
    def from_matrix(cls, var_id, matrix):
        m = np.asarray(matrix)
        return cls(str(var_id), LabeledOperator([base_label(var_id, m.shape[0])], m))


@dataclass(frozen=True)
class QuantumFactor:
    id: str
    neighbors: tuple
    op: LabeledOperator

    @classmethod
    def from_matrix(cls, factor_id, neighbors, dims, matrix):
        """Build from a matrix whose legs follow ``neighbors`` order."""
        labels = [base_label(i, d) for i, d in zip(neighbors, dims)]
        return cls(str(factor_id), tuple(str(i) for i in neighbors), LabeledOperator(labels, matrix))


@dataclass(frozen=True)
class QuantumFactorGraph:
    """Variables carry PSD ``f_i`` on their own space, factors PSD ``f_a`` on
    the spaces of their neighbors.  Factors must pairwise commute."""

    variables: tuple
    factors: tuple = ()
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        tol = self.tol
        dims = {}
        for v in self.variables:
            if v.id in dims:
                raise InvariantError(f"duplicate variable id {v.id}", v.id)
            if [lab.key for lab in v.op.labels] != [base_label(v.id, 1).key]:
                raise InvariantError(f"variable {v.id}: operator must act on its own base space", v.id)
            bad = psd_violation(v.op, tol)
            if bad:
                raise InvariantError(f"variable {v.id}: {bad}", v.id)
            dims[v.id] = v.dim
        total = math.prod(dims.values())
        if total > MAX_DIM:
            raise SizeGuardError(f"total dimension {total} exceeds limit {MAX_DIM}")
        seen = set()
        for f in self.factors:
            if f.id in seen:
                raise InvariantError(f"duplicate factor id {f.id}", f.id)
            seen.add(f.id)
            if len(set(f.neighbors)) != len(f.neighbors):
                raise InvariantError(f"factor {f.id}: repeated neighbor", f.id)
            for i in f.neighbors:
                if i not in dims:
                    raise InvariantError(f"factor {f.id}: unknown variable {i}", f.id)
            want = sorted(base_label(i, dims[i]).key for i in f.neighbors)
            if f.op.keys != want:
                raise InvariantError(f"factor {f.id}: operator labels do not match its neighbors", f.id)
            for lab in f.op.labels:
                if lab.dim != dims[lab.ident[0]]:
                    raise InvariantError(f"factor {f.id}: leg {lab.name} has wrong dimension", f.id)
            bad = psd_violation(f.op, tol)
            if bad:
                raise InvariantError(f"factor {f.id}: {bad}", f.id)
        for j, fa in enumerate(self.factors):
            for fb in self.factors[j + 1 :]:
                r = commutation_residual(fa.op, fb.op)
                if r > tol.commute:
                    raise InvariantError(
                        f"factors {fa.id} and {fb.id} do not commute (residual {r:.3e})",
                        (fa.id, fb.id),
                        r,
                    )

    @property
    def variable_ids(self):
        return [v.id for v in self.variables]

    def variable(self, i) -> QuantumVariable:
        for v in self.variables:
            if v.id == i:
                return v
        raise KeyError(i)

    def factor(self, a) -> QuantumFactor:
        for f in self.factors:
            if f.id == a:
                return f
        raise KeyError(a)

    @property
    def labels(self):
        return tuple(v.op.labels[0] for v in self.variables)

    @property
    def total_dim(self) -> int:
        return math.prod(v.dim for v in self.variables)

    @property
    def edges(self):
        return [(i, f.id) for f in self.factors for i in f.neighbors]

    def incident(self, i):
        return [f.id for f in self.factors if i in f.neighbors]

    def max_factor_commutation(self) -> float:
        worst = 0.0
        for j, fa in enumerate(self.factors):
            for fb in self.factors[j + 1 :]:
                worst = max(worst, commutation_residual(fa.op, fb.op))
        return worst


def _extend_pair(a, b):
    union = label_union(a.labels, b.labels)
    return extend_identity(a, union), extend_identity(b, union)


def star_n(lam: LabeledOperator, lam2: LabeledOperator, n: int = 1, tol: Tolerances = DEFAULT_TOL):
    """``(lam^(1/2n) lam2^(1/n) lam^(1/2n))^n`` on the union of the labels."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    a, b = _extend_pair(lam, lam2)
    half = psd_power(a, 1.0 / (2 * n), tol).matrix
    step = half @ psd_power(b, 1.0 / n, tol).matrix @ half
    step = (step + step.conj().T) / 2
    out = np.linalg.matrix_power(step, n)
    return LabeledOperator(a.labels, (out + out.conj().T) / 2)


def star(lam, lam2, tol: Tolerances = DEFAULT_TOL):
    return star_n(lam, lam2, 1, tol)


def _intersection_basis(ba, bb, d, rank_tol):
    """Orthonormal basis of the intersection of two column spans."""
    if ba.shape[1] == d:
        return bb
    if bb.shape[1] == d:
        return ba
    if ba.shape[1] == 0 or bb.shape[1] == 0:
        return ba[:, :0]
    # kernel of (I - Pa) + (I - Pb) is exactly the intersection
    comp = 2 * np.eye(d) - ba @ ba.conj().T - bb @ bb.conj().T
    w, v = np.linalg.eigh((comp + comp.conj().T) / 2)
    return v[:, w < rank_tol]


def _log_on(m, basis):
    comp = basis.conj().T @ m @ basis
    w, v = np.linalg.eigh((comp + comp.conj().T) / 2)
    return (v * np.log(w)) @ v.conj().T


def odot(lam: LabeledOperator, lam2: LabeledOperator, tol: Tolerances = DEFAULT_TOL):
    """``exp(log lam|S + log lam2|S)`` on the support intersection S, zero elsewhere."""
    a, b = _extend_pair(lam, lam2)
    d = a.dim
    wa, va = psd_eigh(a, tol)
    wb, vb = psd_eigh(b, tol)
    cut = d * tol.rank
    basis = _intersection_basis(_support_basis(wa, va, cut), _support_basis(wb, vb, cut), d, cut)
    if basis.shape[1] == 0:
        return LabeledOperator(a.labels, np.zeros((d, d)))
    full = basis.shape[1] == d
    if full:
        basis = np.eye(d)
    gen = _log_on(a.matrix, basis) + _log_on(b.matrix, basis)
    gen = (gen + gen.conj().T) / 2
    w, v = np.linalg.eigh(gen)
    inner = (v * np.exp(w)) @ v.conj().T
    out = basis @ inner @ basis.conj().T
    return LabeledOperator(a.labels, (out + out.conj().T) / 2)


def _check_graph(g: QuantumFactorGraph, tol: Tolerances):
    worst = g.max_factor_commutation()
    if worst > tol.commute:
        raise InvariantError(f"factors do not pairwise commute (residual {worst:.3e})", None, worst)


def factor_product(g: QuantumFactorGraph, order=None) -> LabeledOperator:
    """Identity-extended product of all factors in stored (or given) order."""
    labels = g.labels
    facs = g.factors if order is None else [g.factor(a) for a in order]
    if not facs:
        return LabeledOperator(labels, np.eye(g.total_dim))
    m = None
    for f in facs:
        e = extend_identity(f.op, labels).matrix
        m = e if m is None else m @ e
    return LabeledOperator(labels, m)


def variable_product(g: QuantumFactorGraph) -> LabeledOperator:
    return tensor_all(v.op for v in g.variables)


def _real_z(z: complex, tol: Tolerances, what="Z") -> float:
    if abs(z.imag) > tol.imag * max(abs(z), 1e-300) + 1e-300:
        raise InvariantError(f"{what} has imaginary part {z.imag:.3e} (|{what}| = {abs(z):.3e})")
    return z.real


def z_quantum_complex(g: QuantumFactorGraph, order=None, tol: Tolerances = DEFAULT_TOL) -> complex:
    _check_graph(g, tol)
    fa = factor_product(g, order).matrix
    fi = variable_product(g).matrix
    # Tr(A B) without forming the product
    return complex(np.sum(fa * fi.T))


def z_quantum(g: QuantumFactorGraph, tol: Tolerances = DEFAULT_TOL) -> float:
    """``Tr((prod_a f_a)(tensor_i f_i))``, checked to be real."""
    return _real_z(z_quantum_complex(g, tol=tol), tol)


def density_operator(g: QuantumFactorGraph, tol: Tolerances = DEFAULT_TOL) -> LabeledOperator:
    """``(prod_a f_a) star (tensor_i f_i) / Z``."""
    z = z_quantum(g, tol)
    if z <= 1e-12:
        raise DegenerateModelError(f"partition function {z:.3e} is not positive")
    rho = star_n(factor_product(g), variable_product(g), 1, tol)
    return LabeledOperator(rho.labels, rho.matrix / z)


def _overlap_shape(lab_ab, lab_bc):
    ka = {lab.key for lab in lab_ab}
    kc = {lab.key for lab in lab_bc}
    shared = ka & kc
    only_a = [lab for lab in lab_ab if lab.key not in shared]
    only_c = [lab for lab in lab_bc if lab.key not in shared]
    b = [lab for lab in lab_ab if lab.key in shared]
    if not shared or not only_a or not only_c:
        raise LabelError(
            "operators must act on {A,B} and {B,C} with A, B, C non-empty and disjoint"
        )
    return only_a, b, only_c


def star_distributivity_sides(lam_ab, lam_bc, tol: Tolerances = DEFAULT_TOL):
    """Both sides of ``Tr(L_AB star L_BC) = Tr_B(Tr_A(L_AB) star Tr_C(L_BC))``."""
    a, _, c = _overlap_shape(lam_ab.labels, lam_bc.labels)
    lhs = trace(star(lam_ab, lam_bc, tol))
    rhs = trace(star(partial_trace(lam_ab, a), partial_trace(lam_bc, c), tol))
    return lhs, rhs


def check_star_distributivity(lam_ab, lam_bc, tol: Tolerances = DEFAULT_TOL) -> float:
    lhs, rhs = star_distributivity_sides(lam_ab, lam_bc, tol)
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def odot_distributivity_sides(lam_ab, lam_bc, tol: Tolerances = DEFAULT_TOL):
    a, _, c = _overlap_shape(lam_ab.labels, lam_bc.labels)
    lhs = trace(odot(lam_ab, lam_bc, tol))
    rhs = trace(odot(partial_trace(lam_ab, a), partial_trace(lam_bc, c), tol))
    return lhs, rhs


QUBIT_A = SpaceLabel("A", 0, 2)
QUBIT_B = SpaceLabel("B", 0, 2)
QUBIT_C = SpaceLabel("C", 0, 2)


def random_triple_pair(rng, family="random", dims=(2, 2, 2)):
    """Random PSD ``L_AB`` on (A,B) and ``L_BC`` on (B,C), trace-normalized to their dims."""
    la, lb, lc = (SpaceLabel(s, 0, d) for s, d in zip("ABC", dims))
    dab, dbc = dims[0] * dims[1], dims[1] * dims[2]
    if family == "random":
        mab = random_psd(rng, dab, trace=dab)
        mbc = random_psd(rng, dbc, trace=dbc)
    elif family == "diagonal":
        mab = np.diag(rng.uniform(0.05, 1.0, dab))
        mbc = np.diag(rng.uniform(0.05, 1.0, dbc))
    else:
        raise ValueError(f"unknown family {family!r}")
    return LabeledOperator([la, lb], mab), LabeledOperator([lb, lc], mbc)


@dataclass(frozen=True)
class OdotWitness:
    trial: int
    lam_ab: LabeledOperator
    lam_bc: LabeledOperator
    lhs: complex
    rhs: complex
    discrepancy: float


def find_odot_nondistributivity(
    seed, trials=100, threshold=1e-3, family="random", tol: Tolerances = DEFAULT_TOL
) -> Optional[OdotWitness]:
    """Search random PSD pairs for a failure of the partial-trace law under odot."""
    rng = rng_from(seed)
    for k in range(trials):
        lab, lbc = random_triple_pair(rng, family)
        lhs, rhs = odot_distributivity_sides(lab, lbc, tol)
        disc = abs(lhs - rhs) / max(abs(lhs), 1e-300)
        if disc > threshold:
            return OdotWitness(k, lab, lbc, lhs, rhs, disc)
    return None


@dataclass(frozen=True)
class StarWitness:
    trial: int
    lam: LabeledOperator
    lam2: LabeledOperator
    gap: float


def find_star_noncommutativity(seed, trials=100, n=1, threshold=1e-6, dim=2, tol=DEFAULT_TOL):
    """First random PSD pair with ``||L star L' - L' star L||_F > threshold``."""
    rng = rng_from(seed)
    lab = SpaceLabel("A", 0, dim)
    for k in range(trials):
        a = LabeledOperator([lab], random_psd(rng, dim))
        b = LabeledOperator([lab], random_psd(rng, dim))
        gap = float(np.linalg.norm(star_n(a, b, n, tol).matrix - star_n(b, a, n, tol).matrix))
        if gap > threshold:
            return StarWitness(k, a, b, gap)
    return None


def trotter_errors(lam, lam2, ns, tol: Tolerances = DEFAULT_TOL):
    """``||star_n - odot||_F`` for each ``n`` in ``ns``."""
    target = odot(lam, lam2, tol).matrix
    return [float(np.linalg.norm(star_n(lam, lam2, n, tol).matrix - target)) for n in ns]
