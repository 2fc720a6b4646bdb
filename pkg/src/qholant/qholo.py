"""Holographic transformation of quantum factor graphs.

Each edge ``(i, a)`` carries a pair of linear maps

* ``phi``:     B(H^_ia) -> B(H_i)    (CJ matrix on ``[H_i, H^_ia]``)
* ``phi_hat``: B(H'_ia) -> B(H^_ia)  (CJ matrix on ``[H^_ia, H'_ia]``)

in one of two modes: STRONG requires ``phi o phi_hat`` to be the relabeling
identity ``H'_ia -> H_i``, DIAGONAL only requires it to be the dephasing map.
The transformed factor is ``(tensor_i phi_hat_ia)(f'_a)`` and the transformed
variable is ``(barotimes_a phi_ia)^*(f_i)``; their product traced over all hat
spaces reproduces the partition function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, MAX_DIM, Tolerances
from .errors import (
    DimensionError,
    FormMismatchError,
    LabelError,
    SizeGuardError,
    TransformError,
)
from .linalg import (
    LabeledOperator,
    SpaceLabel,
    Tier,
    base_label,
    commutation_residual,
    hat_label,
    partial_trace,
    prime_label,
    product,
    tensor_all,
    trace_against,
    transpose,
)
from .quantum import QuantumFactor, QuantumFactorGraph, QuantumVariable, z_quantum_complex
from .report import EXPLORATORY, FAIL, PASS, HolantReport, edge_name
from .sampling import random_invertible, random_psd, rng_from
from .superop import (
    SuperOperator,
    adjoint,
    apply,
    bar_otimes_all,
    check_diagonal_inverse,
    check_strong_inverse,
    diagonal_map,
    identity_map,
    invert,
    otimes_all,
    random_superoperator,
    relabel_map,
    swap_witness,
)

STRONG = "STRONG"
DIAGONAL = "DIAGONAL"
MODES = (STRONG, DIAGONAL)


def edge_labels(g: QuantumFactorGraph, i, a):
    q = g.variable(i).dim
    return base_label(i, q), hat_label(i, a, q), prime_label(i, a, q)


@dataclass(frozen=True)
class EdgeTransform:
    variable: str
    factor: str
    phi: SuperOperator
    phi_hat: SuperOperator
    mode: str = STRONG

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        i, a = self.variable, self.factor
        ok_phi = (
            [l.key for l in self.phi.domain] == [((i, a), Tier.HAT)]
            and [l.key for l in self.phi.codomain] == [((i,), Tier.BASE)]
        )
        ok_hat = (
            [l.key for l in self.phi_hat.domain] == [((i, a), Tier.PRIME)]
            and [l.key for l in self.phi_hat.codomain] == [((i, a), Tier.HAT)]
        )
        if not (ok_phi and ok_hat):
            raise LabelError(f"edge {edge_name(self.edge)}: maps do not use the edge's label scheme")
        if not (self.phi.d_in == self.phi.d_out == self.phi_hat.d_in == self.phi_hat.d_out):
            raise DimensionError(f"edge {edge_name(self.edge)}: inconsistent dimensions")

    @property
    def edge(self):
        return (self.variable, self.factor)

    @property
    def dim(self) -> int:
        return self.phi.d_out

    def inverse_residual(self) -> float:
        if self.mode == STRONG:
            return check_strong_inverse(self.phi.cj, self.phi_hat.cj).swap
        return check_diagonal_inverse(self.phi.cj, self.phi_hat.cj)

    @classmethod
    def from_cj(cls, variable, factor, phi_cj, phi_hat_cj, mode=STRONG):
        """Build from the two CJ matrices (as LabeledOperators or raw matrices in canonical order)."""
        q = int(round(math.sqrt(np.asarray(getattr(phi_cj, "matrix", phi_cj)).shape[0])))
        b, h, p = base_label(variable, q), hat_label(variable, factor, q), prime_label(variable, factor, q)
        if not isinstance(phi_cj, LabeledOperator):
            phi_cj = LabeledOperator([b, h], phi_cj)
        if not isinstance(phi_hat_cj, LabeledOperator):
            phi_hat_cj = LabeledOperator([h, p], phi_hat_cj)
        return cls(variable, factor, SuperOperator([h], [b], phi_cj), SuperOperator([p], [h], phi_hat_cj), mode)


@dataclass(frozen=True)
class QuantumTransformSet:
    transforms: dict  # edge -> EdgeTransform

    @classmethod
    def of(cls, items):
        out = {}
        for t in items:
            if t.edge in out:
                raise TransformError(f"duplicate transform for edge {edge_name(t.edge)}")
            out[t.edge] = t
        return cls(out)

    def __getitem__(self, edge) -> EdgeTransform:
        return self.transforms[edge]

    def __iter__(self):
        return iter(self.transforms.values())

    def __len__(self):
        return len(self.transforms)

    def check_against(self, g: QuantumFactorGraph):
        edges = g.edges
        missing = [e for e in edges if e not in self.transforms]
        extra = [e for e in self.transforms if e not in set(edges)]
        if missing:
            raise TransformError("missing transform for edge(s) " + ", ".join(map(edge_name, missing)))
        if extra:
            raise TransformError("transform for non-edge(s) " + ", ".join(map(edge_name, extra)))
        for (i, a), t in self.transforms.items():
            if t.dim != g.variable(i).dim:
                raise DimensionError(f"edge {edge_name((i, a))}: transform dimension {t.dim} != {g.variable(i).dim}")

    def inverse_residuals(self):
        return {e: t.inverse_residual() for e, t in self.transforms.items()}

    def node_commutation(self, g: QuantumFactorGraph):
        """Largest pairwise commutation residual of the ``phi`` CJ matrices at each node of degree >= 2."""
        out = {}
        for v in g.variables:
            inc = g.incident(v.id)
            if len(inc) < 2:
                continue
            cjs = [self.transforms[(v.id, a)].phi.cj for a in inc]
            out[v.id] = max(
                commutation_residual(cjs[p], cjs[r]) for p in range(len(cjs)) for r in range(p + 1, len(cjs))
            )
        return out

    def modes(self):
        return {e: t.mode for e, t in self.transforms.items()}


def prime_factor(g: QuantumFactorGraph, a) -> LabeledOperator:
    """``f'_a``: the factor operator moved onto its PRIME edge spaces."""
    f = g.factor(a)
    return f.op.relabel({lab.key: prime_label(lab.ident[0], a, lab.dim) for lab in f.op.labels})


def _rel_gap(x: LabeledOperator, y: LabeledOperator) -> float:
    return float(np.linalg.norm(x.matrix - y.matrix)) / max(1.0, float(np.linalg.norm(y.matrix)))


def transform_factor_forms(g, a, ts: QuantumTransformSet):
    """Partial-trace form and map form of the transformed factor."""
    f = g.factor(a)
    fp = prime_factor(g, a)
    pairs = [ts[(i, a)] for i in f.neighbors]
    big = tensor_all(t.phi_hat.cj for t in pairs)
    trace_form = trace_against(big, transpose(fp))
    map_form = apply(otimes_all(t.phi_hat for t in pairs), fp)
    return trace_form, map_form


def transform_factor(g, a, ts: QuantumTransformSet, tol: Tolerances = DEFAULT_TOL) -> LabeledOperator:
    trace_form, map_form = transform_factor_forms(g, a, ts)
    gap = _rel_gap(trace_form, map_form)
    if gap > tol.form:
        raise FormMismatchError(f"factor {a}: partial-trace and map forms differ by {gap:.3e}")
    return map_form


def variable_trace_form(g, i, ts: QuantumTransformSet, order=None) -> LabeledOperator:
    """``Tr_{H_i}(f_i^T prod_a phi_ia^T)`` with the product taken in ``order``."""
    v = g.variable(i)
    order = g.incident(i) if order is None else list(order)
    if not order:
        return LabeledOperator((), [[np.trace(v.op.matrix)]])
    ops = [transpose(v.op)] + [transpose(ts[(i, a)].phi.cj) for a in order]
    return partial_trace(product(ops), v.op.labels)


def variable_map_form(g, i, ts: QuantumTransformSet, order=None) -> LabeledOperator:
    """``(barotimes_a phi_ia)^*(f_i)`` with the fold taken in ``order``."""
    v = g.variable(i)
    order = g.incident(i) if order is None else list(order)
    if not order:
        return LabeledOperator((), [[np.trace(v.op.matrix)]])
    psi = bar_otimes_all(ts[(i, a)].phi for a in order)
    return apply(adjoint(psi), v.op)


def transform_variable(g, i, ts, order=None, strict=True, tol: Tolerances = DEFAULT_TOL):
    """Transformed variable operator; with ``strict`` the two forms must agree.

    The partial-trace form multiplies the ``phi`` matrices left to right, which
    corresponds to folding ``barotimes`` in the reverse order.  The two agree
    whenever the ``phi``'s at the node commute.
    """
    trace_form = variable_trace_form(g, i, ts, order)
    map_form = variable_map_form(g, i, ts, order)
    gap = _rel_gap(trace_form, map_form)
    if strict and gap > tol.form:
        raise FormMismatchError(f"variable {i}: partial-trace and map forms differ by {gap:.3e}")
    return map_form


@dataclass
class TransformedQuantumGraph:
    factor_hats: dict
    variable_hats: dict
    form_disagreement: float = 0.0


def transform_graph(g, ts, strict=True, tol: Tolerances = DEFAULT_TOL) -> TransformedQuantumGraph:
    ts.check_against(g)
    worst = 0.0
    fh = {}
    for f in g.factors:
        tf, mf = transform_factor_forms(g, f.id, ts)
        gap = _rel_gap(tf, mf)
        if strict and gap > tol.form:
            raise FormMismatchError(f"factor {f.id}: partial-trace and map forms differ by {gap:.3e}")
        worst = max(worst, gap)
        fh[f.id] = mf
    vh = {}
    for v in g.variables:
        tf = variable_trace_form(g, v.id, ts)
        mf = variable_map_form(g, v.id, ts)
        gap = _rel_gap(tf, mf)
        if strict and gap > tol.form:
            raise FormMismatchError(f"variable {v.id}: partial-trace and map forms differ by {gap:.3e}")
        worst = max(worst, gap)
        vh[v.id] = mf
    return TransformedQuantumGraph(fh, vh, worst)


def _coverage(t: TransformedQuantumGraph):
    fac, var = {}, {}
    for name, family, seen in (("factor", t.factor_hats, fac), ("variable", t.variable_hats, var)):
        for owner, op in family.items():
            for lab in op.labels:
                if lab.tier != Tier.HAT:
                    raise LabelError(f"{name} {owner}: label {lab.name} is not a hat space")
                if lab.key in seen:
                    raise LabelError(f"hat space {lab.name} covered twice by the {name} family")
                seen[lab.key] = lab
    if not fac:
        raise LabelError("no hat spaces: the transformed graph has no edges")
    if set(fac) != set(var):
        raise LabelError("factor and variable families cover different hat spaces")
    total = math.prod(lab.dim for lab in fac.values())
    if total > MAX_DIM:
        raise SizeGuardError(f"hat space dimension {total} exceeds limit {MAX_DIM}")
    return sorted(fac)


def _network_trace_transposed(t: TransformedQuantumGraph, keys) -> complex:
    """``Tr((tensor_a fhat_a^T)(tensor_i fhat_i^T))`` as a tensor-network contraction."""
    row = {k: 2 * n for n, k in enumerate(keys)}
    col = {k: 2 * n + 1 for n, k in enumerate(keys)}
    ops = []
    scalar = 1.0 + 0j
    for family, first, second in ((t.factor_hats, row, col), (t.variable_hats, col, row)):
        for op in family.values():
            if not op.labels:
                scalar *= op.scalar()
                continue
            tens = op.matrix.T.reshape(tuple(op.dims) * 2)
            ops += [tens, [first[l.key] for l in op.labels] + [second[l.key] for l in op.labels]]
    return scalar * complex(np.einsum(*ops, [], optimize=True))


def z_transformed_forms(t: TransformedQuantumGraph):
    """Dense ``Tr((tensor fhat_a)(tensor fhat_i))`` and its transposed network variant."""
    keys = _coverage(t)
    a = tensor_all(t.factor_hats.values())
    b = tensor_all(t.variable_hats.values())
    z = complex(np.sum(a.matrix * b.matrix.T))
    zt = _network_trace_transposed(t, keys)
    return z, zt


def z_transformed(t: TransformedQuantumGraph, tol: Tolerances = DEFAULT_TOL) -> complex:
    z, zt = z_transformed_forms(t)
    gap = abs(z - zt) / max(1.0, abs(z))
    if gap > tol.form:
        raise FormMismatchError(f"transposed evaluation differs by {gap:.3e}")
    return z


def dephasing_residual(op: LabeledOperator, legs) -> float:
    """Relative weight of ``op`` off the diagonal of the given legs."""
    keys = {l.key if isinstance(l, SpaceLabel) else l for l in legs}
    if not keys:
        return 0.0
    n = len(op.labels)
    dims = op.dims
    t = op.matrix.reshape(tuple(dims) * 2)
    mask = np.ones(t.shape, dtype=bool)
    for j, lab in enumerate(op.labels):
        if lab.key in keys:
            shape = [1] * (2 * n)
            shape[j] = shape[n + j] = dims[j]
            mask &= np.eye(dims[j], dtype=bool).reshape(shape)
    off = float(np.linalg.norm(t[~mask]))
    return off / max(float(np.linalg.norm(op.matrix)), 1e-300)


def verify_quantum_holant(
    g: QuantumFactorGraph, ts: QuantumTransformSet, tol: Tolerances = DEFAULT_TOL, probe_seed=0, probes=3
) -> HolantReport:
    """Evaluate both sides of the quantum Holant identity and all preconditions.

    Structural problems raise; numerical failures become verdicts.  FAIL when
    any edge's inverse condition fails or the identity does not hold under
    satisfied preconditions, EXPLORATORY when a commutation or dephasing
    precondition is unmet, PASS otherwise.
    """
    ts.check_against(g)
    residuals = ts.inverse_residuals()
    node_comm = ts.node_commutation(g)
    fac_comm = g.max_factor_commutation()
    dephasing = {}
    for f in g.factors:
        legs = [base_label(i, g.variable(i).dim) for i in f.neighbors if ts[(i, f.id)].mode == DIAGONAL]
        if legs:
            dephasing[f.id] = dephasing_residual(f.op, legs)

    transformed = transform_graph(g, ts, strict=False, tol=tol)
    z = z_quantum_complex(g, tol=tol)
    zh, zt = z_transformed_forms(transformed)
    disc = abs(z - zh) / max(1.0, abs(z))
    tdisc = abs(zh - zt) / max(1.0, abs(zh))

    rng = rng_from(probe_seed)
    sensitivity = 0.0
    for _ in range(probes):
        forder = [g.factors[k].id for k in rng.permutation(len(g.factors))]
        zp = z_quantum_complex(g, forder, tol)
        vh = {}
        for v in g.variables:
            inc = g.incident(v.id)
            vh[v.id] = variable_trace_form(g, v.id, ts, [inc[k] for k in rng.permutation(len(inc))])
        zhp, _ = z_transformed_forms(TransformedQuantumGraph(transformed.factor_hats, vh))
        sensitivity = max(sensitivity, abs(zp - z) / max(1.0, abs(z)), abs(zhp - zh) / max(1.0, abs(z)))

    report = HolantReport(
        kind="quantum",
        z_original=z,
        z_transformed=zh,
        discrepancy=disc,
        edge_residuals=residuals,
        edge_modes=ts.modes(),
        node_commutation=node_comm,
        factor_commutation=fac_comm,
        factor_dephasing=dephasing,
        transposed_discrepancy=tdisc,
        form_disagreement=transformed.form_disagreement,
        order_sensitivity=sensitivity,
    )

    for e in g.edges:
        if residuals[e] > tol.inverse:
            report.failed_edges.append(e)
            report.failures.append(
                f"edge {edge_name(e)}: {ts[e].mode} inverse residual {residuals[e]:.3e} > {tol.inverse:g}"
            )
    if report.failures:
        report.verdict = FAIL
        return report

    exploratory = []
    for i, r in node_comm.items():
        if r > tol.commute:
            exploratory.append(f"variable {i}: phi maps do not commute (residual {r:.3e})")
    if fac_comm > tol.commute:
        exploratory.append(f"factors do not commute (residual {fac_comm:.3e})")
    for a, r in dephasing.items():
        if r > tol.inverse:
            exploratory.append(f"factor {a}: not diagonal on DIAGONAL-mode legs (residual {r:.3e})")
    if exploratory:
        report.failures.extend(exploratory)
        report.verdict = EXPLORATORY
        return report

    if disc > tol.holant_quantum:
        report.failures.append(f"relative discrepancy {disc:.3e} > {tol.holant_quantum:g}")
    if tdisc > tol.form:
        report.failures.append(f"transposed evaluation differs by {tdisc:.3e}")
    if transformed.form_disagreement > tol.form:
        report.failures.append(f"transform forms differ by {transformed.form_disagreement:.3e}")
    if abs(z.imag) > tol.imag * max(abs(z), 1e-300) + 1e-300:
        report.failures.append(f"Z has imaginary part {z.imag:.3e}")
    report.verdict = FAIL if report.failures else PASS
    return report


def swap_teleport_check(f_prime: LabeledOperator) -> float:
    """``||Tr_{H'}(f' prod_i F_i) - f|| / ||f||`` with ``f`` the BASE-tier copy of ``f'``."""
    swaps = []
    base = {}
    for lab in f_prime.labels:
        if lab.tier != Tier.PRIME:
            raise LabelError(f"label {lab.name} is not a PRIME space")
        b = base_label(lab.ident[0], lab.dim)
        base[lab.key] = b
        swaps.append(swap_witness(b, lab))
    f = f_prime.relabel(base)
    moved = partial_trace(product([f_prime] + swaps), f_prime.labels)
    nf = float(np.linalg.norm(f.matrix))
    diff = float(np.linalg.norm(moved.matrix - f.matrix))
    return diff / nf if nf > 0 else diff


# --- instance generators -------------------------------------------------------

FAMILIES = ("DIAGONAL", "DEG1", "PAULI", "IDENTITY")

_PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


@dataclass(frozen=True)
class SizeParams:
    n_variables: int = 3
    n_factors: int = 2
    max_dim: int = 2
    max_arity: int = 2


def _random_scopes(rng, var_ids, n_factors, max_arity):
    """Random factor scopes covering every variable at least once."""
    n = len(var_ids)
    scopes = []
    for _ in range(max(1, n_factors)):
        r = int(rng.integers(1, min(max_arity, n) + 1))
        scopes.append(sorted(int(j) for j in rng.choice(n, r, replace=False)))
    covered = {j for s in scopes for j in s}
    for j in range(n):
        if j not in covered:
            scopes[int(rng.integers(len(scopes)))].append(j)
    return [[var_ids[j] for j in sorted(set(s))] for s in scopes]


def _partition_scopes(rng, var_ids, max_arity):
    ids = [var_ids[j] for j in rng.permutation(len(var_ids))]
    scopes = []
    while ids:
        r = int(rng.integers(1, max_arity + 1))
        scopes.append(sorted(ids[:r]))
        ids = ids[r:]
    return scopes


def _check_sizes(dims, scopes):
    total = math.prod(dims.values())
    hat = math.prod(dims[i] for s in scopes for i in s)
    # the partial-trace form of a factor lives on its hat and prime spaces together
    widest = max((math.prod(dims[i] ** 2 for i in s) for s in scopes), default=1)
    if max(total, hat, widest) > MAX_DIM:
        raise SizeGuardError(
            f"instance too large (dim {total}, hat dim {hat}, factor CJ dim {widest}; limit {MAX_DIM})"
        )


def _identity_pair(g, i, a):
    b, h, p = edge_labels(g, i, a)
    return EdgeTransform(i, a, identity_map([h], [b]), identity_map([p], [h]), STRONG)


def _diagonal_pair(rng, g, i, a, max_cond=1e2):
    b, h, p = edge_labels(g, i, a)
    phi = random_invertible(rng, b.dim, real=True, max_cond=max_cond)
    return EdgeTransform(
        i, a, diagonal_map(phi, [h], [b]), diagonal_map(np.linalg.inv(phi), [p], [h]), DIAGONAL
    )


def _strong_pair(rng, g, i, a, max_cond=1e2):
    b, h, p = edge_labels(g, i, a)
    phi = random_superoperator(rng, [h], [b], max_cond=max_cond)
    phi_hat = relabel_map(invert(phi), domain=[p])
    return EdgeTransform(i, a, phi, phi_hat, STRONG)


def _psd_factor(rng, a, scope, dims):
    d = math.prod(dims[i] for i in scope)
    return QuantumFactor.from_matrix(a, scope, [dims[i] for i in scope], random_psd(rng, d, trace=d))


def gen_instance(family: str, size: SizeParams = SizeParams(), seed=0):
    """Seeded (graph, transforms) pair on which the Holant preconditions hold.

    DIAGONAL: diagonal operators and embedded classical inverse pairs.
    DEG1: degree-one variables, random PSD factors, random invertible maps.
    PAULI: qubit factors ``exp(theta P)`` for commuting Pauli strings; legs of
    degree >= 2 carry only I/Z and get diagonal transforms, degree-one legs
    get identity transforms.
    IDENTITY: degree-one variables, random PSD operators, identity transforms.
    """
    family = family.upper()
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    rng = rng_from(seed)
    ids = [f"x{k}" for k in range(size.n_variables)]
    if family == "PAULI":
        dims = {i: 2 for i in ids}
    else:
        dims = {i: int(rng.integers(2, size.max_dim + 1)) for i in ids}
    if family in ("DEG1", "IDENTITY"):
        scopes = _partition_scopes(rng, ids, size.max_arity)
    else:
        scopes = _random_scopes(rng, ids, size.n_factors, size.max_arity)
    _check_sizes(dims, scopes)
    names = [f"f{k}" for k in range(len(scopes))]

    if family == "DIAGONAL":
        factors = [
            QuantumFactor.from_matrix(
                a, s, [dims[i] for i in s], np.diag(rng.uniform(0.1, 1.0, math.prod(dims[i] for i in s)))
            )
            for a, s in zip(names, scopes)
        ]
        variables = [QuantumVariable.from_matrix(i, np.diag(rng.uniform(0.1, 1.0, dims[i]))) for i in ids]
    elif family == "PAULI":
        degree = {i: sum(i in s for s in scopes) for i in ids}
        factors = []
        for a, s in zip(names, scopes):
            letters = ""
            while not letters.strip("I"):
                letters = "".join(
                    str(rng.choice(list("IZ") if degree[i] >= 2 else list("IXYZ"))) for i in s
                )
            pauli = tensor_all(LabeledOperator([base_label(i, 2)], _PAULI[c]) for i, c in zip(s, letters))
            theta = float(rng.uniform(-1.0, 1.0))
            m = math.cosh(theta) * np.eye(pauli.dim) + math.sinh(theta) * pauli.matrix
            factors.append(QuantumFactor(a, tuple(s), LabeledOperator(pauli.labels, m)))
        variables = [QuantumVariable.from_matrix(i, random_psd(rng, 2, trace=2)) for i in ids]
    else:
        factors = [_psd_factor(rng, a, s, dims) for a, s in zip(names, scopes)]
        variables = [QuantumVariable.from_matrix(i, random_psd(rng, dims[i], trace=dims[i])) for i in ids]

    g = QuantumFactorGraph(tuple(variables), tuple(factors))
    pairs = []
    for i, a in g.edges:
        if family == "DIAGONAL":
            pairs.append(_diagonal_pair(rng, g, i, a))
        elif family == "DEG1":
            pairs.append(_strong_pair(rng, g, i, a))
        elif family == "IDENTITY":
            pairs.append(_identity_pair(g, i, a))
        elif len(g.incident(i)) >= 2:
            pairs.append(_diagonal_pair(rng, g, i, a))
        else:
            pairs.append(_identity_pair(g, i, a))
    return g, QuantumTransformSet.of(pairs)


def corrupt_transform(ts: QuantumTransformSet, edge, which="phi_hat", index=(0, 0), delta=0.1):
    """Copy of ``ts`` with one CJ entry of one edge's map shifted by ``delta``."""
    t = ts[edge]
    target = getattr(t, which)
    blk = np.array(target.cj_block())
    blk[index] += delta
    changed = SuperOperator(target.domain, target.codomain, blk)
    new = EdgeTransform(t.variable, t.factor, *(
        (changed, t.phi_hat) if which == "phi" else (t.phi, changed)
    ), t.mode)
    out = dict(ts.transforms)
    out[edge] = new
    return QuantumTransformSet(out)


def classical_embedding(g: QuantumFactorGraph):
    """Classical graph read off the diagonals of a quantum graph's operators."""
    from .classical import ClassicalFactor, ClassicalFactorGraph, ClassicalVariable

    variables = [ClassicalVariable(v.id, np.real(np.diag(v.op.matrix))) for v in g.variables]
    factors = []
    for f in g.factors:
        order = [base_label(i, g.variable(i).dim) for i in f.neighbors]
        diag = np.real(np.diag(f.op.matrix_in(order)))
        factors.append(ClassicalFactor(f.id, f.neighbors, diag.reshape([lab.dim for lab in order])))
    return ClassicalFactorGraph(tuple(variables), tuple(factors))


def classical_transforms_of(ts: QuantumTransformSet):
    """Classical pairs ``phi[x, y]``, ``phi_hat[y, z]`` read off diagonal CJ matrices."""
    from .classical import ClassicalEdgeTransform

    out = []
    for t in ts:
        q = t.dim
        phi = np.real(np.diag(t.phi.cj_block())).reshape(q, q)
        phi_hat = np.real(np.diag(t.phi_hat.cj_block())).reshape(q, q)
        out.append(ClassicalEdgeTransform(t.variable, t.factor, phi, phi_hat))
    return out
