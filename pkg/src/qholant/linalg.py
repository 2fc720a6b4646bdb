"""Labeled tensor-space linear algebra.

Every operator is a dense complex matrix bound to an ordered tuple of
:class:`SpaceLabel` legs.  The composite basis index is row-major over the legs
in canonical order, i.e. sorted by ``(identifier, tier)`` with
``BASE < HAT < PRIME``.  Constructors permute tensor legs into that order, so
two operators are equal exactly when their labels and matrices are.

Transposes are always taken in the fixed computational basis.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOL, MAX_DIM, Tolerances
from .errors import DimensionError, LabelError, PSDError, SizeGuardError


class Tier(enum.IntEnum):
    BASE = 0
    HAT = 1
    PRIME = 2


_TIER_MARK = {Tier.BASE: "", Tier.HAT: "^", Tier.PRIME: "'"}


@dataclass(frozen=True)
class SpaceLabel:
    """One tensor factor: a node or edge identifier, a tier and a dimension.

    Identifiers are tuples of strings.  Variable spaces use ``(i,)`` and edge
    spaces use ``(i, a)``, so a variable's space always sorts before the
    spaces of its incident edges.
    """

    ident: tuple
    tier: Tier
    dim: int

    def __post_init__(self):
        ident = (self.ident,) if isinstance(self.ident, str) else tuple(str(p) for p in self.ident)
        if not ident:
            raise LabelError("label identifier must be non-empty")
        object.__setattr__(self, "ident", ident)
        object.__setattr__(self, "tier", Tier(self.tier))
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise DimensionError(f"label {ident} has invalid dimension {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def key(self):
        return (self.ident, int(self.tier))

    @property
    def name(self):
        return ":".join(self.ident) + _TIER_MARK[self.tier]

    def retier(self, tier, ident=None):
        return SpaceLabel(self.ident if ident is None else ident, tier, self.dim)

    def __str__(self):
        return f"{self.name}[{self.dim}]"


def base_label(var, dim):
    return SpaceLabel((var,), Tier.BASE, dim)


def hat_label(var, factor, dim):
    return SpaceLabel((var, factor), Tier.HAT, dim)


def prime_label(var, factor, dim):
    return SpaceLabel((var, factor), Tier.PRIME, dim)


def _check_unique(labels):
    seen = set()
    for lab in labels:
        if not isinstance(lab, SpaceLabel):
            raise LabelError(f"expected SpaceLabel, got {type(lab).__name__}")
        if lab.key in seen:
            raise LabelError(f"duplicated label {lab.name}")
        seen.add(lab.key)


def _permute_legs(matrix, dims, order):
    n = len(dims)
    d = matrix.shape[0]
    t = matrix.reshape(tuple(dims) * 2)
    t = t.transpose(list(order) + [n + j for j in order])
    return np.ascontiguousarray(t).reshape(d, d)


class LabeledOperator:
    """Immutable dense operator on a labeled tensor product space."""

    __slots__ = ("_labels", "_matrix")

    def __init__(self, labels: Iterable[SpaceLabel], matrix):
        labels = tuple(labels)
        _check_unique(labels)
        dims = [lab.dim for lab in labels]
        total = math.prod(dims)
        if total > MAX_DIM:
            raise SizeGuardError(f"operator dimension {total} exceeds limit {MAX_DIM}")
        m = np.array(matrix, dtype=complex)
        if not labels and m.size == 1:
            m = m.reshape(1, 1)
        if m.shape != (total, total):
            raise DimensionError(
                f"matrix shape {m.shape} does not match labels "
                f"{[str(lab) for lab in labels]} (side {total})"
            )
        order = sorted(range(len(labels)), key=lambda j: labels[j].key)
        if order != list(range(len(labels))):
            m = _permute_legs(m, dims, order)
            labels = tuple(labels[j] for j in order)
        m.setflags(write=False)
        self._labels = labels
        self._matrix = m

    @property
    def labels(self) -> tuple:
        return self._labels

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dims(self):
        return [lab.dim for lab in self._labels]

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def keys(self):
        return [lab.key for lab in self._labels]

    def matrix_in(self, order: Sequence[SpaceLabel]) -> np.ndarray:
        """Matrix with legs in an explicit label order instead of canonical."""
        pos = {k: j for j, k in enumerate(self.keys)}
        if len(order) != len(pos) or any(lab.key not in pos for lab in order):
            raise LabelError("order must be a permutation of the operator's labels")
        perm = [pos[lab.key] for lab in order]
        if perm == sorted(perm):
            return np.array(self._matrix)
        return _permute_legs(self._matrix, self.dims, perm)

    def relabel(self, mapping) -> "LabeledOperator":
        """Rename legs; ``mapping`` maps old labels (or keys) to new labels."""
        new = []
        for lab in self._labels:
            target = mapping.get(lab, mapping.get(lab.key, lab))
            if target.dim != lab.dim:
                raise DimensionError(f"cannot relabel {lab} as {target}: dimension differs")
            new.append(target)
        return LabeledOperator(new, self._matrix)

    def with_matrix(self, matrix) -> "LabeledOperator":
        return LabeledOperator(self._labels, matrix)

    def scalar(self) -> complex:
        if self._labels:
            raise LabelError("operator still carries labels; trace them out first")
        return complex(self._matrix[0, 0])

    def __matmul__(self, other):
        return matmul(self, other)

    def __add__(self, other):
        a, b = _align(self, other)
        return LabeledOperator(a.labels, a.matrix + b.matrix)

    def __sub__(self, other):
        a, b = _align(self, other)
        return LabeledOperator(a.labels, a.matrix - b.matrix)

    def __mul__(self, c):
        return LabeledOperator(self._labels, self._matrix * c)

    __rmul__ = __mul__

    def __repr__(self):
        labs = ", ".join(str(lab) for lab in self._labels)
        return f"LabeledOperator([{labs}], dim={self.dim})"


def _align(a, b):
    if a.keys != b.keys:
        raise LabelError("operands act on different label sets")
    if a.dims != b.dims:
        raise DimensionError("operands have mismatched leg dimensions")
    return a, b


def label_union(*label_seqs) -> tuple:
    """Union of label sequences in canonical order; dims must agree per key."""
    found = {}
    for seq in label_seqs:
        for lab in seq:
            prev = found.get(lab.key)
            if prev is not None and prev.dim != lab.dim:
                raise DimensionError(f"label {lab.name} appears with dims {prev.dim} and {lab.dim}")
            found[lab.key] = lab
    return tuple(found[k] for k in sorted(found))


def identity(labels: Iterable[SpaceLabel]) -> LabeledOperator:
    labels = tuple(labels)
    return LabeledOperator(labels, np.eye(math.prod(lab.dim for lab in labels)))


def tensor_product(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    shared = {lab.key for lab in a.labels} & {lab.key for lab in b.labels}
    if shared:
        names = sorted(lab.name for lab in a.labels if lab.key in shared)
        raise LabelError(f"tensor product of overlapping labels: {', '.join(names)}")
    total = a.dim * b.dim
    if total > MAX_DIM:
        raise SizeGuardError(f"operator dimension {total} exceeds limit {MAX_DIM}")
    return LabeledOperator(a.labels + b.labels, np.kron(a.matrix, b.matrix))


def tensor_all(ops: Iterable[LabeledOperator]) -> LabeledOperator:
    return reduce(tensor_product, ops, LabeledOperator((), [[1.0]]))


def extend_identity(a: LabeledOperator, target: Iterable[SpaceLabel]) -> LabeledOperator:
    target = tuple(target)
    tkeys = {lab.key: lab for lab in target}
    for lab in a.labels:
        other = tkeys.get(lab.key)
        if other is None:
            raise LabelError(f"target labels do not contain {lab.name}")
        if other.dim != lab.dim:
            raise DimensionError(f"label {lab.name} has dim {lab.dim} but target says {other.dim}")
    own = set(a.keys)
    missing = [lab for lab in target if lab.key not in own]
    if not missing:
        return a
    return tensor_product(a, identity(missing))


def matmul(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    """Product ``a @ b`` after extending both to the union of their labels."""
    union = label_union(a.labels, b.labels)
    a = extend_identity(a, union)
    b = extend_identity(b, union)
    return LabeledOperator(union, a.matrix @ b.matrix)


def product(ops: Sequence[LabeledOperator]) -> LabeledOperator:
    """Left-to-right product of identity-extended operators."""
    ops = list(ops)
    if not ops:
        raise ValueError("empty product")
    union = label_union(*(op.labels for op in ops))
    m = None
    for op in ops:
        e = extend_identity(op, union).matrix
        m = e if m is None else m @ e
    return LabeledOperator(union, m)


def _positions(a, labels):
    keys = a.keys
    out = []
    for lab in labels:
        key = lab.key if isinstance(lab, SpaceLabel) else lab
        if key not in keys:
            raise LabelError(f"operator has no label {lab}")
        out.append(keys.index(key))
    return out


def partial_trace(a: LabeledOperator, traced: Iterable) -> LabeledOperator:
    """Trace out the given labels (SpaceLabel objects or their keys)."""
    idx = set(_positions(a, list(traced)))
    n = len(a.labels)
    if not idx:
        return a
    dims = a.dims
    t = a.matrix.reshape(tuple(dims) * 2)
    rows = list(range(n))
    cols = [j if j in idx else n + j for j in range(n)]
    keep = [j for j in range(n) if j not in idx]
    out = np.einsum(t, rows + cols, keep + [n + j for j in keep])
    d = math.prod(dims[j] for j in keep)
    return LabeledOperator([a.labels[j] for j in keep], out.reshape(d, d))


def trace_against(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    """``Tr_L(a (I (x) b))`` where ``L`` is the label set of ``b``.

    Same value as ``partial_trace(matmul(a, b), b.labels)`` but contracted
    directly, without forming the identity-extended product.
    """
    pos = _positions(a, b.labels)
    n, m = len(a.labels), len(b.labels)
    rows = list(range(n))
    cols = list(range(n, 2 * n))
    b_rows, b_cols = [], []
    for k, p in enumerate(pos):
        s, mid = 2 * n + k, 2 * n + m + k
        rows[p], cols[p] = s, mid
        b_rows.append(mid)
        b_cols.append(s)
    keep = [j for j in range(n) if j not in set(pos)]
    out = np.einsum(
        a.matrix.reshape(tuple(a.dims) * 2), rows + cols,
        b.matrix.reshape(tuple(b.dims) * 2), b_rows + b_cols,
        keep + [n + j for j in keep], optimize=True,
    )
    d = math.prod(a.dims[j] for j in keep)
    return LabeledOperator([a.labels[j] for j in keep], out.reshape(d, d))


def trace(a: LabeledOperator) -> complex:
    return complex(np.trace(a.matrix))


def transpose(a: LabeledOperator) -> LabeledOperator:
    return LabeledOperator(a.labels, a.matrix.T)


def dagger(a: LabeledOperator) -> LabeledOperator:
    return LabeledOperator(a.labels, a.matrix.conj().T)


def frobenius(a) -> float:
    m = a.matrix if isinstance(a, LabeledOperator) else a
    return float(np.linalg.norm(m))


def rel_distance(a: LabeledOperator, b: LabeledOperator) -> float:
    """``||a - b||_F / ||b||_F`` (absolute when ``b`` vanishes)."""
    _align(a, b)
    nb = frobenius(b)
    diff = float(np.linalg.norm(a.matrix - b.matrix))
    return diff / nb if nb > 0 else diff


def hermitian_residual(m) -> float:
    m = m.matrix if isinstance(m, LabeledOperator) else np.asarray(m)
    return float(np.linalg.norm(m - m.conj().T)) / max(1.0, float(np.linalg.norm(m)))


def psd_eigh(m, tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a PSD matrix with small negative eigenvalues clamped.

    Raises PSDError when the matrix is not Hermitian within ``tol.psd`` or has
    an eigenvalue below ``-tol.psd * max|eigenvalue|``.
    """
    m = m.matrix if isinstance(m, LabeledOperator) else np.asarray(m, dtype=complex)
    herm = hermitian_residual(m)
    if herm > tol.psd:
        raise PSDError(f"operator is not Hermitian (residual {herm:.3e})")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    if w.size:
        scale = float(np.max(np.abs(w)))
        if w[0] < -tol.psd * scale:
            raise PSDError(
                f"operator is not positive semidefinite: eigenvalue {w[0]:.3e} "
                f"(largest magnitude {scale:.3e})"
            )
    return np.clip(w, 0.0, None), v


def psd_violation(m, tol: Tolerances = DEFAULT_TOL):
    """None when ``m`` is PSD within tolerance, otherwise the failure message."""
    try:
        psd_eigh(m, tol)
    except PSDError as exc:
        return str(exc)
    return None


def _spectral(w, v, fw):
    r = (v * fw) @ v.conj().T
    return (r + r.conj().T) / 2


def psd_power(p: LabeledOperator, exponent: float, tol: Tolerances = DEFAULT_TOL) -> LabeledOperator:
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    w, v = psd_eigh(p, tol)
    return LabeledOperator(p.labels, _spectral(w, v, w**exponent))


def frac_power(p: LabeledOperator, n: int, tol: Tolerances = DEFAULT_TOL) -> LabeledOperator:
    """``p ** (1/n)`` for a PSD operator and positive integer ``n``."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return psd_power(p, 1.0 / int(n), tol)


def _support_basis(w, v, rank_tol):
    top = float(w[-1]) if w.size else 0.0
    if top <= 0:
        return v[:, :0]
    return v[:, w > rank_tol * top]


def support_projector(p: LabeledOperator, tol: Tolerances = DEFAULT_TOL) -> LabeledOperator:
    """Orthogonal projector onto the span of eigenvectors above the rank cutoff."""
    w, v = psd_eigh(p, tol)
    basis = _support_basis(w, v, p.dim * tol.rank)
    proj = basis @ basis.conj().T
    return LabeledOperator(p.labels, (proj + proj.conj().T) / 2)


def commutation_residual(a: LabeledOperator, b: LabeledOperator) -> float:
    """``||AB - BA||_F / max(1, ||A||_F ||B||_F)`` on the union of the labels."""
    union = label_union(a.labels, b.labels)
    am = extend_identity(a, union).matrix
    bm = extend_identity(b, union).matrix
    num = float(np.linalg.norm(am @ bm - bm @ am))
    return num / max(1.0, float(np.linalg.norm(am)) * float(np.linalg.norm(bm)))
