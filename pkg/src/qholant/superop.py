"""Linear maps between operator spaces in the Choi-Jamiolkowski representation.

For ``T: B(H_A) -> B(H_B)`` the CJ matrix is
``tau = sum_{k,l} T(E_kl) (x) E_kl`` on ``H_B (x) H_A`` and
``T(G) = Tr_A(tau (I_B (x) G^T))``.  The transfer matrix acts on row-major
vectorized operators, ``vec(X)[k*d + l] = X[k, l]``; it is the realignment of
``tau`` and turns composition and inversion into matrix algebra.

The adjoint is taken with respect to the bilinear pairing
``Tr(B T(A)) = Tr(T*(B) A)``, so its CJ matrix is simply ``tau`` transposed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Callable

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionError, InvariantError, LabelError
from .linalg import (
    LabeledOperator,
    SpaceLabel,
    label_union,
    matmul,
    partial_trace,
    rel_distance,
    tensor_product,
    trace_against,
    transpose,
)


def _canon(labels):
    if isinstance(labels, SpaceLabel):
        labels = (labels,)
    return tuple(sorted(labels, key=lambda lab: lab.key))


def _dim(labels):
    return math.prod(lab.dim for lab in labels)


def matrix_unit(d, k, l):
    e = np.zeros((d, d), dtype=complex)
    e[k, l] = 1.0
    return e


def _realign(m, d_out, d_in):
    """Swap between the CJ layout [(out,in),(out',in')] and transfer layout [(out,out'),(in,in')]."""
    return m.reshape(d_out, d_in, d_out, d_in).transpose(0, 2, 1, 3).reshape(d_out * d_out, d_in * d_in)


def _unrealign(t, d_out, d_in):
    return t.reshape(d_out, d_out, d_in, d_in).transpose(0, 2, 1, 3).reshape(d_out * d_in, d_out * d_in)


def shadow(lab: SpaceLabel) -> SpaceLabel:
    """Stand-in label for a domain leg that coincides with a codomain leg."""
    return SpaceLabel(lab.ident + ("<in>",), lab.tier, lab.dim)


class SuperOperator:
    """Linear map ``B(domain) -> B(codomain)`` stored as its CJ matrix.

    Domain and codomain are tuples of labels in canonical order.  When they
    share a label (maps of a space into itself), the CJ matrix carries the
    domain legs under :func:`shadow` labels.
    """

    def __init__(self, domain, codomain, cj):
        self.domain = _canon(domain)
        self.codomain = _canon(codomain)
        self.cj_domain = self.domain
        if {l.key for l in self.domain} & {l.key for l in self.codomain}:
            self.cj_domain = tuple(shadow(l) for l in self.domain)
        d_in, d_out = self.d_in, self.d_out
        if isinstance(cj, LabeledOperator):
            union = label_union(self.codomain, self.cj_domain)
            if cj.keys != [l.key for l in union] or cj.dims != [l.dim for l in union]:
                raise LabelError(
                    f"CJ matrix labels {[str(x) for x in cj.labels]} do not match "
                    f"codomain+domain {[str(x) for x in union]}"
                )
            block = cj.matrix_in(self.codomain + self.cj_domain)
        else:
            block = np.array(cj, dtype=complex)
            if block.shape != (d_out * d_in, d_out * d_in):
                raise DimensionError(f"CJ block shape {block.shape} != {(d_out * d_in,) * 2}")
        block.setflags(write=False)
        self._block = block

    @property
    def d_in(self) -> int:
        return _dim(self.domain)

    @property
    def d_out(self) -> int:
        return _dim(self.codomain)

    def cj_block(self) -> np.ndarray:
        """CJ matrix with all codomain legs first, then all domain legs."""
        return self._block

    @cached_property
    def cj(self) -> LabeledOperator:
        return LabeledOperator(self.codomain + self.cj_domain, self._block)

    @cached_property
    def transfer(self) -> np.ndarray:
        t = _realign(self._block, self.d_out, self.d_in)
        t.setflags(write=False)
        return t

    @classmethod
    def from_transfer(cls, domain, codomain, transfer) -> "SuperOperator":
        domain, codomain = _canon(domain), _canon(codomain)
        d_in, d_out = _dim(domain), _dim(codomain)
        transfer = np.asarray(transfer, dtype=complex)
        if transfer.shape != (d_out * d_out, d_in * d_in):
            raise DimensionError(f"transfer shape {transfer.shape} != {(d_out**2, d_in**2)}")
        return cls(domain, codomain, _unrealign(transfer, d_out, d_in))

    def apply_transfer(self, g) -> np.ndarray:
        m = g.matrix_in(self.domain) if isinstance(g, LabeledOperator) else np.asarray(g)
        return (self.transfer @ m.reshape(-1)).reshape(self.d_out, self.d_out)

    def __call__(self, g):
        return apply(self, g)

    def __repr__(self):
        dom = ",".join(lab.name for lab in self.domain)
        cod = ",".join(lab.name for lab in self.codomain)
        return f"SuperOperator(B({dom}) -> B({cod}))"


def cj_from_action(action: Callable, domain, codomain) -> SuperOperator:
    """CJ matrix ``sum_kl action(E_kl) (x) E_kl`` from images of matrix units.

    ``action`` receives a domain matrix unit as an ndarray (legs in canonical
    domain order) and returns an ndarray or a LabeledOperator on the codomain.
    """
    domain, codomain = _canon(domain), _canon(codomain)
    d_in, d_out = _dim(domain), _dim(codomain)
    tau = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for k in range(d_in):
        for l in range(d_in):
            img = action(matrix_unit(d_in, k, l))
            if isinstance(img, LabeledOperator):
                if img.keys != [lab.key for lab in codomain]:
                    raise LabelError("action returned an operator on the wrong labels")
                img = img.matrix
            img = np.asarray(img, dtype=complex)
            if img.shape != (d_out, d_out):
                raise DimensionError(f"image of E_{k}{l} has shape {img.shape}, expected {(d_out, d_out)}")
            tau += np.kron(img, matrix_unit(d_in, k, l))
    return SuperOperator(domain, codomain, tau)


def apply(t: SuperOperator, g: LabeledOperator) -> LabeledOperator:
    """``Tr_A(tau (I_B (x) G^T))``."""
    if g.keys != [lab.key for lab in t.domain] or g.dims != [lab.dim for lab in t.domain]:
        raise LabelError(
            f"operator on {[str(x) for x in g.labels]} is not in the domain "
            f"{[str(x) for x in t.domain]}"
        )
    if t.cj_domain is not t.domain:
        g = g.relabel(dict(zip((l.key for l in t.domain), t.cj_domain)))
    return trace_against(t.cj, transpose(g))


def identity_map(domain, codomain=None) -> SuperOperator:
    """Matrix-unit-to-matrix-unit map from ``domain`` onto ``codomain``.

    With distinct labels this is the relabeling isomorphism between two copies
    of the same space.
    """
    domain = _canon(domain)
    codomain = domain if codomain is None else _canon(codomain)
    if [lab.dim for lab in domain] != [lab.dim for lab in codomain]:
        raise DimensionError("identity map requires matching dimensions")
    return cj_from_action(lambda e: e, domain, codomain)


def relabel_map(t: SuperOperator, domain=None, codomain=None) -> SuperOperator:
    """Same map with renamed domain and/or codomain legs (position-wise)."""
    new_dom = t.domain if domain is None else _canon(domain)
    new_cod = t.codomain if codomain is None else _canon(codomain)
    if [l.dim for l in new_dom] != [l.dim for l in t.domain]:
        raise LabelError("domain relabel must keep the leg dimensions")
    if [l.dim for l in new_cod] != [l.dim for l in t.codomain]:
        raise LabelError("codomain relabel must keep the leg dimensions")
    return SuperOperator(new_dom, new_cod, t.cj_block())


def adjoint(t: SuperOperator) -> SuperOperator:
    """Map with ``Tr(B T(A)) = Tr(T*(B) A)``; its CJ matrix is ``tau^T``."""
    d_in, d_out = t.d_in, t.d_out
    blk = t.cj_block().reshape(d_out, d_in, d_out, d_in).transpose(3, 2, 1, 0)
    return SuperOperator(t.codomain, t.domain, blk.reshape(d_in * d_out, d_in * d_out))


def compose(t: SuperOperator, t_inner: SuperOperator) -> SuperOperator:
    """``t o t_inner`` (apply ``t_inner`` first)."""
    if [l.key for l in t.domain] != [l.key for l in t_inner.codomain] or t.d_in != t_inner.d_out:
        raise DimensionError(f"cannot compose {t} after {t_inner}")
    return SuperOperator.from_transfer(t_inner.domain, t.codomain, t.transfer @ t_inner.transfer)


def invert(t: SuperOperator, tol: Tolerances = DEFAULT_TOL) -> SuperOperator:
    """Inverse map ``B(codomain) -> B(domain)``; refuses ill-conditioned maps."""
    if t.d_in != t.d_out:
        raise DimensionError("only maps between equal-dimensional spaces can be inverted")
    cond = float(np.linalg.cond(t.transfer))
    if not np.isfinite(cond) or cond > tol.condition:
        raise InvariantError(f"transfer matrix is singular or ill-conditioned (cond {cond:.3e})", None, cond)
    return SuperOperator.from_transfer(t.codomain, t.domain, np.linalg.inv(t.transfer))


def _tag(lab, side):
    return SpaceLabel(lab.ident + (side,), lab.tier, lab.dim)


def _tagged_cj(t: SuperOperator) -> LabeledOperator:
    """CJ matrix on tagged copies of the legs, so domain and codomain never collide."""
    return LabeledOperator(
        [_tag(l, "<out>") for l in t.codomain] + [_tag(l, "<in>") for l in t.domain], t.cj_block()
    )


def _from_tagged(op: LabeledOperator, domain, codomain) -> SuperOperator:
    domain, codomain = _canon(domain), _canon(codomain)
    order = [_tag(l, "<out>") for l in codomain] + [_tag(l, "<in>") for l in domain]
    return SuperOperator(domain, codomain, op.matrix_in(order))


def otimes(t: SuperOperator, t2: SuperOperator) -> SuperOperator:
    """Tensor product of maps acting on disjoint spaces."""
    cj = tensor_product(_tagged_cj(t), _tagged_cj(t2))
    return _from_tagged(cj, t.domain + t2.domain, t.codomain + t2.codomain)


def otimes_all(maps) -> SuperOperator:
    return reduce(otimes, list(maps))


def bar_otimes(t: SuperOperator, t2: SuperOperator) -> SuperOperator:
    """``(t (x)bar t2)(E (x) E') = t(E) t2(E')`` for maps sharing a codomain.

    The CJ matrix is the product of the two identity-extended CJ matrices in
    argument order.
    """
    if [l.key for l in t.codomain] != [l.key for l in t2.codomain] or t.d_out != t2.d_out:
        raise LabelError("bar_otimes requires identical codomains")
    if {l.key for l in t.domain} & {l.key for l in t2.domain}:
        raise LabelError("bar_otimes requires disjoint domains")
    cj = matmul(_tagged_cj(t), _tagged_cj(t2))
    return _from_tagged(cj, t.domain + t2.domain, t.codomain)


def bar_otimes_all(maps) -> SuperOperator:
    """Left fold of ``bar_otimes`` in the given order."""
    maps = list(maps)
    if not maps:
        raise ValueError("empty bar_otimes")
    return reduce(bar_otimes, maps)


def swap_witness(left: SpaceLabel, right: SpaceLabel) -> LabeledOperator:
    """``sum_kl |k><l| (x) |l><k|`` on ``left (x) right``."""
    if left.dim != right.dim:
        raise DimensionError("swap witness needs equal dimensions")
    q = left.dim
    f = np.zeros((q * q, q * q))
    for k in range(q):
        for l in range(q):
            f[k * q + l, l * q + k] = 1.0
    return LabeledOperator([left, right], f)


def diagonal_witness(left: SpaceLabel, right: SpaceLabel) -> LabeledOperator:
    """``sum_j |j><j| (x) |j><j|`` on ``left (x) right``."""
    if left.dim != right.dim:
        raise DimensionError("diagonal witness needs equal dimensions")
    q = left.dim
    f = np.zeros((q * q, q * q))
    for j in range(q):
        f[j * q + j, j * q + j] = 1.0
    return LabeledOperator([left, right], f)


def _pair_roles(phi: LabeledOperator, phi_hat: LabeledOperator):
    """Split labels into (outer of phi, shared hat space, outer of phi_hat)."""
    if len(phi.labels) != 2 or len(phi_hat.labels) != 2:
        raise LabelError("phi and phi_hat must each act on exactly two spaces")
    shared = set(phi.keys) & set(phi_hat.keys)
    if len(shared) != 1:
        raise LabelError("phi and phi_hat must share exactly one space")
    (key,) = shared
    hat = next(l for l in phi.labels if l.key == key)
    outer = next(l for l in phi.labels if l.key != key)
    outer2 = next(l for l in phi_hat.labels if l.key != key)
    if not (outer.dim == hat.dim == outer2.dim):
        raise DimensionError("all three spaces of an edge must share one dimension")
    return outer, hat, outer2


def inverse_pair_product(phi: LabeledOperator, phi_hat: LabeledOperator) -> LabeledOperator:
    """``Tr_hat(phi_hat^T phi)`` on the two outer spaces."""
    _, hat, _ = _pair_roles(phi, phi_hat)
    return partial_trace(matmul(transpose(phi_hat), phi), [hat])


@dataclass(frozen=True)
class InverseCheck:
    """Residuals of the two equivalent forms of ``Phi Phi_hat = id``.

    ``swap`` compares ``Tr_hat(phi_hat^T phi)`` with the swap witness and
    ``composition`` compares the composed map with the relabeling identity on
    every matrix unit; both are normalized by the witness norm.
    """

    swap: float
    composition: float

    @property
    def residual(self) -> float:
        return self.swap

    def verdicts(self, tol: float):
        return self.swap <= tol, self.composition <= tol


def check_strong_inverse(phi: LabeledOperator, phi_hat: LabeledOperator) -> InverseCheck:
    outer, hat, outer2 = _pair_roles(phi, phi_hat)
    witness = swap_witness(outer, outer2)
    swap = rel_distance(inverse_pair_product(phi, phi_hat), witness)
    big = SuperOperator([hat], [outer], phi)
    small = SuperOperator([outer2], [hat], phi_hat)
    comp = compose(big, small)
    q = outer.dim
    total = 0.0
    for k in range(q):
        for l in range(q):
            img = comp.apply_transfer(matrix_unit(q, k, l))
            total += float(np.linalg.norm(img - matrix_unit(q, k, l))) ** 2
    return InverseCheck(swap, math.sqrt(total) / q)


def check_diagonal_inverse(phi: LabeledOperator, phi_hat: LabeledOperator) -> float:
    """Residual of ``Tr_hat(phi_hat^T phi) = sum_j |j><j| (x) |j><j|``."""
    outer, _, outer2 = _pair_roles(phi, phi_hat)
    return rel_distance(inverse_pair_product(phi, phi_hat), diagonal_witness(outer, outer2))


def random_superoperator(rng, domain, codomain, max_cond=1e3) -> SuperOperator:
    """Random invertible map (Gaussian transfer matrix with bounded condition number)."""
    from .sampling import random_invertible

    domain, codomain = _canon(domain), _canon(codomain)
    d_in, d_out = _dim(domain), _dim(codomain)
    if d_in == d_out:
        return SuperOperator.from_transfer(domain, codomain, random_invertible(rng, d_in * d_in, max_cond=max_cond))
    g = rng.standard_normal((d_out**2, d_in**2)) + 1j * rng.standard_normal((d_out**2, d_in**2))
    return SuperOperator.from_transfer(domain, codomain, g)


def conjugation_map(u, domain, codomain) -> SuperOperator:
    """``X -> U X U^dagger`` from ``domain`` to ``codomain``."""
    u = np.asarray(u, dtype=complex)
    return cj_from_action(lambda e: u @ e @ u.conj().T, domain, codomain)


def diagonal_map(matrix, domain, codomain) -> SuperOperator:
    """Diagonal CJ map ``E_yy -> sum_x matrix[x, y] E_xx``, off-diagonal units to zero."""
    m = np.asarray(matrix, dtype=float)

    def action(e):
        k, l = np.argwhere(e)[0]
        if k != l:
            return np.zeros((m.shape[0], m.shape[0]))
        return np.diag(m[:, k])

    return cj_from_action(action, domain, codomain)
