import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qholant.errors import LabelError, PSDError, SizeGuardError
from qholant.linalg import (
    LabeledOperator,
    SpaceLabel,
    Tier,
    base_label,
    commutation_residual,
    extend_identity,
    frac_power,
    hat_label,
    identity,
    matmul,
    partial_trace,
    prime_label,
    support_projector,
    tensor_product,
    trace,
    trace_against,
    transpose,
)
from qholant.sampling import random_psd, random_unit_vector

V1, V2, V3 = base_label("v1", 2), base_label("v2", 2), base_label("v3", 3)


def op(label, m):
    return LabeledOperator([label], np.asarray(m, dtype=complex))


def test_canonical_order_sorts_ident_then_tier():
    labs = [prime_label("x", "a", 2), base_label("x", 2), hat_label("x", "a", 2), base_label("w", 2)]
    m = np.eye(16)
    o = LabeledOperator(labs, m)
    assert [l.name for l in o.labels] == ["w", "x", "x:a^", "x:a'"]
    assert Tier.BASE < Tier.HAT < Tier.PRIME


def test_label_validation():
    with pytest.raises(ValueError):
        SpaceLabel("x", Tier.BASE, 0)
    with pytest.raises(LabelError):
        LabeledOperator([V1, V1], np.eye(4))
    with pytest.raises(ValueError):
        LabeledOperator([V1], np.eye(3))


def test_dimension_guard():
    big = [base_label(f"q{k}", 2) for k in range(13)]
    with pytest.raises(SizeGuardError):
        identity(big)


def test_tensor_identity():
    out = tensor_product(op(V1, np.eye(2)), op(V2, np.eye(2)))
    assert out.labels == (V1, V2)
    np.testing.assert_array_equal(out.matrix, np.eye(4))


def test_tensor_diagonal():
    out = tensor_product(op(V1, np.diag([1, 2])), op(V2, np.diag([3, 4])))
    np.testing.assert_array_equal(out.matrix, np.diag([3, 4, 6, 8]))


def test_tensor_reorders_legs():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    ab = tensor_product(op(V1, a), op(V2, b))
    ba = tensor_product(op(V2, b), op(V1, a))
    np.testing.assert_array_equal(ab.matrix, ba.matrix)
    # explicit permutation of np.kron(b, a): swap the two legs by hand
    k = np.kron(b, a).reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    np.testing.assert_array_equal(ba.matrix, k)


def test_tensor_overlap_names_label():
    with pytest.raises(LabelError, match="v1"):
        tensor_product(op(V1, np.eye(2)), op(V1, np.eye(2)))


def test_tensor_associative():
    rng = np.random.default_rng(1)
    # small integers: every product is exact, so the legs must line up bit for bit
    a, b, c = (op(l, rng.integers(-9, 10, size=(l.dim, l.dim))) for l in (V2, V3, V1))
    left = tensor_product(tensor_product(a, b), c)
    right = tensor_product(a, tensor_product(b, c))
    np.testing.assert_array_equal(left.matrix, right.matrix)
    # general floats: equal up to the rounding of a triple product
    a, b, c = (op(l, rng.normal(size=(l.dim, l.dim))) for l in (V2, V3, V1))
    left = tensor_product(tensor_product(a, b), c)
    right = tensor_product(a, tensor_product(b, c))
    np.testing.assert_allclose(left.matrix, right.matrix, rtol=4e-16, atol=0)


def test_extend_identity():
    a = op(V1, [[1, 2], [3, 4]])
    assert extend_identity(a, [V1]).matrix.tolist() == a.matrix.tolist()
    np.testing.assert_array_equal(extend_identity(a, [V1, V2]).matrix, np.kron(a.matrix, np.eye(2)))
    ext = extend_identity(a, [V1, V2, V3])
    assert trace(ext) == pytest.approx(trace(a) * 6)
    with pytest.raises(LabelError):
        extend_identity(a, [V2])


def test_partial_trace_product_state():
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(3, 3))
    ab = tensor_product(op(V1, a), op(V3, b))
    np.testing.assert_allclose(partial_trace(ab, [V3]).matrix, np.trace(b) * a, atol=1e-14)
    assert partial_trace(identity([V1, V2]), [V1, V2]).scalar() == 4


def test_partial_trace_of_swap_is_identity():
    q = 3
    left, right = base_label("l", q), base_label("r", q)
    f = np.zeros((q * q, q * q))
    for k in range(q):
        for l in range(q):
            f[k * q + l, l * q + k] = 1.0
    swap = LabeledOperator([left, right], f)
    np.testing.assert_array_equal(partial_trace(swap, [left]).matrix, np.eye(q))
    np.testing.assert_array_equal(partial_trace(swap, [right]).matrix, np.eye(q))


def test_partial_trace_unknown_label():
    with pytest.raises(LabelError):
        partial_trace(identity([V1]), [V2])


def test_partial_trace_sequential_matches_joint():
    rng = np.random.default_rng(3)
    labs = [V1, V2, V3]
    a = LabeledOperator(labs, rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12)))
    joint = partial_trace(a, [V1, V3])
    seq = partial_trace(partial_trace(a, [V3]), [V1])
    np.testing.assert_allclose(seq.matrix, joint.matrix, rtol=1e-14, atol=1e-13)
    for s in ([V1], [V2, V3], labs):
        assert abs(trace(partial_trace(a, s)) - trace(a)) <= 1e-14 * abs(trace(a)) + 1e-13


def test_transpose():
    rng = np.random.default_rng(4)
    assert np.array_equal(transpose(identity([V3])).matrix, np.eye(3))
    a = op(V3, rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    b = op(V3, rng.normal(size=(3, 3)))
    assert np.array_equal(transpose(transpose(a)).matrix, a.matrix)
    lhs = trace(transpose(a) @ transpose(b))
    assert lhs == pytest.approx(np.trace(b.matrix @ a.matrix), rel=1e-13)


def test_frac_power_examples():
    np.testing.assert_allclose(frac_power(op(V1, np.diag([4.0, 9.0])), 2).matrix, np.diag([2.0, 3.0]), atol=1e-14)
    rng = np.random.default_rng(5)
    p = LabeledOperator([V1, V2], random_psd(rng, 4))
    np.testing.assert_allclose(frac_power(p, 1).matrix, p.matrix, atol=1e-13)
    r = frac_power(p, 3).matrix
    rel = np.linalg.norm(r @ r @ r - p.matrix) / np.linalg.norm(p.matrix)
    assert rel <= 1e-12
    assert commutation_residual(frac_power(p, 3), p) <= 1e-12


def test_frac_power_rejects_negative():
    with pytest.raises(PSDError):
        frac_power(op(V1, np.diag([1.0, -0.1])), 2)
    with pytest.raises(PSDError):
        frac_power(op(V1, [[1.0, 1.0], [0.0, 1.0]]), 2)


def test_frac_power_clamps_tiny_negative():
    out = frac_power(op(V1, np.diag([1.0, -1e-12])), 2)
    np.testing.assert_allclose(out.matrix, np.diag([1.0, 0.0]), atol=1e-15)


def test_support_projector():
    np.testing.assert_array_equal(support_projector(op(V1, np.diag([1.0, 0.0]))).matrix.real, np.diag([1.0, 0.0]))
    rng = np.random.default_rng(6)
    full = LabeledOperator([V1, V2], random_psd(rng, 4))
    np.testing.assert_allclose(support_projector(full).matrix, np.eye(4), atol=1e-12)
    psi = random_unit_vector(rng, 3)
    proj = support_projector(op(V3, np.outer(psi, psi.conj()))).matrix
    assert np.trace(proj).real == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(proj @ proj, proj, atol=1e-12)
    np.testing.assert_allclose(proj, proj.conj().T, atol=1e-12)


def test_commutation_residual():
    assert commutation_residual(op(V1, np.diag([1, 2])), op(V1, np.diag([5, -1]))) == 0
    r = commutation_residual(op(V1, np.diag([1, 2])), op(V1, [[0, 1], [1, 0]]))
    # ||AB - BA||_F = sqrt(2), ||A||_F ||B||_F = sqrt(5) sqrt(2)
    assert r == pytest.approx(np.sqrt(2) / np.sqrt(10))
    a = op(V1, [[1, 2], [3, 4]])
    assert commutation_residual(a, a) == 0
    # operators on disjoint spaces commute after extension
    assert commutation_residual(a, op(V2, [[0, 1], [1, 0]])) == 0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4), n=st.integers(1, 5))
def test_support_sandwich_and_power_commute(seed, rank, n):
    rng = np.random.default_rng(seed)
    p = LabeledOperator([V1, V2], random_psd(rng, 4, rank=rank))
    s = support_projector(p).matrix
    assert np.linalg.norm(s @ p.matrix @ s - p.matrix) <= 1e-10 * np.linalg.norm(p.matrix)
    assert commutation_residual(frac_power(p, n), p) <= 1e-12
    assert np.trace(s).real == pytest.approx(rank, abs=1e-9)


def test_trace_against_matches_dense_route():
    rng = np.random.default_rng(60)
    labs = [V1, V3, V2]
    a = LabeledOperator(labs, rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12)))
    b = LabeledOperator([V2, V1], rng.normal(size=(4, 4)))
    dense = partial_trace(matmul(a, b), [V1, V2])
    np.testing.assert_allclose(trace_against(a, b).matrix, dense.matrix, atol=1e-12)
