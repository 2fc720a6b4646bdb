import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm, logm

from qholant.classical import z_classical
from qholant.errors import DegenerateModelError, InvariantError, LabelError, SizeGuardError
from qholant.linalg import LabeledOperator, SpaceLabel, tensor_product
from qholant.qholo import SizeParams, classical_embedding, gen_instance
from qholant.quantum import (
    QuantumFactor,
    QuantumFactorGraph,
    QuantumVariable,
    check_star_distributivity,
    density_operator,
    find_odot_nondistributivity,
    find_star_noncommutativity,
    odot,
    odot_distributivity_sides,
    random_triple_pair,
    star_distributivity_sides,
    star,
    star_n,
    trotter_errors,
    z_quantum,
)
from qholant.sampling import random_psd

A = SpaceLabel("A", 0, 2)
B = SpaceLabel("B", 0, 2)
C = SpaceLabel("C", 0, 2)

# Λ = [[2,1],[1,1]] has det 1 and trace 3, so sqrt(Λ) = (Λ + I)/sqrt(5) in closed
# form; sqrt(Λ) diag(1,3) sqrt(Λ) evaluates to the matrix below.
STAR_EXAMPLE = np.array([[2.4, 1.8], [1.8, 2.6]])


def qop(label, m):
    return LabeledOperator([label], np.asarray(m, dtype=complex))


def test_star_commuting_and_identity():
    lam, lam2 = qop(A, np.diag([2.0, 0.5])), qop(A, np.diag([3.0, 4.0]))
    for n in (1, 2, 7):
        np.testing.assert_allclose(star_n(lam, lam2, n).matrix, np.diag([6.0, 2.0]), atol=1e-13)
        np.testing.assert_allclose(star_n(qop(A, np.eye(2)), lam2, n).matrix, lam2.matrix, atol=1e-13)


def test_star_spectral_example():
    out = star(qop(A, [[2, 1], [1, 1]]), qop(A, np.diag([1, 3])))
    np.testing.assert_allclose(out.matrix, STAR_EXAMPLE, atol=1e-14)


def test_star_extends_to_label_union():
    lam, lam2 = qop(A, np.diag([1.0, 4.0])), qop(B, np.diag([2.0, 3.0]))
    out = star(lam, lam2)
    assert out.labels == (A, B)
    np.testing.assert_allclose(out.matrix, np.kron(np.diag([1.0, 4.0]), np.diag([2.0, 3.0])), atol=1e-13)


def test_star_rejects_bad_n():
    with pytest.raises(ValueError):
        star_n(qop(A, np.eye(2)), qop(A, np.eye(2)), 0)


def test_odot_examples():
    lam, lam2 = qop(A, np.diag([2.0, 0.5])), qop(A, np.diag([3.0, 4.0]))
    np.testing.assert_allclose(odot(lam, lam2).matrix, np.diag([6.0, 2.0]), atol=1e-13)
    zero = odot(qop(A, np.diag([1.0, 0.0])), qop(A, np.diag([0.0, 1.0])))
    assert np.all(zero.matrix == 0)


def test_odot_matches_scipy_on_full_rank():
    rng = np.random.default_rng(20)
    for _ in range(5):
        a, b = random_psd(rng, 3), random_psd(rng, 3)
        want = expm(logm(a) + logm(b))
        lab = SpaceLabel("A", 0, 3)
        got = odot(LabeledOperator([lab], a), LabeledOperator([lab], b)).matrix
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_odot_rank_deficient_restricts_to_intersection():
    # supports span{e0, e1} and span{e1, e2}: S = span{e1}
    lab = SpaceLabel("A", 0, 3)
    a = LabeledOperator([lab], np.diag([2.0, 3.0, 0.0]))
    b = LabeledOperator([lab], np.diag([0.0, 5.0, 7.0]))
    np.testing.assert_allclose(odot(a, b).matrix, np.diag([0.0, 15.0, 0.0]), atol=1e-12)


def test_star_converges_to_odot():
    rng = np.random.default_rng(21)
    lam, lam2 = qop(A, random_psd(rng, 2)), qop(A, random_psd(rng, 2))
    errs = trotter_errors(lam, lam2, [1, 4, 16, 64, 256])
    assert all(x > y for x, y in zip(errs, errs[1:]))
    assert errs[-1] < 1e-4


def test_odot_commutative_associative():
    rng = np.random.default_rng(22)
    for _ in range(10):
        x, y, z = (qop(A, random_psd(rng, 2)) for _ in range(3))
        np.testing.assert_allclose(odot(x, y).matrix, odot(y, x).matrix, atol=1e-8)
        np.testing.assert_allclose(odot(odot(x, y), z).matrix, odot(x, odot(y, z)).matrix, atol=1e-8)


def test_star_noncommutativity_witness():
    w = find_star_noncommutativity(seed=0, trials=100)
    assert w is not None and w.gap > 1e-6


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4), n=st.integers(1, 6))
def test_star_output_psd(seed, rank, n):
    rng = np.random.default_rng(seed)
    lam = LabeledOperator([A, B], random_psd(rng, 4, rank=rank))
    lam2 = LabeledOperator([A, B], random_psd(rng, 4))
    out = star_n(lam, lam2, n).matrix
    w = np.linalg.eigvalsh(out)
    assert w.min() >= -1e-9 * max(w.max(), 1e-300)


def single_var_graph(fi, fa=None):
    v = QuantumVariable.from_matrix("x", fi)
    factors = () if fa is None else (QuantumFactor.from_matrix("a", ["x"], [len(fi)], fa),)
    return QuantumFactorGraph((v,), factors)


def test_z_without_factors_and_identity_factors():
    rng = np.random.default_rng(23)
    f1, f2 = random_psd(rng, 2), random_psd(rng, 3)
    vs = (QuantumVariable.from_matrix("x", f1), QuantumVariable.from_matrix("y", f2))
    expect = np.trace(f1).real * np.trace(f2).real
    assert z_quantum(QuantumFactorGraph(vs)) == pytest.approx(expect, rel=1e-13)
    eye = (QuantumFactor.from_matrix("a", ["x", "y"], [2, 3], np.eye(6)),)
    assert z_quantum(QuantumFactorGraph(vs, eye)) == pytest.approx(expect, rel=1e-13)


def test_diagonal_graph_matches_classical():
    for seed in range(10):
        g, _ = gen_instance("DIAGONAL", SizeParams(4, 3, 3, 3), seed)
        assert z_quantum(g) == pytest.approx(z_classical(classical_embedding(g)), rel=1e-10)


def test_graph_invariants():
    with pytest.raises(InvariantError, match="variable x"):
        single_var_graph(np.diag([1.0, -0.5]))
    x = QuantumVariable.from_matrix("x", np.eye(2))
    zf = QuantumFactor.from_matrix("a", ["x"], [2], np.diag([1.0, 2.0]))
    xf = QuantumFactor.from_matrix("b", ["x"], [2], np.eye(2) + 0.5 * np.array([[0, 1], [1, 0]]))
    with pytest.raises(InvariantError, match="a and b"):
        QuantumFactorGraph((x,), (zf, xf))
    big = tuple(QuantumVariable.from_matrix(f"q{k}", np.eye(2)) for k in range(13))
    with pytest.raises(SizeGuardError):
        QuantumFactorGraph(big)


def test_density_operator_examples():
    fi = np.array([[2.0, 0.5], [0.5, 1.0]])
    rho = density_operator(single_var_graph(fi, np.eye(2)))
    np.testing.assert_allclose(rho.matrix, fi / 3.0, atol=1e-14)
    with pytest.raises(DegenerateModelError):
        density_operator(single_var_graph(np.zeros((2, 2))))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), family=st.sampled_from(["DEG1", "PAULI", "DIAGONAL", "IDENTITY"]))
def test_density_operator_properties(seed, family):
    g, _ = gen_instance(family, SizeParams(3, 2, 2, 3), seed)
    rho = density_operator(g)
    w = np.linalg.eigvalsh(rho.matrix)
    assert abs(np.trace(rho.matrix) - 1) <= 1e-10
    assert w.min() >= -1e-9 * w.max()


def test_star_distributivity_examples():
    eye = LabeledOperator([A, B], np.eye(4)), LabeledOperator([B, C], np.eye(4))
    lhs, rhs = star_distributivity_sides(*eye)
    assert lhs == pytest.approx(8.0, abs=1e-14) and rhs == pytest.approx(8.0, abs=1e-14)
    assert check_star_distributivity(*eye) <= 1e-15
    rng = np.random.default_rng(24)
    ab = tensor_product(qop(A, random_psd(rng, 2)), qop(B, random_psd(rng, 2)))
    bc = tensor_product(qop(B, random_psd(rng, 2)), qop(C, random_psd(rng, 2)))
    assert check_star_distributivity(ab, bc) <= 1e-12
    with pytest.raises(LabelError):
        check_star_distributivity(LabeledOperator([A, B], np.eye(4)), LabeledOperator([A, B], np.eye(4)))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_star_distributivity_random(seed):
    rng = np.random.default_rng(seed)
    assert check_star_distributivity(*random_triple_pair(rng)) <= 1e-9


def test_odot_nondistributivity():
    assert find_odot_nondistributivity(0, trials=50, family="diagonal") is None
    w = find_odot_nondistributivity(5, trials=100)
    assert w is not None and w.discrepancy > 1e-3
    again = find_odot_nondistributivity(5, trials=100)
    assert again.trial == w.trial and again.discrepancy == w.discrepancy
    lhs, rhs = odot_distributivity_sides(w.lam_ab, w.lam_bc)
    assert abs(lhs - rhs) / abs(lhs) == w.discrepancy
