import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qholant.classical import classical_transform, verify_classical_holant, z_transformed_classical
from qholant.errors import FormMismatchError, LabelError, SizeGuardError, TransformError
from qholant.io import dumps, graph_to_doc, transforms_to_doc
from qholant.linalg import LabeledOperator, base_label, commutation_residual, hat_label, prime_label
from qholant.qholo import (
    DIAGONAL,
    STRONG,
    EdgeTransform,
    QuantumTransformSet,
    SizeParams,
    TransformedQuantumGraph,
    classical_embedding,
    classical_transforms_of,
    corrupt_transform,
    gen_instance,
    prime_factor,
    swap_teleport_check,
    transform_factor,
    transform_graph,
    transform_variable,
    variable_trace_form,
    verify_quantum_holant,
    z_transformed,
)
from qholant.quantum import QuantumFactor, QuantumFactorGraph, QuantumVariable, z_quantum
from qholant.report import EXPLORATORY, FAIL, PASS
from qholant.sampling import random_invertible, random_psd, random_unitary
from qholant.superop import (
    adjoint,
    conjugation_map,
    diagonal_map,
    identity_map,
    invert,
    random_superoperator,
    relabel_map,
)


def labels(i, a, q):
    return base_label(i, q), hat_label(i, a, q), prime_label(i, a, q)


def identity_pair(i, a, q):
    b, h, p = labels(i, a, q)
    return EdgeTransform(i, a, identity_map([h], [b]), identity_map([p], [h]))


def strong_pair(rng, i, a, q):
    b, h, p = labels(i, a, q)
    phi = random_superoperator(rng, [h], [b], max_cond=1e2)
    return EdgeTransform(i, a, phi, relabel_map(invert(phi), domain=[p]))


def diag_pair(rng, i, a, q):
    b, h, p = labels(i, a, q)
    m = random_invertible(rng, q, real=True, max_cond=1e2)
    return EdgeTransform(i, a, diagonal_map(m, [h], [b]), diagonal_map(np.linalg.inv(m), [p], [h]), DIAGONAL)


def two_var_graph(rng, q=2):
    xs = (QuantumVariable.from_matrix("x", random_psd(rng, q)), QuantumVariable.from_matrix("y", random_psd(rng, q)))
    f = QuantumFactor.from_matrix("a", ["x", "y"], [q, q], random_psd(rng, q * q))
    return QuantumFactorGraph(xs, (f,))


def test_identity_factor_transform_retiers():
    rng = np.random.default_rng(50)
    g = two_var_graph(rng)
    ts = QuantumTransformSet.of([identity_pair(i, a, 2) for i, a in g.edges])
    fh = transform_factor(g, "a", ts)
    assert [l.name for l in fh.labels] == ["x:a^", "y:a^"]
    np.testing.assert_allclose(fh.matrix, g.factor("a").op.matrix, atol=1e-15)


def test_conjugation_factor_transform():
    rng = np.random.default_rng(51)
    f = random_psd(rng, 3)
    g = QuantumFactorGraph((QuantumVariable.from_matrix("x", np.eye(3)),), (QuantumFactor.from_matrix("a", ["x"], [3], f),))
    b, h, p = labels("x", "a", 3)
    u = random_unitary(rng, 3)
    t = EdgeTransform("x", "a", conjugation_map(u.conj().T, [h], [b]), conjugation_map(u, [p], [h]))
    fh = transform_factor(g, "a", QuantumTransformSet.of([t]))
    np.testing.assert_allclose(fh.matrix, u @ f @ u.conj().T, atol=1e-13)


def test_product_factor_transform():
    rng = np.random.default_rng(52)
    fx, fy = random_psd(rng, 2), random_psd(rng, 3)
    vs = (QuantumVariable.from_matrix("x", np.eye(2)), QuantumVariable.from_matrix("y", np.eye(3)))
    g = QuantumFactorGraph(vs, (QuantumFactor.from_matrix("a", ["x", "y"], [2, 3], np.kron(fx, fy)),))
    tx, ty = strong_pair(rng, "x", "a", 2), strong_pair(rng, "y", "a", 3)
    fh = transform_factor(g, "a", QuantumTransformSet.of([tx, ty]))
    want = np.kron(tx.phi_hat.apply_transfer(fx), ty.phi_hat.apply_transfer(fy))
    np.testing.assert_allclose(fh.matrix, want, atol=1e-12)


def test_degree_one_variable_transform():
    rng = np.random.default_rng(53)
    g = two_var_graph(rng)
    t = strong_pair(rng, "x", "a", 2)
    ts = QuantumTransformSet.of([t, identity_pair("y", "a", 2)])
    fx = transform_variable(g, "x", ts)
    want = adjoint(t.phi).apply_transfer(g.variable("x").op.matrix)
    np.testing.assert_allclose(fx.matrix, want, atol=1e-12)
    fy = transform_variable(g, "y", ts)
    np.testing.assert_allclose(fy.matrix, g.variable("y").op.matrix, atol=1e-15)


def test_degree_two_diagonal_order_independent():
    rng = np.random.default_rng(54)
    fi = random_psd(rng, 3)
    vs = (QuantumVariable.from_matrix("x", fi),)
    fs = tuple(QuantumFactor.from_matrix(a, ["x"], [3], np.diag(rng.uniform(0.5, 1.0, 3))) for a in ("a", "b"))
    g = QuantumFactorGraph(vs, fs)
    ts = QuantumTransformSet.of([diag_pair(rng, "x", a, 3) for a in ("a", "b")])
    one = variable_trace_form(g, "x", ts, ["a", "b"])
    two = variable_trace_form(g, "x", ts, ["b", "a"])
    np.testing.assert_allclose(one.matrix, two.matrix, atol=1e-12)
    np.testing.assert_allclose(transform_variable(g, "x", ts).matrix, one.matrix, atol=1e-12)


def test_identity_transforms_reproduce_z():
    for seed in range(5):
        g, _ = gen_instance("DEG1", SizeParams(4, 2, 3, 2), seed)
        ts = QuantumTransformSet.of([identity_pair(i, a, g.variable(i).dim) for i, a in g.edges])
        zh = z_transformed(transform_graph(g, ts))
        assert zh.real == pytest.approx(z_quantum(g), rel=1e-12)


def test_adjoint_pairing_oracle():
    rng = np.random.default_rng(55)
    fa, fi = random_psd(rng, 3), random_psd(rng, 3)
    g = QuantumFactorGraph(
        (QuantumVariable.from_matrix("x", fi),), (QuantumFactor.from_matrix("a", ["x"], [3], fa),)
    )
    t = strong_pair(rng, "x", "a", 3)
    zh = z_transformed(transform_graph(g, QuantumTransformSet.of([t])))
    # Tr(Phi_hat(f_a) Phi^*(f_i)) = Tr(Phi(Phi_hat(f_a)) f_i) = Tr(f_a f_i)
    assert zh == pytest.approx(np.trace(fa @ fi), rel=1e-10)


def test_z_transformed_coverage():
    with pytest.raises(LabelError):
        z_transformed(TransformedQuantumGraph({}, {"x": LabeledOperator((), [[2.0]])}))
    h = hat_label("x", "a", 2)
    op = LabeledOperator([h], np.eye(2))
    with pytest.raises(LabelError):
        z_transformed(TransformedQuantumGraph({"a": op, "b": op}, {"x": op}))


def test_missing_transform():
    rng = np.random.default_rng(56)
    g = two_var_graph(rng)
    with pytest.raises(TransformError, match=r"\(y,a\)"):
        verify_quantum_holant(g, QuantumTransformSet.of([identity_pair("x", "a", 2)]))


def test_diagonal_family_matches_classical():
    for seed in range(10):
        g, ts = gen_instance("DIAGONAL", SizeParams(4, 3, 3, 3), seed)
        r = verify_quantum_holant(g, ts)
        assert r.verdict == PASS
        cg, cts = classical_embedding(g), classical_transforms_of(ts)
        zc = z_transformed_classical(classical_transform(cg, cts))
        assert r.z_transformed.real == pytest.approx(zc, rel=1e-10)
        assert verify_classical_holant(cg, cts).verdict == PASS


def test_deg1_against_explicit_contraction():
    rng = np.random.default_rng(57)
    g = two_var_graph(rng)
    tx, ty = strong_pair(rng, "x", "a", 2), strong_pair(rng, "y", "a", 2)
    r = verify_quantum_holant(g, QuantumTransformSet.of([tx, ty]))
    assert r.verdict == PASS
    # explicit: (Phi_x (x) Phi_y)(Phi_hat_x (x) Phi_hat_y)(f_a) is f_a again; pair it with f_x (x) f_y
    f = g.factor("a").op.matrix
    assert r.z_original == pytest.approx(np.trace(f @ np.kron(g.variable("x").op.matrix, g.variable("y").op.matrix)))
    fx = adjoint(tx.phi).apply_transfer(g.variable("x").op.matrix)
    fy = adjoint(ty.phi).apply_transfer(g.variable("y").op.matrix)
    big = np.kron(tx.phi_hat.transfer, ty.phi_hat.transfer)
    # transfer of a tensor product map acts on vec(X (x) Y) with legs interleaved
    t4 = f.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(16)
    fh = (big @ t4).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    assert np.trace(fh @ np.kron(fx, fy)) == pytest.approx(r.z_transformed, rel=1e-10)


def test_corrupted_phi_hat_names_edge():
    g, ts = gen_instance("DEG1", SizeParams(3, 2, 2, 2), 4)
    e = g.edges[1]
    r = verify_quantum_holant(g, corrupt_transform(ts, e, "phi_hat", (1, 2), 0.1))
    assert r.verdict == FAIL
    assert r.failed_edges == [e]
    assert f"({e[0]},{e[1]})" in r.failures[0]


def test_noncommuting_phis_are_exploratory():
    rng = np.random.default_rng(58)
    vs = (QuantumVariable.from_matrix("x", random_psd(rng, 2)),)
    fs = tuple(QuantumFactor.from_matrix(a, ["x"], [2], np.eye(2)) for a in ("a", "b"))
    g = QuantumFactorGraph(vs, fs)
    ts = QuantumTransformSet.of([identity_pair("x", "a", 2), identity_pair("x", "b", 2)])
    r = verify_quantum_holant(g, ts)
    assert r.verdict == EXPLORATORY
    assert r.node_commutation["x"] > 1e-9
    # generic invertible pairs on a shared node do not commute: the two forms split apart
    with pytest.raises(FormMismatchError):
        transform_graph(g, QuantumTransformSet.of([strong_pair(rng, "x", a, 2) for a in ("a", "b")]))


def test_swap_teleport_examples():
    p = prime_label("x", "a", 2)
    assert swap_teleport_check(LabeledOperator([p], np.eye(2))) == 0
    e01 = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert swap_teleport_check(LabeledOperator([p], e01)) == 0
    rng = np.random.default_rng(59)
    two = [prime_label("x", "a", 2), prime_label("y", "a", 2)]
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert swap_teleport_check(LabeledOperator(two, m)) <= 1e-12
    with pytest.raises(LabelError):
        swap_teleport_check(LabeledOperator([base_label("x", 2)], np.eye(2)))


def test_prime_factor_retiers():
    g, _ = gen_instance("DEG1", SizeParams(2, 1, 2, 2), 0)
    a = g.factors[0].id
    fp = prime_factor(g, a)
    assert all(l.name.endswith("'") for l in fp.labels)
    np.testing.assert_array_equal(fp.matrix, g.factor(a).op.matrix)


def test_gen_deterministic():
    size = SizeParams(2, 1, 2, 2)
    one = gen_instance("DEG1", size, 7)
    two = gen_instance("DEG1", size, 7)
    assert dumps(graph_to_doc(one[0])) == dumps(graph_to_doc(two[0]))
    assert dumps(transforms_to_doc(one[1])) == dumps(transforms_to_doc(two[1]))
    assert len(one[0].factors) == 1 and len(one[0].variables) == 2


def test_gen_pauli_commutes():
    for seed in range(20):
        g, _ = gen_instance("PAULI", SizeParams(4, 4, 2, 3), seed)
        for j, fa in enumerate(g.factors):
            for fb in g.factors[j + 1:]:
                assert commutation_residual(fa.op, fb.op) <= 1e-12


def test_gen_diagonal_condition():
    g, ts = gen_instance("DIAGONAL", SizeParams(4, 3, 3, 3), 3)
    assert all(t.mode == DIAGONAL for t in ts)
    assert max(ts.inverse_residuals().values()) <= 1e-10


def test_gen_modes_by_degree():
    g, ts = gen_instance("PAULI", SizeParams(4, 4, 2, 3), 1)
    for (i, a), t in ts.transforms.items():
        assert t.mode == (DIAGONAL if len(g.incident(i)) >= 2 else STRONG)
    g, ts = gen_instance("IDENTITY", SizeParams(4, 2, 3, 2), 1)
    assert all(len(g.incident(v.id)) == 1 for v in g.variables)


def test_gen_rejects_oversize():
    with pytest.raises(SizeGuardError):
        gen_instance("IDENTITY", SizeParams(13, 1, 2, 13), 0)
    with pytest.raises(ValueError):
        gen_instance("NOPE", SizeParams(), 0)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**31 - 1),
    family=st.sampled_from(["DIAGONAL", "DEG1", "PAULI", "IDENTITY"]),
    n=st.integers(1, 4),
    m=st.integers(1, 3),
)
def test_generated_instances_pass(seed, family, n, m):
    g, ts = gen_instance(family, SizeParams(n, m, 2, 3), seed)
    r = verify_quantum_holant(g, ts)
    assert r.verdict == PASS, r.summary()
    assert r.form_disagreement <= 1e-10
    assert r.transposed_discrepancy <= 1e-10
    if family == "IDENTITY":
        assert r.discrepancy <= 1e-12
