"""Seeded property suites behind the acceptance criteria and the scripts.

Every suite returns a :class:`SuiteResult`; ``passed`` compares the measured
statistic with the stated bound and ``detail`` holds a one-line summary.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .classical import (
    classical_transform,
    random_classical_graph,
    random_classical_transforms,
    verify_classical_holant,
    z_classical,
    z_transformed_classical,
)
from .config import DEFAULT_TOL, MAX_CLASSICAL_STATES, Tolerances
from .errors import SizeGuardError
from .linalg import LabeledOperator, SpaceLabel, base_label, hat_label, prime_label
from .qholo import (
    FAMILIES,
    SizeParams,
    classical_embedding,
    classical_transforms_of,
    corrupt_transform,
    gen_instance,
    verify_quantum_holant,
)
from .quantum import (
    check_star_distributivity,
    density_operator,
    find_odot_nondistributivity,
    random_triple_pair,
    trotter_errors,
    z_quantum,
)
from .report import FAIL, PASS
from .sampling import random_psd
from .superop import (
    adjoint,
    apply,
    check_strong_inverse,
    cj_from_action,
    compose,
    invert,
    matrix_unit,
    random_superoperator,
    relabel_map,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f} s)"


def _timed(fn):
    def run(*args, **kwargs):
        start = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - start
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# --- instance sizing ------------------------------------------------------------

def classical_instance(seed, max_variables=6, max_domain=3, max_factors=5, max_arity=3):
    """Random classical graph plus invertible transforms whose edge space fits the guard."""
    rng = np.random.default_rng([seed, 101])
    while True:
        n = int(rng.integers(1, max_variables + 1))
        m = int(rng.integers(0, max_factors + 1))
        g = random_classical_graph(rng, n, m, max_domain=max_domain, max_arity=max_arity, min_domain=1)
        edge_space = math.prod(g.variable(i).size for i, _ in g.edges)
        if edge_space <= MAX_CLASSICAL_STATES:
            return g, random_classical_transforms(rng, g)


def quantum_instance(family, seed, max_total=256):
    """Seeded instance of ``family`` with total and hat dimension at most ``max_total``."""
    rng = np.random.default_rng([seed, FAMILIES.index(family)])
    while True:
        size = SizeParams(
            n_variables=int(rng.integers(1, 5)),
            n_factors=int(rng.integers(1, 4)),
            max_dim=int(rng.integers(2, 4)),
            max_arity=int(rng.integers(1, 4)),
        )
        try:
            g, ts = gen_instance(family, size, seed)
        except SizeGuardError:
            continue
        if g.total_dim <= max_total and math.prod(t.dim for t in ts) <= max_total:
            return g, ts


def _strict_rel(r):
    # reports floor the denominator at 1; acceptance divides by |Z| itself
    return abs(r.z_original - r.z_transformed) / abs(r.z_original)


# --- criteria ---------------------------------------------------------------------

@_timed
def classical_holant_suite(seeds=1000, tol: Tolerances = DEFAULT_TOL, time_limit=60.0):
    worst, bad = 0.0, []
    for s in range(seeds):
        g, ts = classical_instance(s)
        r = verify_classical_holant(g, ts, tol)
        rel = _strict_rel(r)
        worst = max(worst, rel)
        if rel > 1e-9:
            bad.append(s)
    res = SuiteResult("classical Holant", not bad, f"{seeds} graphs, max rel. discrepancy {worst:.2e}")
    res.stats = {"worst": worst, "bad": bad, "time_limit": time_limit}
    return res


@_timed
def quantum_holant_suite(seeds=500, families=FAMILIES, tol: Tolerances = DEFAULT_TOL, time_limit=300.0):
    worst, bad = {}, []
    for fam in families:
        worst[fam] = 0.0
        for s in range(seeds):
            g, ts = quantum_instance(fam, s)
            r = verify_quantum_holant(g, ts, tol, probe_seed=s)
            rel = _strict_rel(r)
            worst[fam] = max(worst[fam], rel)
            if r.verdict != PASS or rel > 1e-8:
                bad.append((fam, s, r.verdict))
    per = ", ".join(f"{f} {w:.1e}" for f, w in worst.items())
    res = SuiteResult(
        "quantum Holant", not bad, f"{seeds} seeds x {len(families)} families, max rel. discrepancy {per}"
    )
    res.stats = {"worst": worst, "bad": bad, "time_limit": time_limit}
    return res


@_timed
def cj_fidelity_suite(maps=200, seed=0):
    rng = np.random.default_rng(seed)
    rep = pair = inv = 0.0
    for k in range(maps):
        q_in, q_out = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        dom, cod = base_label(f"in{k}", q_in), base_label(f"out{k}", q_out)
        m = rng.standard_normal((q_out**2, q_in**2)) + 1j * rng.standard_normal((q_out**2, q_in**2))

        def action(e, m=m, q_in=q_in, q_out=q_out):
            return (m @ e.reshape(q_in * q_in)).reshape(q_out, q_out)

        t = cj_from_action(action, [dom], [cod])
        ta = adjoint(t)
        for a in range(q_in):
            for b in range(q_in):
                e = matrix_unit(q_in, a, b)
                got = apply(t, LabeledOperator([dom], e)).matrix
                rep = max(rep, float(np.max(np.abs(got - action(e)))))
                for c in range(q_out):
                    for d in range(q_out):
                        f = matrix_unit(q_out, c, d)
                        lhs = np.trace(f @ t.apply_transfer(e))
                        rhs = np.trace(ta.apply_transfer(f) @ e)
                        pair = max(pair, abs(lhs - rhs))
        # and once on dense random arguments
        e = rng.standard_normal((q_in, q_in)) + 1j * rng.standard_normal((q_in, q_in))
        f = rng.standard_normal((q_out, q_out)) + 1j * rng.standard_normal((q_out, q_out))
        lhs = np.trace(f @ t.apply_transfer(e))
        pair = max(pair, abs(lhs - np.trace(ta.apply_transfer(f) @ e)) / max(1.0, abs(lhs)))
        sq = random_superoperator(rng, [dom], [base_label(f"mid{k}", q_in)], max_cond=1e3)
        ident = compose(sq, invert(sq)).transfer
        inv = max(inv, float(np.linalg.norm(ident - np.eye(q_in**2)) / math.sqrt(q_in**2)))
    ok = rep <= 1e-12 and pair <= 1e-12 and inv <= 1e-9
    res = SuiteResult(
        "CJ fidelity", ok, f"{maps} maps, action {rep:.1e}, adjoint pairing {pair:.1e}, T o T^-1 {inv:.1e}"
    )
    res.stats = {"representation": rep, "pairing": pair, "inverse": inv}
    return res


@_timed
def inverse_equivalence_suite(pairs=200, seed=0, tol=1e-9, corrupted=200):
    """Swap-witness form against the composition form of the inverse condition.

    ``pairs`` exact inverses must pass both checks; ``corrupted`` extra pairs
    with one shifted CJ entry must fail both, so agreement is not vacuous.
    """
    rng = np.random.default_rng(seed)
    agree = correct = 0
    for k in range(pairs + corrupted):
        q = int(rng.integers(1, 4))
        b, h, p = base_label("x", q), hat_label("x", "a", q), prime_label("x", "a", q)
        phi = random_superoperator(rng, [h], [b], max_cond=1e3)
        blk = np.array(relabel_map(invert(phi), domain=[p]).cj_block())
        bad = k >= pairs
        if bad:
            blk[int(rng.integers(q * q)), int(rng.integers(q * q))] += 0.1
        ok_swap, ok_comp = check_strong_inverse(phi.cj, LabeledOperator([h, p], blk)).verdicts(tol)
        agree += ok_swap == ok_comp
        correct += ok_swap == (not bad)
    n = pairs + corrupted
    res = SuiteResult(
        "inverse-condition equivalence", agree == n and correct == n,
        f"{pairs} exact + {corrupted} corrupted pairs, verdicts agree {agree}/{n}, match construction {correct}/{n}",
    )
    res.stats = {"agree": agree, "correct": correct}
    return res


@_timed
def product_law_suite(star_pairs=500, odot_trials=100, trotter_pairs=50, seed=0):
    rng = np.random.default_rng(seed)
    star_worst = max(check_star_distributivity(*random_triple_pair(rng)) for _ in range(star_pairs))
    witness = find_odot_nondistributivity(seed, trials=odot_trials)
    lab = SpaceLabel("A", 0, 2)
    ns = [16, 32, 64, 128]
    ratios = []
    for _ in range(trotter_pairs):
        a = LabeledOperator([lab], random_psd(rng, 2))
        b = LabeledOperator([lab], random_psd(rng, 2))
        err = trotter_errors(a, b, ns)
        ratios += [err[j] / err[j + 1] for j in range(3)]
    lo, hi = min(ratios), max(ratios)
    ok = star_worst <= 1e-9 and witness is not None and 2.5 <= lo and hi <= 6.0
    wtxt = f"odot witness at trial {witness.trial} ({witness.discrepancy:.2e})" if witness else "no odot witness"
    res = SuiteResult(
        "star/odot laws", ok, f"star dist. {star_worst:.1e}, {wtxt}, Trotter ratios [{lo:.3f}, {hi:.3f}]"
    )
    res.stats = {"star": star_worst, "witness": witness, "ratios": (lo, hi)}
    return res


@_timed
def diagonal_reduction_suite(graphs=100):
    z_gap = t_gap = 0.0
    for s in range(graphs):
        g, ts = quantum_instance("DIAGONAL", s)
        cg = classical_embedding(g)
        zq, zc = z_quantum(g), z_classical(cg)
        z_gap = max(z_gap, abs(zq - zc) / abs(zc))
        zh = verify_quantum_holant(g, ts).z_transformed
        zhc = z_transformed_classical(classical_transform(cg, classical_transforms_of(ts)))
        t_gap = max(t_gap, abs(zh - zhc) / abs(zhc))
    ok = z_gap <= 1e-10 and t_gap <= 1e-10
    res = SuiteResult("diagonal reduction", ok, f"{graphs} graphs, Z gap {z_gap:.1e}, Zhat gap {t_gap:.1e}")
    res.stats = {"z": z_gap, "zhat": t_gap}
    return res


@_timed
def density_operator_suite(graphs=200):
    trace_gap = neg = 0.0
    for s in range(graphs):
        g, _ = quantum_instance(FAMILIES[s % len(FAMILIES)], s)
        w = np.linalg.eigvalsh(density_operator(g).matrix)
        trace_gap = max(trace_gap, abs(w.sum() - 1.0))
        neg = max(neg, -w.min() / w.max())
    ok = trace_gap <= 1e-10 and neg <= 1e-9
    res = SuiteResult(
        "density operator", ok, f"{graphs} graphs, |Tr rho - 1| {trace_gap:.1e}, min eig / max eig {-neg:.1e}"
    )
    res.stats = {"trace": trace_gap, "neg": neg}
    return res


@_timed
def fault_injection_suite(trials=100, seed=0):
    """Shift one CJ entry of one map by 0.1 on STRONG-mode instances."""
    rng = np.random.default_rng(seed)
    flipped = named = 0
    for k in range(trials):
        g, ts = quantum_instance(("DEG1", "IDENTITY")[k % 2], k)
        edges = list(ts.transforms)
        e = edges[int(rng.integers(len(edges)))]
        which = ("phi", "phi_hat")[int(rng.integers(2))]
        q2 = ts[e].dim ** 2
        idx = (int(rng.integers(q2)), int(rng.integers(q2)))
        r = verify_quantum_holant(g, corrupt_transform(ts, e, which, idx, 0.1))
        flipped += r.verdict == FAIL
        named += r.failed_edges == [e]
    ok = flipped >= 0.99 * trials and named >= 0.99 * trials
    res = SuiteResult("fault injection", ok, f"FAIL in {flipped}/{trials}, edge named in {named}/{trials}")
    res.stats = {"flipped": flipped, "named": named}
    return res


ALL = (
    classical_holant_suite,
    quantum_holant_suite,
    cj_fidelity_suite,
    inverse_equivalence_suite,
    product_law_suite,
    diagonal_reduction_suite,
    density_operator_suite,
    fault_injection_suite,
)
