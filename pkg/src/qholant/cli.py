"""Command-line interface.

Exit codes: 0 success or PASS, 1 FAIL verdict, 2 usage or I/O error,
3 invariant violation in the inputs.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields

import numpy as np

from . import io
from .classical import (
    ClassicalFactorGraph,
    classical_transform,
    random_classical_graph,
    random_classical_transforms,
    verify_classical_holant,
    z_classical,
    z_transformed_classical,
)
from .config import DEFAULT_TOL, Tolerances
from .errors import DocumentError, HolantError, SizeGuardError
from .qholo import FAMILIES, SizeParams, gen_instance, transform_graph, verify_quantum_holant, z_transformed
from .quantum import (
    check_star_distributivity,
    find_odot_nondistributivity,
    random_triple_pair,
    z_quantum,
)
from .report import FAIL, PASS
from .sampling import rng_from

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3
WORKERS_ENV = "QHOLANT_WORKERS"
GEN_FAMILIES = FAMILIES + ("CLASSICAL",)


def fmt(x: float) -> str:
    return np.format_float_positional(float(x), trim="-")


def _tolerances(args) -> Tolerances:
    return DEFAULT_TOL.override(**{f.name: getattr(args, "tol_" + f.name) for f in fields(Tolerances)})


def _size(text) -> SizeParams:
    try:
        parts = [int(p) for p in text.split(",")]
        return SizeParams(*parts)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError("size is n_variables[,n_factors[,max_dim[,max_arity]]]") from None


def _seed_range(text):
    try:
        a, _, b = text.partition("..")
        lo, hi = int(a), int(b or a)
    except ValueError:
        raise argparse.ArgumentTypeError("seeds are given as a..b") from None
    if hi < lo:
        raise argparse.ArgumentTypeError("empty seed range")
    return range(lo, hi + 1)


def generate(family: str, size: SizeParams, seed: int):
    """(graph, transforms) for a quantum family or the classical generator."""
    if family.upper() == "CLASSICAL":
        rng = rng_from(seed)
        g = random_classical_graph(rng, size.n_variables, size.n_factors, size.max_dim, size.max_arity)
        return g, random_classical_transforms(rng, g)
    return gen_instance(family, size, seed)


def verify_pair(g, ts, tol, seed=0):
    if isinstance(g, ClassicalFactorGraph):
        return verify_classical_holant(g, ts, tol)
    return verify_quantum_holant(g, ts, tol, probe_seed=seed)


def _verify_seed(job):
    family, size, seed, tol = job
    start = time.perf_counter()
    g, ts = generate(family, size, seed)
    report = verify_pair(g, ts, tol, seed)
    return seed, report, time.perf_counter() - start


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    tol = common.add_argument_group("tolerances")
    for f in fields(Tolerances):
        tol.add_argument(
            "--tol-" + f.name.replace("_", "-"), dest="tol_" + f.name, type=float, default=None,
            metavar="X", help=f"default {f.default:g}",
        )

    p = argparse.ArgumentParser(prog="qholant", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("z", parents=[common], help="print the partition function of a graph")
    s.add_argument("graph")

    s = sub.add_parser("transform", parents=[common], help="write the transformed graph")
    s.add_argument("graph")
    s.add_argument("transforms")
    s.add_argument("-o", "--output", required=True)

    s = sub.add_parser("verify", parents=[common], help="check the Holant identity and write a report")
    s.add_argument("graph", nargs="?")
    s.add_argument("transforms", nargs="?")
    s.add_argument("--report", help="report path (JSON)")
    s.add_argument("--seed", type=int, default=0, help="seed of the ordering probe")
    s.add_argument("--seeds", type=_seed_range, help="batch mode: verify generated instances a..b")
    s.add_argument("--family", type=str.upper, choices=GEN_FAMILIES, default="DEG1")
    s.add_argument("--size", type=_size, default=SizeParams())

    s = sub.add_parser("gen", parents=[common], help="write a seeded graph and transform pair")
    s.add_argument("--family", type=str.upper, choices=GEN_FAMILIES, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=_size, default=SizeParams(), help="n_variables,n_factors,max_dim,max_arity")
    s.add_argument("-o", "--output", required=True, help="prefix; writes PREFIX.graph.json and PREFIX.transforms.json")

    s = sub.add_parser("check", parents=[common], help="product-law checks for star and odot")
    s.add_argument("which", choices=["star-dist", "odot-witness"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=None)
    return p


def cmd_z(args, tol):
    g = io.parse_graph(args.graph)
    z = z_classical(g) if isinstance(g, ClassicalFactorGraph) else z_quantum(g, tol)
    print(fmt(z))
    return EXIT_OK


def cmd_transform(args, tol):
    g = io.parse_graph(args.graph)
    ts = io.parse_transforms(args.transforms)
    if isinstance(g, ClassicalFactorGraph):
        t = classical_transform(g, ts, tol)
        zh = z_transformed_classical(t)
    else:
        t = transform_graph(g, ts, strict=True, tol=tol)
        zh = z_transformed(t, tol)
    io.write_json(args.output, io.transformed_to_doc(t, zh))
    print(f"Zhat = {fmt(complex(zh).real)}")
    return EXIT_OK


def _write_report(path, report, tol, seed, elapsed):
    if path:
        io.write_json(path, io.report_to_doc(report, tol, seed=seed, wall_clock=elapsed))


def cmd_verify(args, tol):
    if args.seeds is not None:
        return _verify_batch(args, tol)
    if not (args.graph and args.transforms):
        raise DocumentError("verify needs GRAPH and TRANSFORMS, or --seeds")
    start = time.perf_counter()
    g = io.parse_graph(args.graph)
    ts = io.parse_transforms(args.transforms)
    report = verify_pair(g, ts, tol, args.seed)
    _write_report(args.report, report, tol, args.seed, time.perf_counter() - start)
    print(report.summary())
    return EXIT_FAIL if report.verdict == FAIL else EXIT_OK


def _verify_batch(args, tol):
    jobs = [(args.family, args.size, s, tol) for s in args.seeds]
    workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_seed, jobs))
    else:
        results = [_verify_seed(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    docs = []
    failed = []
    for seed, report, elapsed in results:
        docs.append(io.report_to_doc(report, tol, seed=seed, wall_clock=elapsed))
        if report.verdict == FAIL:
            failed.append(seed)
    counts = {}
    for _, r, _ in results:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    if args.report:
        io.write_json(args.report, {"format": "qholant-report-batch", "version": io.VERSION, "reports": docs})
    print(f"{args.family}: {len(results)} instances, " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    if failed:
        print("failing seeds: " + " ".join(map(str, failed)))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_gen(args, tol):
    g, ts = generate(args.family, args.size, args.seed)
    io.write_graph(args.output + ".graph.json", g)
    io.write_transforms(args.output + ".transforms.json", ts)
    print(f"wrote {args.output}.graph.json and {args.output}.transforms.json")
    return EXIT_OK


def cmd_check(args, tol):
    if args.which == "star-dist":
        trials = args.trials or 500
        rng = rng_from(args.seed)
        worst = max(check_star_distributivity(*random_triple_pair(rng), tol) for _ in range(trials))
        ok = worst <= tol.commute
        print(f"star distributivity: max residual {worst:.3e} over {trials} pairs ({PASS if ok else FAIL})")
        return EXIT_OK if ok else EXIT_FAIL
    trials = args.trials or 100
    w = find_odot_nondistributivity(args.seed, trials=trials, tol=tol)
    if w is None:
        print(f"odot: no witness with discrepancy > 1e-3 in {trials} trials")
        return EXIT_FAIL
    print(f"odot witness at trial {w.trial}: lhs={w.lhs.real:.12g} rhs={w.rhs.real:.12g} rel.disc={w.discrepancy:.3e}")
    return EXIT_OK


COMMANDS = {"z": cmd_z, "transform": cmd_transform, "verify": cmd_verify, "gen": cmd_gen, "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = _tolerances(args)
        return COMMANDS[args.command](args, tol)
    except (DocumentError, SizeGuardError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HolantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
