"""Command-line front end: compile reductions, run oracles, verify, bench.

Exit codes: 0 YES/success, 1 NO (or disagreements found), 2 usage/parse
error, 3 enumeration cap exceeded. The INVFORGE_CAP environment variable
overrides every enumeration cap.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import random
import statistics
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import instances, oracles, reductions
from .instances import (
    CnfFormula,
    CvpInstance,
    HalfCliqueQuery,
    ParseError,
    VertexCoverQuery,
    assignment_satisfies,
    clique_weight,
    gen_random_cvp,
    gen_random_graph,
    gen_random_ksat,
    is_clique,
    is_cover,
    parse_cvp,
    parse_dimacs,
    parse_graph,
)
from .oracles import (
    CapExceeded,
    count_sat_assignments,
    enumerate_patterns_invert,
    falsify_real,
    invert_binary_bruteforce,
    solve_cvp01_bruteforce,
    solve_halfclique_bruteforce,
    solve_sat_bruteforce,
    solve_vertexcover_bruteforce,
)
from .relunet import distance_pow, forward
from .reductions import (
    DOMAIN_REAL,
    ReductionArtifact,
    UnsupportedReduction,
    artifact_from_json,
    artifact_to_json,
    backward_witness,
    constants_valid,
    cvp_to_approx_binary,
    cvp_to_approx_real,
    forward_witness,
    halfclique_to_approx,
    halfclique_to_approx_real,
    sat_to_exact_binary,
    sat_to_exact_real,
    vertexcover_to_approx,
)

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_CAP = 3

CSV_COLUMNS = ("family", "n", "trials", "median_ms", "states")


@dataclass
class VerifyReport:
    family: str
    trials: int
    agreements: int
    disagreements: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "trials": self.trials,
            "agreements": self.agreements,
            "disagreements": self.disagreements,
            "wall_time_s": self.wall_time_s,
        }

    @property
    def passed(self) -> bool:
        return not self.disagreements


@dataclass
class BenchRecord:
    family: str
    n: int
    trials: int
    median_ms: float
    states: int


# -- reduce ------------------------------------------------------------------


def _build_artifact(args) -> ReductionArtifact:
    text = Path(args.in_file).read_text()
    family, latent = args.family, args.latent
    if family == "sat":
        formula = parse_dimacs(text)
        if args.p not in (None, 1):
            raise UnsupportedReduction("exact queries compare at distance zero; p is fixed to 1")
        if latent == "binary":
            return sat_to_exact_binary(formula)
        return sat_to_exact_real(formula)
    if family == "cvp":
        inst = parse_cvp(text)
        if args.p is not None and args.p != inst.p:
            raise UnsupportedReduction(f"--p {args.p} contradicts the instance file (p={inst.p})")
        if latent == "binary":
            return cvp_to_approx_binary(inst)
        return cvp_to_approx_real(inst)
    if family == "halfclique":
        g = parse_graph(text)
        if args.bound is None:
            raise UnsupportedReduction("half-clique needs --bound")
        query = HalfCliqueQuery(g, Fraction(args.bound))
        p = 2 if args.p is None else args.p
        if latent == "binary":
            return halfclique_to_approx(query, p)
        return halfclique_to_approx_real(query, p)
    if family == "vertexcover":
        g = parse_graph(text)
        if args.size is None:
            raise UnsupportedReduction("vertex cover needs --size")
        query = VertexCoverQuery(g, args.size)
        p = 2 if args.p is None else args.p
        if latent == "real":
            raise UnsupportedReduction(
                "no real-latent route for vertex cover; use --latent binary"
            )
        return vertexcover_to_approx(query, p)
    raise UnsupportedReduction(f"unknown family {family!r}")


def cmd_reduce(args) -> int:
    artifact = _build_artifact(args)
    Path(args.out_file).write_text(artifact_to_json(artifact))
    net = artifact.query.network
    summary = {
        "out": args.out_file,
        "width": net.width,
        "depth": net.depth,
        "latent_dim": artifact.query.domain.dim,
        "domain": artifact.query.domain.kind,
        "p": artifact.query.p,
        "threshold_pow": str(artifact.query.threshold_pow),
        "constants": {k: str(v) for k, v in artifact.constants.items()},
        "constants_valid": constants_valid(artifact),
    }
    print(json.dumps(summary, sort_keys=True))
    return EXIT_YES


# -- invert -------------------------------------------------------------------


def cmd_invert(args) -> int:
    artifact = artifact_from_json(Path(args.query).read_text())
    query = artifact.query
    if args.oracle == "brute":
        verdict = invert_binary_bruteforce(query)
    elif args.oracle == "pattern":
        verdict = enumerate_patterns_invert(query)
    elif args.oracle == "falsify":
        hi = artifact.constants.get("clamp_hi", 1)
        verdict = falsify_real(
            query, restarts=args.restarts, seed=args.seed, corner_levels=(0, hi)
        )
    else:
        raise ValueError(f"unknown oracle {args.oracle!r}")
    print(json.dumps(verdict.to_dict(), sort_keys=True))
    return EXIT_YES if verdict.is_yes else EXIT_NO


# -- verify -------------------------------------------------------------------


def _check_sat_roundtrip(formula: CnfFormula, artifact, invert) -> tuple[bool, dict]:
    source = solve_sat_bruteforce(formula)
    query_verdict = invert(artifact.query)
    agree = source.is_yes == query_verdict.is_yes
    detail = {"source": source.decision, "query": query_verdict.decision}
    if source.is_yes:
        assignment = tuple(bool(v) for v in source.witness)
        latent = forward_witness(artifact, assignment)
        dist = distance_pow(forward(artifact.query.network, latent), artifact.query.target, artifact.query.p)
        if dist.value > artifact.query.threshold_pow:
            agree = False
            detail["witness_forward"] = "failed"
    if query_verdict.is_yes and query_verdict.witness is not None:
        back = backward_witness(artifact, query_verdict.witness)
        if not assignment_satisfies(formula, back):
            agree = False
            detail["witness_back"] = "failed"
    if not constants_valid(artifact):
        agree = False
        detail["constants"] = "invalid"
    return agree, detail


def _boundary_cvp(seed: int, p: int) -> CvpInstance:
    """A diagonal-dominant instance whose minimum distance is exactly the radius."""
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    radius = Fraction(1, 2)
    basis = tuple(
        tuple(Fraction(2 if r == i else 0) for i in range(n)) for r in range(n)
    )
    anchor = [rng.randint(0, 1) for _ in range(n)]
    target = list(Fraction(2 * anchor[r]) for r in range(n))
    target[0] -= radius
    return CvpInstance(basis, tuple(target), radius, p)


def _tie_free_bound(g, p: int, rng: random.Random) -> Fraction:
    """A half-clique bound no clique weight can equal exactly.

    Achievable weights lie in (1/D)Z for D = lcm of the weight denominators,
    so an odd numerator over 2D can never tie.
    """
    denom = 1
    for _, _, root in g.edges:
        w = root**p
        denom = denom * w.denominator // math.gcd(denom, w.denominator)
    total = sum((root**p for _, _, root in g.edges), Fraction(0))
    top = max(2, int(2 * denom * (total + 1)))
    return Fraction(2 * rng.randint(0, top) + 1, 2 * denom)


def run_verify(
    family: str,
    n_max: int,
    trials: int,
    seed: int,
    p: int | None = None,
    exhaustive: bool = False,
    restarts: int = 2000,
) -> VerifyReport:
    """Generate instances, solve both sides, and record agreements."""
    started = time.perf_counter()
    report = VerifyReport(family=family, trials=0, agreements=0)

    def record(trial_seed, agree: bool, detail: dict):
        report.trials += 1
        if agree:
            report.agreements += 1
        else:
            report.disagreements.append({"seed": trial_seed, **detail})

    if family == "sat":
        if exhaustive:
            for formula in iter_all_formulas(min(n_max, 3), 2, 3):
                artifact = sat_to_exact_binary(formula)
                agree, detail = _check_sat_roundtrip(formula, artifact, invert_binary_bruteforce)
                record("exhaustive", agree, detail)
        else:
            for t in range(trials):
                ts = seed * 100_003 + t
                rng = random.Random(ts)
                n = rng.randint(1, n_max)
                m = rng.randint(1, max(1, 2 * n))
                k = rng.randint(1, min(3, n))
                formula = gen_random_ksat(n, m, k, ts)
                artifact = sat_to_exact_binary(formula)
                agree, detail = _check_sat_roundtrip(formula, artifact, invert_binary_bruteforce)
                record(ts, agree, detail)
    elif family == "sat-real":
        for t in range(trials):
            ts = seed * 100_003 + t
            rng = random.Random(ts)
            n = rng.randint(1, min(n_max, 2))
            m = rng.randint(1, 2)
            k = rng.randint(1, min(2, n))
            formula = gen_random_ksat(n, m, k, ts)
            artifact = sat_to_exact_real(formula)
            agree, detail = _check_sat_roundtrip(formula, artifact, enumerate_patterns_invert)
            record(ts, agree, detail)
    elif family == "cvp":
        use_p = p if p is not None else 1
        for t in range(trials):
            ts = seed * 100_003 + t
            rng = random.Random(ts)
            n = rng.randint(1, n_max)
            d = rng.randint(1, min(5, n_max))
            inst = gen_random_cvp(n, d, seed=ts, p=use_p)
            agree, detail = _check_cvp_roundtrip(inst)
            record(ts, agree, detail)
        boundary = _boundary_cvp(seed, use_p)
        source = solve_cvp01_bruteforce(boundary)
        artifact = cvp_to_approx_binary(boundary, strict=False)
        query_verdict = invert_binary_bruteforce(artifact.query)
        agree = source.is_yes and query_verdict.is_yes
        record("boundary", agree, {"source": source.decision, "query": query_verdict.decision})
    elif family == "cvp-real":
        use_p = p if p is not None else 1
        for t in range(trials):
            ts = seed * 100_003 + t
            rng = random.Random(ts)
            n = rng.randint(1, min(n_max, 3))
            d = rng.randint(1, 2)
            inst = gen_random_cvp(n, d, seed=ts, p=use_p)
            agree, detail = _check_cvp_real(inst, restarts, ts)
            record(ts, agree, detail)
    elif family == "halfclique":
        use_p = p if p is not None else 2
        sizes = [n for n in range(4, n_max + 1, 2)] or [4]
        for t in range(trials):
            ts = seed * 100_003 + t
            rng = random.Random(ts)
            n = rng.choice(sizes)
            g = gen_random_graph(n, 0.5, seed=ts)
            bound = _tie_free_bound(g, use_p, rng)
            hq = HalfCliqueQuery(g, bound)
            agree, detail = _check_halfclique_roundtrip(hq, use_p)
            record(ts, agree, detail)
    elif family == "halfclique-real":
        use_p = p if p is not None else 2
        for t in range(trials):
            ts = seed * 100_003 + t
            rng = random.Random(ts)
            g = gen_random_graph(4, 0.6, seed=ts)
            bound = _tie_free_bound(g, use_p, rng)
            hq = HalfCliqueQuery(g, bound)
            agree, detail = _check_halfclique_real(hq, use_p, restarts, ts)
            record(ts, agree, detail)
    elif family == "vertexcover":
        use_p = p if p is not None else 2
        if exhaustive:
            for n in range(1, min(n_max, 5) + 1):
                pairs = list(itertools.combinations(range(1, n + 1), 2))
                for mask in range(1 << len(pairs)):
                    edges = [
                        (i, j, Fraction(1))
                        for bit, (i, j) in enumerate(pairs)
                        if mask >> bit & 1
                    ]
                    g = instances.WeightedGraph(n, tuple(edges))
                    for q in range(n + 1):
                        vq = VertexCoverQuery(g, q)
                        agree, detail = _check_vertexcover_roundtrip(vq, use_p)
                        record(f"n{n}-m{mask}-q{q}", agree, detail)
        else:
            for t in range(trials):
                ts = seed * 100_003 + t
                rng = random.Random(ts)
                n = rng.randint(1, n_max)
                g = gen_random_graph(n, 0.5, seed=ts)
                vq = VertexCoverQuery(g, rng.randint(0, n))
                agree, detail = _check_vertexcover_roundtrip(vq, use_p)
                record(ts, agree, detail)
    else:
        raise ValueError(f"unknown verify family {family!r}")

    report.disagreements.sort(key=lambda d: str(d.get("seed")))
    report.wall_time_s = time.perf_counter() - started
    return report


def _check_cvp_roundtrip(inst: CvpInstance) -> tuple[bool, dict]:
    source = solve_cvp01_bruteforce(inst)
    artifact = cvp_to_approx_binary(inst, strict=False)
    query_verdict = invert_binary_bruteforce(artifact.query)
    agree = source.is_yes == query_verdict.is_yes
    detail = {"source": source.decision, "query": query_verdict.decision}
    if source.is_yes:
        y = tuple(int(v) for v in source.witness)
        latent = forward_witness(artifact, y)
        dist = distance_pow(forward(artifact.query.network, latent), artifact.query.target, inst.p)
        if dist.value > artifact.query.threshold_pow:
            agree, detail["witness_forward"] = False, "failed"
    if query_verdict.is_yes:
        y = backward_witness(artifact, query_verdict.witness)
        dist = Fraction(0)
        for r in range(inst.dim):
            residual = sum(inst.basis[r][i] * y[i] for i in range(inst.num_vectors)) - inst.target[r]
            dist += abs(residual) ** inst.p
        if dist > inst.radius**inst.p:
            agree, detail["witness_back"] = False, "failed"
    if not constants_valid(artifact):
        agree, detail["constants"] = False, "invalid"
    return agree, detail


def _check_cvp_real(inst: CvpInstance, restarts: int, seed: int) -> tuple[bool, dict]:
    source = solve_cvp01_bruteforce(inst)
    artifact = cvp_to_approx_real(inst, strict=False)
    hi = artifact.constants["clamp_hi"]
    verdict = falsify_real(artifact.query, restarts=restarts, seed=seed, corner_levels=(0, hi))
    detail = {"source": source.decision, "query": verdict.decision, "certificate": verdict.certificate}
    agree = source.is_yes == verdict.is_yes
    if inst.p == 1 and artifact.query.network.hidden_units <= oracles.resolve_cap("pattern_units"):
        certified = enumerate_patterns_invert(artifact.query)
        detail["pattern"] = certified.decision
        agree = agree and certified.is_yes == source.is_yes
    if not constants_valid(artifact):
        agree, detail["constants"] = False, "invalid"
    return agree, detail


def _check_halfclique_roundtrip(hq: HalfCliqueQuery, p: int) -> tuple[bool, dict]:
    source = solve_halfclique_bruteforce(hq, p)
    artifact = halfclique_to_approx(hq, p)
    query_verdict = invert_binary_bruteforce(artifact.query)
    agree = source.is_yes == query_verdict.is_yes
    detail = {"source": source.decision, "query": query_verdict.decision}
    if source.is_yes:
        vertices = frozenset(i + 1 for i, v in enumerate(source.witness) if v == 1)
        latent = forward_witness(artifact, vertices)
        dist = distance_pow(forward(artifact.query.network, latent), artifact.query.target, p)
        if dist.value > artifact.query.threshold_pow:
            agree, detail["witness_forward"] = False, "failed"
    if query_verdict.is_yes:
        chosen = backward_witness(artifact, query_verdict.witness)
        if not (
            is_clique(hq.graph, chosen)
            and len(chosen) == hq.graph.num_vertices // 2
            and clique_weight(hq.graph, chosen, p) < hq.bound
        ):
            agree, detail["witness_back"] = False, "failed"
    if not constants_valid(artifact):
        agree, detail["constants"] = False, "invalid"
    return agree, detail


def _check_halfclique_real(hq, p, restarts, seed) -> tuple[bool, dict]:
    source = solve_halfclique_bruteforce(hq, p)
    artifact = halfclique_to_approx_real(hq, p)
    hi = artifact.constants["clamp_hi"]
    verdict = falsify_real(artifact.query, restarts=restarts, seed=seed, corner_levels=(0, hi))
    agree = source.is_yes == verdict.is_yes
    detail = {"source": source.decision, "query": verdict.decision, "certificate": verdict.certificate}
    if not constants_valid(artifact):
        agree, detail["constants"] = False, "invalid"
    return agree, detail


def _check_vertexcover_roundtrip(vq: VertexCoverQuery, p: int) -> tuple[bool, dict]:
    source = solve_vertexcover_bruteforce(vq)
    artifact = vertexcover_to_approx(vq, p)
    query_verdict = invert_binary_bruteforce(artifact.query)
    agree = source.is_yes == query_verdict.is_yes
    detail = {"source": source.decision, "query": query_verdict.decision}
    if source.is_yes:
        cover = frozenset(i + 1 for i, v in enumerate(source.witness) if v == 1)
        latent = forward_witness(artifact, cover)
        dist = distance_pow(forward(artifact.query.network, latent), artifact.query.target, p)
        if dist.value != artifact.query.threshold_pow:
            agree, detail["witness_forward"] = False, "failed"
    if query_verdict.is_yes:
        cover = backward_witness(artifact, query_verdict.witness)
        if not (is_cover(vq.graph, cover) and len(cover) == vq.size):
            agree, detail["witness_back"] = False, "failed"
    if not constants_valid(artifact):
        agree, detail["constants"] = False, "invalid"
    return agree, detail


def iter_all_formulas(n_max: int, k_max: int, m_max: int):
    """Every clause-set formula with n <= n_max, k <= k_max, 1 <= m <= m_max.

    Clause sets (not sequences), so formulas differing only in clause order
    appear once.
    """
    for n in range(1, n_max + 1):
        for k in range(1, min(k_max, n) + 1):
            pool = []
            for variables in itertools.combinations(range(1, n + 1), k):
                for signs in itertools.product((1, -1), repeat=k):
                    pool.append(tuple(v * s for v, s in zip(variables, signs)))
            for m in range(1, m_max + 1):
                for clause_set in itertools.combinations(pool, m):
                    yield CnfFormula(n, k, clause_set)


def cmd_verify(args) -> int:
    report = run_verify(
        args.family,
        args.n_max,
        args.trials,
        args.seed,
        p=args.p,
        exhaustive=args.exhaustive,
    )
    print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_YES if report.passed else EXIT_NO


# -- bench --------------------------------------------------------------------


def run_bench(family: str, n_from: int, n_to: int, trials: int, seed: int = 0):
    """Time the exhaustive oracles; state counts are exact (2^n or 2^{2n})."""
    records = []
    for n in range(n_from, n_to + 1):
        if family == "sat":
            formula = gen_random_ksat(n, m=min(12, 2 * n), k=min(3, n), seed=seed + n)
            states = 1 << n

            def job():
                count_sat_assignments(formula)

        elif family == "cvp":
            inst = gen_random_cvp(n, d=min(3, n), seed=seed + n)
            artifact = cvp_to_approx_binary(inst, strict=False)
            states = 1 << (2 * n)

            def job(a=artifact):
                invert_binary_bruteforce(a.query)

        elif family == "halfclique":
            if n % 2 != 0:
                continue
            g = gen_random_graph(n, 0.5, seed=seed + n)
            bound = _tie_free_bound(g, 2, random.Random(seed + n))
            artifact = halfclique_to_approx(HalfCliqueQuery(g, bound), 2)
            states = 1 << n

            def job(a=artifact):
                invert_binary_bruteforce(a.query)

        elif family == "vertexcover":
            g = gen_random_graph(n, 0.5, seed=seed + n)
            artifact = vertexcover_to_approx(VertexCoverQuery(g, n // 2), 2)
            states = 1 << n

            def job(a=artifact):
                invert_binary_bruteforce(a.query)

        else:
            raise ValueError(f"unknown bench family {family!r}")

        times_ms = []
        for _ in range(trials):
            t0 = time.perf_counter()
            job()
            times_ms.append((time.perf_counter() - t0) * 1000.0)
        records.append(
            BenchRecord(family, n, trials, statistics.median(times_ms), states)
        )
    return records


def write_bench_csv(records, path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(f"{r.family},{r.n},{r.trials},{r.median_ms:.3f},{r.states}")
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_bench(args) -> int:
    records = run_bench(args.family, args.n_from, args.n_to, args.trials, seed=args.seed)
    write_bench_csv(records, args.out)
    for r in records:
        print(f"{r.family},{r.n},{r.trials},{r.median_ms:.3f},{r.states}")
    return EXIT_YES


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invforge",
        description="Compile SAT/CVP/graph instances into ReLU-network "
        "inversion queries and check them with exact oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    reduce_p = sub.add_parser("reduce", help="compile an instance into a query artifact")
    reduce_p.add_argument("--from", dest="family", required=True,
                          choices=["sat", "cvp", "halfclique", "vertexcover"])
    reduce_p.add_argument("--latent", required=True, choices=["binary", "real"])
    reduce_p.add_argument("--p", type=int, default=None)
    reduce_p.add_argument("--in", dest="in_file", required=True)
    reduce_p.add_argument("--out", dest="out_file", required=True)
    reduce_p.add_argument("--bound", default=None, help="half-clique weight bound (rational)")
    reduce_p.add_argument("--size", type=int, default=None, help="vertex-cover size")
    reduce_p.set_defaults(func=cmd_reduce)

    invert_p = sub.add_parser("invert", help="run an inversion oracle on a query artifact")
    invert_p.add_argument("--query", required=True)
    invert_p.add_argument("--oracle", required=True, choices=["brute", "pattern", "falsify"])
    invert_p.add_argument("--restarts", type=int, default=10_000)
    invert_p.add_argument("--seed", type=int, default=0)
    invert_p.set_defaults(func=cmd_invert)

    verify_p = sub.add_parser("verify", help="round-trip reductions against the oracles")
    verify_p.add_argument("--family", required=True,
                          choices=["sat", "sat-real", "cvp", "cvp-real",
                                   "halfclique", "halfclique-real", "vertexcover"])
    verify_p.add_argument("--n-max", dest="n_max", type=int, required=True)
    verify_p.add_argument("--trials", type=int, default=100)
    verify_p.add_argument("--seed", type=int, default=0)
    verify_p.add_argument("--p", type=int, default=None)
    verify_p.add_argument("--exhaustive", action="store_true")
    verify_p.set_defaults(func=cmd_verify)

    bench_p = sub.add_parser("bench", help="time the exhaustive oracles across sizes")
    bench_p.add_argument("--family", required=True,
                         choices=["sat", "cvp", "halfclique", "vertexcover"])
    bench_p.add_argument("--n-from", dest="n_from", type=int, required=True)
    bench_p.add_argument("--n-to", dest="n_to", type=int, required=True)
    bench_p.add_argument("--trials", type=int, default=3)
    bench_p.add_argument("--seed", type=int, default=0)
    bench_p.add_argument("--out", required=True)
    bench_p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, UnsupportedReduction) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
