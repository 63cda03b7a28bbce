"""Command-line front end.

Verbs: bound (quantum and partition bounds for a witness), check (physicality,
partial transposes and the sign-matrix LMI test), search (random rank-one,
convex single-partition, or genuine multipartite witness searches), and
reproduce (recompute the bundled reference results and compare).

Exit codes: 0 = ran, nothing certified / all values reproduced; 1 =
entanglement certified (bound/check/search) or a reproduction mismatch;
2 = usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bounds import (
    WitnessPair,
    evaluate_G,
    lmi_separability_test,
    separability_bound,
    symmetric_witness,
    table1_bounds,
)
from .linalg import alt_inequality_gap, quantum_bound
from .partitions import Partition, PartitionError, bipartitions, parse_partition
from .states import (
    CVState,
    StateFormatError,
    builtin_state,
    is_physical,
    load_state,
    make_state,
    partial_transpose,
)
from .witness import (
    SearchConfig,
    ViolationReport,
    genuine_search,
    measurement_sigma,
    optimize_witness,
    random_rank_one_search,
    reports_table,
    reports_to_json,
)

# Margins below this are treated as numerical zero when certifying without an
# error model.
_MARGIN_TOL = 1e-9

# Reference witness for the four-mode genuine-entanglement certificate.
_GENUINE_X = [
    [0.39234, -0.20267, 0.24691, 0.30527],
    [-0.20267, 0.88526, 0.09450, 0.09080],
    [0.24691, 0.09450, 0.58391, 0.20795],
    [0.30527, 0.09080, 0.20795, 0.39504],
]
_GENUINE_P = [
    [0.22992, -0.13140, -0.00477, -0.11723],
    [-0.13140, 0.52598, -0.32316, -0.16699],
    [-0.00477, -0.32316, 0.39949, 0.06971],
    [-0.11723, -0.16699, 0.06971, 0.31242],
]

# Parameters of the four-mode bound-entangled example and its witness.
_PPT_PARAMS = {"x": 0.144375, "y": 0.084087, "p": 0.232000, "q": 0.039543}

# Expected values for `reproduce` (printed to two decimals where shown).
_TABLE1_EXPECTED = {
    "q": {2: 0.0, 3: 3.46, 4: 8.48, 5: 15.49, 6: 24.49, 7: 35.49, 8: 48.49},
    "a": {3: 5.00, 4: 10.03, 5: 17.06, 6: 26.07, 7: 37.08, 8: 50.09},
    "b": {3: 5.46, 4: 10.89, 5: 18.26, 6: 27.59, 7: 38.89, 8: 52.17},
    "f": {2: 2.0, 3: 6.0, 4: 12.0, 5: 20.0, 6: 30.0, 7: 42.0, 8: 56.0},
}
_GENUINE_EXPECTED = {
    "G": 1.47484,
    "sigma": 0.01947,
    "bounds": {
        "1|234": 1.65474,
        "2|134": 1.66193,
        "3|124": 1.56935,
        "4|123": 1.63974,
        "12|34": 1.81056,
        "13|24": 1.74993,
        "14|23": 1.56114,
    },
    "min_s": 4.43,
}


def _vacuum4() -> CVState:
    """Negative-control builtin: vacuum blocks with uniform 1% errors."""
    sig = 0.01 * np.ones((4, 4))
    return make_state(0.5 * np.eye(4), 0.5 * np.eye(4), sig, sig, label="vacuum4")


def _load_cli_state(source: str) -> CVState:
    if source in ("ppt4", "klev4"):
        return builtin_state(source)
    if source == "vacuum4":
        return _vacuum4()
    return load_state(source)


def _load_witness(path: str) -> WitnessPair:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"malformed witness JSON in {path}: {exc}") from exc
    for field in ("n", "X", "P"):
        if field not in doc:
            raise StateFormatError(f"witness file missing field {field!r}")
    n = int(doc["n"])
    X = np.asarray(doc["X"], dtype=float)
    P = np.asarray(doc["P"], dtype=float)
    for name, M in (("X", X), ("P", P)):
        if M.shape != (n, n):
            raise StateFormatError(f"witness {name} must be {n}x{n}, got {M.shape}")
        if np.abs(M - M.T).max() > 1e-8:
            raise StateFormatError(f"witness {name} is asymmetric beyond 1e-8")
    return WitnessPair(X, P)


def _parse_partition_arg(text: str, n: int) -> Partition:
    if text == "trivial":
        return Partition.trivial(n)
    if text == "full":
        return Partition.singletons(n)
    return parse_partition(text, n)


def _threads(args: argparse.Namespace) -> int | None:
    env = os.environ.get("CVWITNESS_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"CVWITNESS_THREADS must be an integer, got {env!r}")
    return args.threads


def _fmt_matrix(M: np.ndarray) -> str:
    return "\n".join(
        "    [" + " ".join(f"{v:9.5f}" for v in row) + "]" for row in M
    )


def _write_json(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text + "\n")


def cmd_bound(args: argparse.Namespace) -> int:
    if args.symmetric_witness is not None:
        w = symmetric_witness(args.symmetric_witness)
    else:
        w = _load_witness(args.witness)
    n = w.n
    if args.table1:
        if args.symmetric_witness is None:
            raise ValueError("--table1 applies to --symmetric-witness only")
        row = table1_bounds(n)
        cells = {k: v for k, v in row._asdict().items()}
        print(f"n = {n}")
        for key in ("q", "a", "b", "f"):
            v = cells[key]
            print(f"  {key} = {'-' if v is None else format(v, '.5f')}")
        _write_json(args.json, json.dumps({"n": n, **cells}, indent=2))
        return 0

    p = _parse_partition_arg(args.partition, n)
    B = quantum_bound(w.X, w.P)
    print(f"quantum bound B(X, P) = {B:.5f}")
    payload = {"n": n, "quantum_bound": B}
    if p.k > 1:
        res = separability_bound(
            w,
            p,
            max_iter=args.max_iter,
            grad_tol=args.grad_tol,
            initial_step=args.step,
        )
        print(
            f"partition bound B_{p.text}(X, P) = {res.value:.5f}  "
            f"(iterations {res.iterations}, converged {res.converged})"
        )
        print("  certificate X:")
        print(_fmt_matrix(res.certificate_X))
        print("  certificate P:")
        print(_fmt_matrix(res.certificate_P))
        payload.update(
            {
                "partition": p.text,
                "bound": res.value,
                "certificate_X": res.certificate_X.tolist(),
                "certificate_P": res.certificate_P.tolist(),
                "iterations": res.iterations,
                "converged": res.converged,
            }
        )
    _write_json(args.json, json.dumps(payload, indent=2))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    state = _load_cli_state(args.state)
    n = state.n
    physical, smallest = is_physical(state)
    print(
        f"state {state.label or args.state}: "
        f"{'physical' if physical else 'NOT physical'} "
        f"(min symplectic eigenvalue {smallest:.6f}, needs >= 0.5)"
    )
    if args.partition:
        parts = [_parse_partition_arg(args.partition, n)]
    else:
        parts = bipartitions(n)
    certified = False
    results = []
    for p in parts:
        verdicts = []
        if p.k == 1:
            pt_blocks = []
        elif p.k == 2:
            # complementary flips share a spectrum; test one side
            pt_blocks = p.blocks[:1]
        else:
            pt_blocks = p.blocks
        for block in pt_blocks:
            pt = partial_transpose(state, block)
            pt_ok, pt_min = is_physical(pt)
            verdicts.append((f"PT {''.join(map(str, block)) if n <= 9 else block}", pt_ok, pt_min))
        violated, min_eig, pattern = lmi_separability_test(state, p)
        row = {
            "partition": p.text,
            "lmi_violated": violated,
            "lmi_min_eigenvalue": min_eig,
            "lmi_worst_pattern": list(pattern),
            "partial_transposes": [
                {"modes": v[0], "physical": v[1], "min_symplectic": v[2]}
                for v in verdicts
            ],
        }
        results.append(row)
        pt_flags = [not ok for _, ok, _ in verdicts]
        print(f"partition {p.text}:")
        for name, ok, val in verdicts:
            print(f"  {name}: {'physical' if ok else 'unphysical'} (min {val:.6f})")
        print(
            f"  LMI: {'VIOLATED' if violated else 'satisfied'} "
            f"(min eigenvalue {min_eig:.6f}, worst pattern {pattern})"
        )
        if physical and (violated or any(pt_flags)):
            certified = True
    if not physical:
        print("state is not physical; separability tests are inconclusive")
    elif certified:
        print("entanglement certified")
    else:
        print("nothing detected")
    _write_json(
        args.json,
        json.dumps(
            {"physical": physical, "min_symplectic": smallest, "partitions": results},
            indent=2,
        ),
    )
    return 1 if (physical and certified) else 0


def _certified(r: ViolationReport, s_level: float) -> bool:
    if r.s is None:
        return r.bound - r.G > _MARGIN_TOL
    return r.s >= s_level


def cmd_search(args: argparse.Namespace) -> int:
    state = _load_cli_state(args.state)
    n = state.n
    threads = _threads(args)
    s_level = 0.0 if args.no_error else args.s_level
    if not args.no_error and not state.has_error_model:
        raise ValueError(
            "state has no error model; pass --no-error to score by raw margin"
        )
    cfg = SearchConfig(
        trials=args.trials,
        seed=args.seed,
        s_level=s_level,
        C=args.C,
        distribution=args.distribution,
    )

    if args.genuine:
        if args.no_error:
            raise ValueError("the genuine search needs an error model")
        found, _, reports = genuine_search(state, cfg, restarts=args.restarts)
        print(reports_table(reports))
        print(
            f"genuine multipartite entanglement at level s >= {cfg.s_level}: "
            f"{'FOUND' if found else 'not found'}"
        )
        _write_json(args.json, reports_to_json(reports))
        return 1 if found else 0

    parts = (
        bipartitions(n)
        if args.all_bipartitions
        else [_parse_partition_arg(args.partition, n)]
    )
    # Rank-one draws cannot reach the matrix witnesses some states need, so
    # margin mode defaults to the convex search.
    method = args.method or ("optimize" if args.no_error else "random")
    reports = []
    for p in parts:
        if method == "optimize":
            reports.append(optimize_witness(state, p, cfg, no_error=args.no_error))
        else:
            reports.append(
                random_rank_one_search(
                    state, p, cfg, threads=threads, no_error=args.no_error
                )
            )
    print(reports_table(reports))
    hits = [r for r in reports if _certified(r, s_level)]
    if hits:
        names = ", ".join(r.partition.text for r in hits)
        print(f"certified across: {names}")
    else:
        print("nothing certified at the requested level")
    _write_json(args.json, reports_to_json(reports))
    return 1 if hits else 0


def _compare(name: str, got: float, want: float, tol: float) -> tuple[bool, str]:
    ok = abs(got - want) <= tol
    line = (
        f"  {name:<12} computed {got:12.6f}   expected {want:9.4f}   "
        f"delta {got - want:+.2e}   {'ok' if ok else 'MISMATCH'}"
    )
    return ok, line


def _reproduce_table1() -> tuple[bool, list[str], dict]:
    lines = []
    all_ok = True
    rows = {}
    for n in range(2, 9):
        row = table1_bounds(n)
        rows[n] = row._asdict()
        for key in ("q", "a", "b", "f"):
            got = getattr(row, key)
            want = _TABLE1_EXPECTED[key].get(n)
            if got is None or want is None:
                continue
            ok, line = _compare(f"{key}(n={n})", got, want, 0.01)
            all_ok &= ok
            lines.append(line)
    return all_ok, lines, {"rows": rows}


def _reproduce_ppt4() -> tuple[bool, list[str], dict]:
    state = builtin_state("ppt4")
    x, y, p, q = (_PPT_PARAMS[k] for k in ("x", "y", "p", "q"))
    c, d = np.sqrt(x * y), np.sqrt(p * q)
    X = np.array([[x, 0, -c, 0], [0, x, 0, c], [-c, 0, y, 0], [0, c, 0, y]])
    P = np.array([[p, 0, 0, d], [0, p, d, 0], [0, d, q, 0], [d, 0, 0, q]])
    w = WitnessPair(X, P)
    G = evaluate_G(w, state)
    part = parse_partition("12|34", 4)
    res = separability_bound(w, part)
    cert = 2 * (np.sqrt(x * p) + np.sqrt(y * q))
    lines = []
    ok1, line = _compare("G", G, 0.435170, 1e-6)
    lines.append(line)
    ok2, line = _compare("B_12|34 cert", cert, 0.481359, 1e-6)
    lines.append(line)
    ok3 = res.value >= 0.481359 - 1e-8
    lines.append(
        f"  {'B_12|34':<12} computed {res.value:12.6f}   expected >= 0.481359"
        f"            {'ok' if ok3 else 'MISMATCH'}"
    )
    violated, _, _ = lmi_separability_test(state, parse_partition("1|234", 4))
    passed, _, _ = lmi_separability_test(state, part)
    ok4 = violated and not passed
    lines.append(
        f"  {'LMI':<12} 1|234 violated: {violated}   12|34 violated: {passed}   "
        f"{'ok' if ok4 else 'MISMATCH'}"
    )
    ok = ok1 and ok2 and ok3 and ok4
    return ok, lines, {"G": G, "certificate": cert, "bound": res.value}


def _reproduce_genuine4() -> tuple[bool, list[str], dict]:
    state = builtin_state("klev4")
    w = WitnessPair(np.array(_GENUINE_X), np.array(_GENUINE_P))
    lines = []
    G = evaluate_G(w, state)
    sigma = measurement_sigma(w, state)
    ok, line = _compare("G", G, _GENUINE_EXPECTED["G"], 1e-4)
    lines.append(line)
    all_ok = ok
    ok, line = _compare("sigma", sigma, _GENUINE_EXPECTED["sigma"], 1e-4)
    lines.append(line)
    all_ok &= ok
    payload = {"G": G, "sigma": sigma, "bounds": {}}
    smin = np.inf
    for p in bipartitions(4):
        res = separability_bound(w, p)
        payload["bounds"][p.text] = res.value
        want = _GENUINE_EXPECTED["bounds"][p.text]
        ok, line = _compare(f"B_{p.text}", res.value, want, 1e-3)
        lines.append(line)
        all_ok &= ok
        smin = min(smin, (res.value - G) / sigma)
    ok, line = _compare("min s", smin, _GENUINE_EXPECTED["min_s"], 0.01)
    lines.append(line)
    all_ok &= ok
    payload["min_s"] = smin
    return all_ok, lines, payload


def _reproduce_alt() -> tuple[bool, list[str], dict]:
    gen = np.random.Generator(np.random.Philox(key=np.array([0, 0], dtype=np.uint64)))
    worst = np.inf
    for _ in range(1000):
        n = int(gen.integers(1, 7))
        A = gen.standard_normal((n, n))
        B = gen.standard_normal((n, n))
        worst = min(worst, alt_inequality_gap(A @ A.T, B @ B.T))
    ok = worst >= -1e-9
    lines = [
        f"  min gap of tr sqrt(sqrt(X) P sqrt(X)) - tr(sqrt(X) sqrt(P)) over "
        f"1000 random PSD pairs: {worst:.3e} (expected >= -1e-9) "
        f"{'ok' if ok else 'MISMATCH'}"
    ]
    return ok, lines, {"min_gap": worst}


def cmd_reproduce(args: argparse.Namespace) -> int:
    targets = {
        "table1": _reproduce_table1,
        "ppt4": _reproduce_ppt4,
        "genuine4": _reproduce_genuine4,
        "alt-property": _reproduce_alt,
    }
    ok, lines, payload = targets[args.target]()
    print(f"reproduce {args.target}:")
    for line in lines:
        print(line)
    print("all values reproduced" if ok else "MISMATCHES found")
    _write_json(args.json, json.dumps(payload, indent=2))
    return 0 if ok else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cvwitness",
        description="Certify multipartite entanglement of Gaussian states "
        "from second-order moments.",
    )
    sub = ap.add_subparsers(dest="verb", required=True)

    b = sub.add_parser("bound", help="quantum and partition bounds for a witness")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--witness", help="witness JSON file {n, X, P}")
    src.add_argument(
        "--symmetric-witness",
        type=int,
        metavar="N",
        help="use the built-in permutation-symmetric N-mode witness",
    )
    b.add_argument(
        "--partition",
        default="trivial",
        help="partition text such as '12|34', or 'trivial' / 'full'",
    )
    b.add_argument("--table1", action="store_true", help="print the q/a/b/f row")
    b.add_argument("--max-iter", type=int, default=10000)
    b.add_argument("--grad-tol", type=float, default=1e-9)
    b.add_argument("--step", type=float, default=1.0, help="initial ascent step")
    b.add_argument("--json", metavar="FILE", help="write machine-readable output")
    b.set_defaults(func=cmd_bound)

    c = sub.add_parser(
        "check", help="physicality, partial transposes and the sign-matrix LMI test"
    )
    c.add_argument("--state", required=True, help="builtin name or state JSON file")
    c.add_argument("--partition", help="restrict to one partition (default: all bipartitions)")
    c.add_argument("--json", metavar="FILE")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("search", help="search for violating witnesses")
    s.add_argument("--state", required=True, help="builtin name or state JSON file")
    tgt = s.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--partition", help="single partition to test")
    tgt.add_argument(
        "--all-bipartitions", action="store_true", help="test every bipartition"
    )
    tgt.add_argument(
        "--genuine",
        action="store_true",
        help="one witness violating all bipartitions at once",
    )
    s.add_argument(
        "--method",
        choices=("random", "optimize"),
        default=None,
        help="witness search method (default: random; optimize with --no-error)",
    )
    s.add_argument("--trials", type=int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument(
        "--s-level",
        "--target-s",
        dest="s_level",
        type=float,
        default=6.0,
        help="certification level in standard deviations",
    )
    s.add_argument("--C", type=float, default=1.0, help="normalization constant")
    s.add_argument("--distribution", choices=("normal", "uniform"), default="normal")
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--restarts", type=int, default=200, help="genuine-search budget")
    s.add_argument(
        "--no-error",
        action="store_true",
        help="ignore the error model and score by the raw margin B_I - G",
    )
    s.add_argument("--json", metavar="FILE")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("reproduce", help="recompute bundled reference results")
    r.add_argument(
        "target", choices=("table1", "ppt4", "genuine4", "alt-property")
    )
    r.add_argument("--json", metavar="FILE")
    r.set_defaults(func=cmd_reproduce)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StateFormatError, PartitionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
