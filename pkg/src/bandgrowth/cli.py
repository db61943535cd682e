"""Command-line entry point: ``bandgrowth <command> [options]``.

Reports go to stdout (or --output), diagnostics to stderr.  Exit status is 0
on success, 1 when a verification fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from fractions import Fraction

import numpy as np

from . import construction, gfset, isoperimetry, plunnecke, verify, witness

log = logging.getLogger("bandgrowth")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _flatten(rec: dict, prefix: str = "") -> dict:
    out = {}
    for key, val in rec.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            out.update(_flatten(val, name + "."))
        elif isinstance(val, list):
            out[name] = json.dumps(val, sort_keys=True, separators=(",", ":"))
        else:
            out[name] = val
    return out


def render(records: list[dict] | dict, fmt: str, lines: bool = False) -> str:
    if fmt == "json":
        if lines and isinstance(records, list):
            return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
        return json.dumps(records, sort_keys=True, indent=2) + "\n"
    rows = [_flatten(r) for r in (records if isinstance(records, list) else [records])]
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit(args, records, lines: bool = False) -> None:
    text = render(records, args.format, lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _instance(args) -> construction.ProductBandSet:
    A, _ = construction.build(delta=args.delta, K=args.K, m=args.m, k=args.k,
                              unchecked=args.unchecked, r=getattr(args, "r", None))
    return A


def cmd_construct(args) -> int:
    emit(args, construction.instance_report(_instance(args)))
    return EXIT_OK


def cmd_closure(args) -> int:
    A = _instance(args)
    mc = None
    if args.samples:
        mc = construction.closure_probability_montecarlo(A, args.samples, args.seed)
    rep = construction.instance_report(A, mc)
    if args.bruteforce:
        brute, _ = construction.closure_probability_bruteforce(A)
        rep["bruteforceNum"] = str(brute.numerator)
        rep["bruteforceDen"] = str(brute.denominator)
        rep["bruteforceMatches"] = brute == construction.closure_probability_exact(A)
    emit(args, rep)
    ok = rep.get("mcCoversExact", True) and rep.get("bruteforceMatches", True)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_isoperimetry(args) -> int:
    reps = isoperimetry.lemma21_sweep(args.D, args.k, args.trials, args.seed,
                                      sparse=args.sparse, max_size=args.max_size)
    emit(args, [r.record() for r in reps], lines=True)
    failed = [r.trial for r in reps if r.hypothesis_met and not r.passes]
    if failed:
        log.error("trials violating the bound with the hypothesis met: %s", failed)
        return EXIT_FAIL
    return EXIT_OK


def cmd_witness_column(args) -> int:
    A = _instance(args)
    rep = witness.column_family_growth(A, args.K)
    rec = {"m": A.m, "k": A.params.k, **rep.record()}
    ok = True
    if args.dense_check:
        dense = witness.column_family_growth_dense(A)
        rec["denseSizeSum"] = str(dense)
        ok = dense == rep.size_sum
        rec["denseMatches"] = ok
    emit(args, rec)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_witness_row(args) -> int:
    A = _instance(args)
    fx = witness.row_family_fixture(A, args.K)
    rec = {"m": A.m, "k": A.params.k, "blockSetSize": len(fx.block_set),
           "blockClosed": fx.block_closed, "fullCheck": fx.full_check, **fx.growth.record()}
    emit(args, rec)
    return EXIT_OK if fx.block_closed and fx.full_check is not False else EXIT_FAIL


def _family(args, m: int) -> witness.BasisFamily:
    if args.family:
        with open(args.family) as fh:
            return witness.read_family(fh, m)
    return witness.BasisFamily.full(m)


def cmd_claim4(args) -> int:
    A = _instance(args)
    k = A.params.k
    fam = _family(args, A.m)
    if args.points:
        with open(args.points) as fh:
            S = gfset.read_set(fh)
        if not isinstance(S, gfset.SparseSet) or (S.m, S.r) != (A.m, A.m):
            raise UsageError("points file must be a sparse set with m = r = instance m")
        pts = S.sorted()
    else:
        pts = verify.random_product_points(A, args.size, np.random.default_rng(args.seed))
    js = [args.j] if args.j is not None else fam.good(k)
    reps = [witness.claim4_verify(pts, fam, j, k, A) for j in js]
    disjoint = witness.outputs_disjoint(reps)
    rec = {
        "m": A.m, "k": k, "seed": args.seed, "sizeA2": len(pts), "disjoint": disjoint,
        "blocks": [{"j": r.j, "fibers": len(r.fibers), "outside": str(r.outside),
                    "singleBlockViolations": r.single_block_violations, "passes": r.passes}
                   for r in reps],
    }
    emit(args, rec)
    return EXIT_OK if disjoint and all(r.passes for r in reps) else EXIT_FAIL


def cmd_bound_diag(args) -> int:
    fam = _family(args, args.m)
    emit(args, witness.bprime_bound_diagnostic(fam, args.K, args.k).record())
    return EXIT_OK


def _load_dense(path: str) -> gfset.DenseSet:
    with open(path) as fh:
        S = gfset.read_set(fh)
    if not isinstance(S, gfset.DenseSet):
        raise UsageError(f"{path} does not hold a dense set")
    return S


def _pair(args) -> tuple[gfset.DenseSet, gfset.DenseSet]:
    if args.A and args.B:
        return _load_dense(args.A), _load_dense(args.B)
    if args.A or args.B:
        raise UsageError("give both --A and --B, or neither for a seeded random instance")
    return verify.random_small_instance(np.random.default_rng(args.seed))


def cmd_petridis(args) -> int:
    Ap, Bp = _pair(args)
    res = plunnecke.petridis_minimize(Ap, Bp, k_max=args.k_max)
    rec = {"D": Ap.D, "sizeAprime": len(Ap), "sizeBprime": len(Bp),
           "X": [format(v, "x") for v in res.X], "K0": verify.frac(res.K0),
           "iterated": [verify.frac(r) for r in res.iterated_ratios],
           "violations": res.violations()}
    emit(args, rec)
    return EXIT_OK if not res.violations() else EXIT_FAIL


def cmd_ruzsa_verify(args) -> int:
    Ap, Bp = _pair(args)
    K = args.K if args.K is not None else Fraction(len(gfset.sumset(Ap, Bp)), len(Ap))
    res = plunnecke.ruzsa_variant_verify(Ap, Bp, K, args.k)
    rec = {"D": Ap.D, "sizeAprime": len(Ap), "K": verify.frac(K), "k": args.k,
           "status": res.status, "searched": res.searched,
           "coefficient": verify.frac(res.coefficient),
           "subset": None if res.subset is None else [format(v, "x") for v in res.subset],
           "sumsetSize": res.sumset_size}
    emit(args, rec)
    return EXIT_OK if res.found else EXIT_FAIL


def cmd_compare_fp(args) -> int:
    rep = construction.comparison_example(args.p, args.n)
    emit(args, {"p": rep.p, "n": rep.n, "sizeA": rep.size_a, "closure": verify.frac(rep.closure),
                "growth": [{"t": t, "size": s, "ratio": verify.frac(r)} for t, s, r in rep.growth]})
    return EXIT_OK


def cmd_verify_all(args) -> int:
    results = verify.run_all(seed=args.seed, dense_trials=args.trials,
                             sparse_trials=args.sparse_trials, sparse_max_size=args.max_size,
                             petridis_instances=args.petridis_instances,
                             mc_samples=args.samples,
                             inject_failure=frozenset(args.inject_failure or ()))
    failed = [r.id for r in results if not r.passed]
    if args.format == "json":
        emit(args, {"seed": args.seed, "passed": not failed, "failed": failed,
                    "checks": [r.record() for r in results]})
    else:
        emit(args, [{"id": r.id, "passed": r.passed, "seed": args.seed} for r in results])
    if failed:
        log.error("failed checks: %s", ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


def cmd_bench(args) -> int:
    if not 1 <= args.D <= gfset.D_MAX:
        raise UsageError(f"--D must be in [1, {gfset.D_MAX}]")
    if args.repetitions < 0:
        raise UsageError("--repetitions must be >= 0")
    rows = []
    if args.repetitions:
        rng = np.random.default_rng(args.seed)
        D = args.D
        X = gfset.DenseSet.from_indices(D, np.flatnonzero(rng.random(1 << D) < 0.5))
        S = gfset.basis(D)
        for name, fn in (("sumset", lambda: gfset.sumset(X, S)),
                         ("iterated_sumset_k2", lambda: gfset.iterated_sumset(S, 2)),
                         ("add_k_basis_k2", lambda: gfset.add_k_basis(X, 2))):
            t0 = time.perf_counter()
            for _ in range(args.repetitions):
                fn()
            dt = time.perf_counter() - t0
            work = (1 << D) * D * args.repetitions
            rows.append({"kernel": name, "D": D, "repetitions": args.repetitions,
                         "seconds": round(dt, 6), "elementsPerSecond": round(work / dt) if dt else None})
    emit(args, rows)
    return EXIT_OK


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=rational)
    p.add_argument("--K", type=rational)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--unchecked", action="store_true",
                   help="allow toy instances that violate m > 10k^2, m even, k >= 3")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="bandgrowth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=fn)
        return p

    p = add("construct", cmd_construct, help="build an instance and print its sizes")
    _add_instance_args(p)
    p.add_argument("--r", type=int, help="number of blocks (default m); experimental")

    p = add("closure", cmd_closure, help="closure probability P(a + b in A)")
    _add_instance_args(p)
    p.add_argument("--r", type=int, help="number of blocks (default m); experimental")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--bruteforce", action="store_true")

    p = add("isoperimetry", cmd_isoperimetry, help="random band subsets and their boundary")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--sparse", action="store_true")
    p.add_argument("--max-size", type=int, default=1000)

    p = add("witness-column", cmd_witness_column, help="growth under B' = one block of coordinates")
    _add_instance_args(p)
    p.add_argument("--dense-check", action="store_true")

    p = add("witness-row", cmd_witness_row, help="invariant A' under B' = one coordinate per block")
    _add_instance_args(p)

    p = add("claim4", cmd_claim4, help="fibered boundary count for good blocks")
    _add_instance_args(p)
    p.add_argument("--family", help="basis family file (default: all of B)")
    p.add_argument("--points", help="sparse set file holding A'' (default: random)")
    p.add_argument("--size", type=int, default=100)
    p.add_argument("--j", type=int)

    p = add("bound-diag", cmd_bound_diag, help="|B'| against 10k^2 m + |J| m")
    p.add_argument("--family")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--K", type=rational, required=True)
    p.add_argument("--k", type=int, required=True)

    for name, fn in (("petridis", cmd_petridis), ("ruzsa-verify", cmd_ruzsa_verify)):
        p = add(name, fn, help={"petridis": "exact Petridis minimizer and iterated sumsets",
                                "ruzsa-verify": "search for a large A'' with small A'' + kB'"}[name])
        p.add_argument("--A", help="dense set file for A'")
        p.add_argument("--B", help="dense set file for B'")
    sub.choices["petridis"].add_argument("--k-max", type=int, default=4)
    sub.choices["ruzsa-verify"].add_argument("--K", type=rational)
    sub.choices["ruzsa-verify"].add_argument("--k", type=int, default=2)

    p = add("compare-fp", cmd_compare_fp, help="{0,1}^n with the basis inside F_p^n")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--n", type=int, default=4)

    p = add("verify-all", cmd_verify_all, help="run every check")
    p.add_argument("--trials", type=int, default=250)
    p.add_argument("--sparse-trials", type=int, default=20)
    p.add_argument("--max-size", type=int, default=1000)
    p.add_argument("--petridis-instances", type=int, default=50)
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--inject-failure", action="append", help=argparse.SUPPRESS)

    p = add("bench", cmd_bench, help="time the dense kernels")
    p.add_argument("--D", type=int, default=20)
    p.add_argument("--repetitions", type=int, default=10)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"bandgrowth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
