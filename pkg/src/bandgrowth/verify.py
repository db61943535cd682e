"""The full battery of desk-scale checks behind ``bandgrowth verify-all``.

Every check returns a ``CheckResult``; the details are plain JSON values so
the summary of a run is byte-for-byte reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import construction, gfset, isoperimetry, layers, plunnecke, witness
from .gfset import DenseSet


@dataclass
class CheckResult:
    id: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {"id": self.id, "passed": self.passed, "detail": self.detail}


def frac(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def random_small_instance(rng: np.random.Generator, max_a: int = 12, max_b: int = 6,
                          max_d: int = 10) -> tuple[DenseSet, DenseSet]:
    """Random nonempty A', B' in F_2^D with D in [2, max_d]."""
    D = int(rng.integers(2, max_d + 1))
    na = int(rng.integers(1, min(max_a, 1 << D) + 1))
    nb = int(rng.integers(1, min(max_b, 1 << D) + 1))
    Ap = rng.choice(1 << D, size=na, replace=False)
    Bp = rng.choice(1 << D, size=nb, replace=False)
    return DenseSet.from_indices(D, Ap), DenseSet.from_indices(D, Bp)


def random_product_points(A: construction.ProductBandSet, n: int, rng: np.random.Generator) -> list[int]:
    band = A.block_band
    cdf = layers.cumulative_band_sizes(band)
    seen: set[int] = set()
    while len(seen) < min(n, A.size):
        seen.add(gfset.pack_blocks(A.m, [layers.sample_band_vector(band, rng, cdf) for _ in range(A.m)]))
    return sorted(seen)


def check_lemma21_dense(D: int, trials: int, seed: int) -> CheckResult:
    reps = isoperimetry.lemma21_sweep(D, 1, trials, seed)
    passed = sum(r.passes for r in reps)
    worst = min((r.ratio for r in reps), default=None)
    return CheckResult(f"lemma21-dense-D{D}", passed == trials,
                       {"trials": trials, "passed": passed,
                        "minRatio": None if worst is None else frac(worst)})


def check_lemma21_sparse(trials: int, seed: int, max_size: int) -> CheckResult:
    reps = isoperimetry.lemma21_sweep(41, 2, trials, seed, sparse=True, max_size=max_size)
    passed = sum(r.passes for r in reps)
    return CheckResult("lemma21-sparse-D41", passed == trials,
                       {"trials": trials, "passed": passed, "maxSize": max_size})


def check_ratio_chain() -> CheckResult:
    bad = []
    pairs = 0
    for k in range(1, 5):
        for D in range(10 * k * k + 1, 201):
            pairs += 1
            if not layers.ratio_lower_bound_check(D, k).passes:
                bad.append([D, k])
    return CheckResult("ratio-chain", not bad, {"pairs": pairs, "violations": bad})


def check_layer_local(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 101])
    bad, n = [], 0
    for D in range(2, 15):
        for k in (1, 2):
            for i in range(D + 1):
                Li = gfset.layer(D, i).indices()
                Ai = DenseSet.from_indices(D, Li[rng.random(Li.size) < 0.5])
                if i <= D - k and 2 * i <= D:
                    n += 1
                    if not isoperimetry.layer_local_check(Ai, i, k, "up").passes:
                        bad.append([D, k, i, "up"])
                if i >= k and 2 * i >= D:
                    n += 1
                    if not isoperimetry.layer_local_check(Ai, i, k, "down").passes:
                        bad.append([D, k, i, "down"])
    return CheckResult("layer-local", not bad, {"cases": n, "violations": bad})


TOY_INSTANCES = [(2, 1), (3, 1), (4, 1), (3, 3), (4, 3)]


def check_closure_bruteforce() -> CheckResult:
    rows, ok = [], True
    for m, k in TOY_INSTANCES:
        A, _ = construction.build(m=m, k=k, unchecked=True)
        brute, per_b = construction.closure_probability_bruteforce(A)
        exact = construction.closure_probability_exact(A)
        symmetric = len(set(per_b.values())) == 1
        good = brute == exact and symmetric
        if k >= 3:
            good = good and exact >= construction.closure_lower_bound(A)
        ok &= good
        rows.append({"m": m, "k": k, "exact": frac(exact), "bruteforce": frac(brute),
                     "symmetric": symmetric})
    return CheckResult("closure-exact-vs-bruteforce", ok, {"instances": rows})


def check_closure_scale(seed: int, samples: int) -> CheckResult:
    A, _ = construction.build(delta=Fraction(1, 2), K=2)
    exact = construction.closure_probability_exact(A)
    lower = construction.closure_lower_bound(A)
    inner = construction.closure_probability_inner_bound(A)
    detail = {"m": A.m, "k": A.params.k, "exact": frac(exact), "lowerBound": frac(lower),
              "exactFloat": construction.fmt_float(exact)}
    ok = exact >= inner >= lower
    if samples:
        mc = construction.closure_probability_montecarlo(A, samples, seed)
        detail.update(mcSamples=samples, mcHits=mc.hits,
                      mcCI=[construction.fmt_float(mc.ci_low), construction.fmt_float(mc.ci_high)])
        ok = ok and mc.covers(exact)
    return CheckResult("closure-scale", ok, detail)


def check_column_witness() -> CheckResult:
    A, _ = construction.build(m=4, k=3, unchecked=True)
    dense = witness.column_family_growth_dense(A)
    closed = witness.column_family_growth(A).size_sum
    bad, n = [], 0
    for D in range(3, 17):
        for k in range(2, D):
            for ell in range(1, D - k):
                n += 1
                if not witness.block_widening_holds(D, ell, k):
                    bad.append([D, ell, k])
    ok = dense == closed == 16 * 14**3 and not bad
    return CheckResult("witness-column", ok, {"dense": dense, "closedForm": closed,
                                              "blockCases": n, "blockViolations": bad})


def check_row_witness() -> CheckResult:
    A, _ = construction.build(m=4, k=3, unchecked=True)
    fx = witness.row_family_fixture(A)
    bad, n = [], 0
    for D in range(2, 17):
        for k in range(2, D + 2):
            for ell in range(0, D - k + 2):
                n += 1
                inv = witness.invariant_subset(layers.BandSpec(D, ell, k), 1)
                if inv and gfset.sumset(inv, DenseSet.from_indices(D, [1])) != inv:
                    bad.append([D, ell, k])
    ok = fx.block_closed and fx.full_check is True and fx.growth.ratio == 1 and not bad
    return CheckResult("witness-row", ok, {"blockSize": len(fx.block_set), "sizeAprime": str(fx.size),
                                           "fullCheck": fx.full_check, "blockCases": n,
                                           "blockViolations": bad})


def check_claim4(seed: int, size: int = 100) -> CheckResult:
    A, _ = construction.build(m=11, k=1, unchecked=True)
    pts = random_product_points(A, size, np.random.default_rng([seed, 4]))
    fam = witness.BasisFamily.full(A.m)
    reps = [witness.claim4_verify(pts, fam, j, 1, A) for j in fam.good(1)]
    disjoint = witness.outputs_disjoint(reps)
    ok = all(r.passes for r in reps) and disjoint
    return CheckResult("claim4", ok, {
        "size": len(pts), "good": fam.good(1),
        "outside": [r.outside for r in reps],
        "singleBlockViolations": sum(r.single_block_violations for r in reps),
        "disjoint": disjoint})


def check_bound_diag() -> CheckResult:
    m, k = 12, 1
    col = witness.bprime_bound_diagnostic(witness.BasisFamily.column(m), 2, k)
    full = witness.bprime_bound_diagnostic(witness.BasisFamily.full(m), 2, k)
    empty = witness.bprime_bound_diagnostic(witness.BasisFamily(m, (frozenset(),) * m), 2, k)
    ok = (col.size == m and col.n_good == 1 and col.bound == 10 * k * k * m + m
          and full.size == m * m and full.n_good == m and empty.size == 0 and empty.n_good == 0)
    return CheckResult("bound-diag", ok, {"column": col.record(), "full": full.record()})


def check_petridis(seed: int, instances: int) -> CheckResult:
    viol, ruzsa_fail, hyp = 0, 0, 0
    for t in range(instances):
        rng = np.random.default_rng([seed, 9, t])
        Ap, Bp = random_small_instance(rng)
        res = plunnecke.petridis_minimize(Ap, Bp, k_max=4)
        if res.violations():
            viol += 1
        K = Fraction(len(gfset.sumset(Ap, Bp)), len(Ap))
        if res.K0 > K:
            viol += 1
        for k in range(1, 5):
            hyp += 1
            if not plunnecke.ruzsa_variant_verify(Ap, Bp, K, k).found:
                ruzsa_fail += 1
    return CheckResult("petridis", viol == 0 and ruzsa_fail == 0,
                       {"instances": instances, "plunneckeViolations": viol,
                        "ruzsaCases": hyp, "ruzsaCounterexamples": ruzsa_fail})


def check_compare_fp() -> CheckResult:
    rep = construction.comparison_example(3, 4)
    return CheckResult("compare-fp", rep.closure == Fraction(1, 2),
                       {"p": 3, "n": 4, "closure": frac(rep.closure),
                        "growth": [[t, s, frac(r)] for t, s, r in rep.growth]})


def run_all(seed: int = 0, dense_trials: int = 250, sparse_trials: int = 20,
            sparse_max_size: int = 1000, petridis_instances: int = 50, mc_samples: int = 20000,
            inject_failure: frozenset[str] = frozenset()) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        *(lambda D=D: check_lemma21_dense(D, dense_trials, seed) for D in (11, 12, 13, 14)),
        lambda: check_lemma21_sparse(sparse_trials, seed, sparse_max_size),
        check_ratio_chain,
        lambda: check_layer_local(seed),
        check_closure_bruteforce,
        lambda: check_closure_scale(seed, mc_samples),
        check_column_witness,
        check_row_witness,
        lambda: check_claim4(seed),
        check_bound_diag,
        lambda: check_petridis(seed, petridis_instances),
        check_compare_fp,
    ]
    out = []
    for fn in checks:
        res = fn()
        if res.id in inject_failure:
            res = CheckResult(res.id, False, {**res.detail, "injected": True})
        out.append(res)
    return out
