"""Exhaustive small-scale oracles for Plunnecke-Ruzsa type growth.

petridis_minimize finds the nonempty X in A' minimising |X + B'| / |X|; for
that X every iterated sumset obeys |X + tB'| <= K0^t |X|.
ruzsa_variant_verify searches for A'' in A' with |A''| >= |A'|/2 and
|A'' + kB'| <= 2^(k+1) K^k |A''|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import gfset
from .gfset import DenseSet

SUBSET_BUDGET = 20


class BudgetError(ValueError):
    pass


class HypothesisError(ValueError):
    pass


def _translate_masks(elems: list[int], T: DenseSet) -> list[int]:
    """Bitmask of a + T for each a, over a compressed universe."""
    ts = [int(t) for t in T.indices()]
    index: dict[int, int] = {}
    masks = []
    for a in elems:
        mk = 0
        for t in ts:
            v = a ^ t
            pos = index.setdefault(v, len(index))
            mk |= 1 << pos
        masks.append(mk)
    return masks


def _check(Ap: DenseSet, Bp: DenseSet, budget: int) -> list[int]:
    if Ap.D != Bp.D:
        raise gfset.DimensionError(f"dimension mismatch: {Ap.D} vs {Bp.D}")
    if not Ap or not Bp:
        raise gfset.EmptySetError("A' and B' must be nonempty")
    if len(Ap) > budget:
        raise BudgetError(f"|A'| = {len(Ap)} exceeds the exhaustive budget {budget}")
    return [int(a) for a in Ap.indices()]


@dataclass(frozen=True)
class PetridisResult:
    X: DenseSet
    K0: Fraction
    sizes: tuple[int, ...]  # |X + tB'| for t = 1..k_max

    @property
    def iterated_ratios(self) -> list[Fraction]:
        n = len(self.X)
        return [Fraction(s, n) for s in self.sizes]

    def violations(self) -> list[int]:
        n = len(self.X)
        return [t for t, s in enumerate(self.sizes, 1) if s > self.K0**t * n]


def petridis_minimize(Ap: DenseSet, Bp: DenseSet, k_max: int = 4,
                      budget: int = SUBSET_BUDGET) -> PetridisResult:
    """Exact minimiser of |Y + B'| / |Y| over nonempty Y in A'.

    Ties go to the larger Y, then to the lexicographically smaller sorted tuple.
    """
    elems = _check(Ap, Bp, budget)
    masks = _translate_masks(elems, Bp)
    n = len(elems)
    best: list = [None, 0, 0]  # subset tuple, |Y + B'|, |Y|
    path: list[int] = []

    def better(u: int, s: int) -> bool:
        bs, bu, bn = best
        if bs is None:
            return True
        lhs, rhs = u * bn, bu * s
        if lhs != rhs:
            return lhs < rhs
        if s != bn:
            return s > bn
        return tuple(path) < bs

    def walk(i: int, union: int) -> None:
        if i == n:
            if path:
                u = union.bit_count()
                if better(u, len(path)):
                    best[:] = [tuple(path), u, len(path)]
            return
        path.append(elems[i])
        walk(i + 1, union | masks[i])
        path.pop()
        walk(i + 1, union)

    walk(0, 0)
    X = DenseSet.from_indices(Ap.D, best[0])
    K0 = Fraction(best[1], best[2])
    sizes = []
    Y = X
    for _ in range(k_max):
        Y = gfset.sumset(Y, Bp)
        sizes.append(len(Y))
    return PetridisResult(X, K0, tuple(sizes))


@dataclass(frozen=True)
class RuzsaResult:
    found: bool
    subset: DenseSet | None
    sumset_size: int | None
    coefficient: Fraction  # 2^(k+1) K^k
    k: int
    K: Fraction
    searched: int

    @property
    def status(self) -> str:
        return "witness" if self.found else "counterexample"


def ruzsa_variant_verify(Ap: DenseSet, Bp: DenseSet, K, k: int,
                         budget: int = SUBSET_BUDGET) -> RuzsaResult:
    """First A'' (by size, then lexicographically) with |A''| >= |A'|/2 and small kB'-growth."""
    if k < 1:
        raise ValueError("k must be >= 1")
    K = Fraction(K)
    elems = _check(Ap, Bp, budget)
    if len(gfset.sumset(Ap, Bp)) > K * len(Ap):
        raise HypothesisError("small-doubling hypothesis fails: |A' + B'| > K |A'|")
    masks = _translate_masks(elems, gfset.iterated_sumset(Bp, k))
    coeff = 2 ** (k + 1) * K**k
    n = len(elems)
    searched = 0
    for s in range(math.ceil(n / 2), n + 1):
        limit = coeff * s
        for combo in combinations(range(n), s):
            searched += 1
            union = 0
            for i in combo:
                union |= masks[i]
            u = union.bit_count()
            if u <= limit:
                sub = DenseSet.from_indices(Ap.D, [elems[i] for i in combo])
                return RuzsaResult(True, sub, u, coeff, k, K, searched)
    return RuzsaResult(False, None, None, coeff, k, K, searched)
