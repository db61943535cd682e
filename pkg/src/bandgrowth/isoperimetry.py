"""Growth of band subsets under the k-fold basis sumset.

For A inside a width-k band Sigma of F_2^D with D > 10k^2 the count
|(A + kS) \\ Sigma| is at least |A|/2.  Everything here computes the exact
count; the hypothesis on D is reported as a flag, never enforced.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import numpy as np

from . import gfset
from .gfset import DenseSet
from .layers import BandSpec, growth_ratio, mirror_growth_ratio, sample_band_vector, cumulative_band_sizes

SPARSE_BUDGET = 10**5
_CHUNK = 2048


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class IsoperimetryReport:
    band: BandSpec
    k: int
    size_a: int
    outside: int
    direction: str
    seed: int | None = None
    trial: int | None = None

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.outside, self.size_a)

    @property
    def passes(self) -> bool:
        return 2 * self.outside >= self.size_a

    @property
    def hypothesis_met(self) -> bool:
        return self.band.D > 10 * self.k * self.k

    def record(self) -> dict:
        r = self.ratio
        return {
            "D": self.band.D,
            "k": self.k,
            "ell": self.band.ell,
            "sizeA": str(self.size_a),
            "outside": str(self.outside),
            "ratioNum": str(r.numerator),
            "ratioDen": str(r.denominator),
            "passes": self.passes,
            "hypothesisMet": self.hypothesis_met,
            "seed": self.seed,
            "trial": self.trial,
        }


def direction_of(band: BandSpec) -> str:
    return "up" if 2 * band.ell <= band.D else "down"


def boundary_outside(A: DenseSet, band: BandSpec, k: int | None = None) -> IsoperimetryReport:
    """Exact |(A + kS) \\ Sigma| for A a dense subset of the band Sigma."""
    k = band.k if k is None else k
    if k < 1:
        raise ValueError("k must be >= 1")
    if A.D != band.D:
        raise gfset.DimensionError(f"set lives in F_2^{A.D}, band in F_2^{band.D}")
    if not A:
        raise ValueError("A must be nonempty")
    sigma = gfset.band_mask(band.D, band.ell, band.top)
    if not A.issubset(sigma):
        raise ValueError("A is not contained in the band")
    grown = gfset.add_k_basis(A, k)
    return IsoperimetryReport(band, k, len(A), len(grown - sigma), direction_of(band))


def k_flip_offsets(D: int, k: int) -> list[int]:
    """Elements of kS: weight <= k and weight = k mod 2."""
    out = []
    for w in range(k % 2, k + 1, 2):
        for pos in combinations(range(D), w):
            v = 0
            for p in pos:
                v |= 1 << p
            out.append(v)
    return out


def outside_sums(points: Iterable[int], D: int, lo: int, hi: int, k: int):
    """Distinct a + x, a in points, x in kS, whose weight lies outside [lo, hi].

    Returns a sorted uint64 array when D <= 63, else a set of ints.
    """
    pts = list(points)
    offs = k_flip_offsets(D, k)
    if D <= 63:
        off_arr = np.asarray(offs, dtype=np.uint64)
        pieces = []
        for start in range(0, len(pts), _CHUNK):
            chunk = np.asarray(pts[start:start + _CHUNK], dtype=np.uint64)
            sums = (chunk[:, None] ^ off_arr[None, :]).reshape(-1)
            w = np.bitwise_count(sums)
            pieces.append(sums[(w < lo) | (w > hi)])
        if not pieces:
            return np.zeros(0, dtype=np.uint64)
        return np.unique(np.concatenate(pieces))
    found = set()
    for a in pts:
        for x in offs:
            s = a ^ x
            w = s.bit_count()
            if w < lo or w > hi:
                found.add(s)
    return found


def boundary_outside_sparse(
    A: Iterable[int], band: BandSpec, k: int | None = None, budget: int = SPARSE_BUDGET
) -> IsoperimetryReport:
    """Sparse version of boundary_outside; band membership decided by weight."""
    k = band.k if k is None else k
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = sorted(set(int(a) for a in A))
    if not pts:
        raise ValueError("A must be nonempty")
    if len(pts) > budget:
        work = len(pts) * len(k_flip_offsets(band.D, k)) if band.D <= 64 else None
        raise BudgetError(
            f"|A| = {len(pts)} exceeds sparse budget {budget}; "
            f"rerun with budget >= {len(pts)} (about {work} candidate sums)"
        )
    limit = 1 << band.D
    bad = [a for a in pts if not (0 <= a < limit and band.contains_weight(a.bit_count()))]
    if bad:
        raise ValueError(f"{len(bad)} points outside the band, first {bad[0]:#x}")
    out = outside_sums(pts, band.D, band.ell, band.top, k)
    return IsoperimetryReport(band, k, len(pts), len(out), direction_of(band))


@dataclass(frozen=True)
class LayerLocalReport:
    D: int
    i: int
    k: int
    direction: str
    size: int
    reached: int
    ratio_bound: Fraction

    @property
    def passes(self) -> bool:
        return self.reached >= self.ratio_bound * self.size


def layer_local_check(A_i: DenseSet, i: int, k: int, direction: str = "up") -> LayerLocalReport:
    """|(A_i + kS) & L_{i+k}| (or L_{i-k}) against the double-counting ratio."""
    D = A_i.D
    if not A_i.issubset(gfset.layer(D, i)):
        raise ValueError(f"set is not inside layer {i}")
    if direction == "up":
        target, bound = i + k, growth_ratio(D, i, k)
    elif direction == "down":
        target, bound = i - k, mirror_growth_ratio(D, i, k)
    else:
        raise ValueError("direction must be 'up' or 'down'")
    reached = len(gfset.add_k_basis(A_i, k) & gfset.layer(D, target)) if A_i else 0
    return LayerLocalReport(D, i, k, direction, len(A_i), reached, bound)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """PCG64 seeded from SeedSequence([seed, trial]); independent of run order."""
    return np.random.default_rng([seed, trial])


def random_band(D: int, k: int, rng: np.random.Generator) -> BandSpec:
    return BandSpec(D, int(rng.integers(0, D - k + 2)), k)


def random_dense_subset(band: BandSpec, rng: np.random.Generator) -> DenseSet:
    """Each band element kept with probability 1/2; redrawn until nonempty."""
    members = gfset.band_mask(band.D, band.ell, band.top).indices()
    while True:
        keep = members[rng.random(members.size) < 0.5]
        if keep.size:
            return DenseSet.from_indices(band.D, keep)


def random_sparse_subset(band: BandSpec, rng: np.random.Generator, max_size: int) -> list[int]:
    """Distinct uniform band elements; the target size is uniform in [1, max_size]."""
    cdf = cumulative_band_sizes(band)
    target = min(int(rng.integers(1, max_size + 1)), cdf[-1])
    seen: set[int] = set()
    while len(seen) < target:
        seen.add(sample_band_vector(band, rng, cdf))
    return sorted(seen)


def lemma21_sweep(
    D: int, k: int, trials: int, seed: int = 0, sparse: bool = False, max_size: int = 1000
) -> list[IsoperimetryReport]:
    """Random band subsets with their exact outside counts; failures are reported, not raised."""
    out = []
    for t in range(trials):
        rng = trial_rng(seed, t)
        band = random_band(D, k, rng)
        if sparse:
            rep = boundary_outside_sparse(random_sparse_subset(band, rng, max_size), band, k)
        else:
            rep = boundary_outside(random_dense_subset(band, rng), band, k)
        out.append(IsoperimetryReport(rep.band, rep.k, rep.size_a, rep.outside,
                                      rep.direction, seed, t))
    return out
