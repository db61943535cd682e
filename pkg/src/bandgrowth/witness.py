"""Sub-families B' of the basis B and the growth of A under them.

A family is described column by column: I[j] lists the coordinates i of
block j such that e_{i,j} is in B'.  Indices are 0-based throughout.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, TextIO

from . import gfset
from .construction import ProductBandSet
from .gfset import DenseSet, SparseSet
from .isoperimetry import IsoperimetryReport, outside_sums
from .layers import BandSpec, weight_range_size


@dataclass(frozen=True)
class BasisFamily:
    m: int
    I: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.I) != self.m:
            raise ValueError("need one index set per block")
        for j, Ij in enumerate(self.I):
            if any(not 0 <= i < self.m for i in Ij):
                raise ValueError(f"index set of block {j} leaves [0, {self.m})")

    @classmethod
    def from_mapping(cls, m: int, sets: dict[int, Iterable[int]]) -> BasisFamily:
        I = [frozenset()] * m
        for j, idx in sets.items():
            if not 0 <= j < m:
                raise ValueError(f"block index {j} outside [0, {m})")
            I[j] = frozenset(idx)
        return cls(m, tuple(I))

    @classmethod
    def full(cls, m: int) -> BasisFamily:
        return cls(m, tuple(frozenset(range(m)) for _ in range(m)))

    @classmethod
    def column(cls, m: int, j: int = 0) -> BasisFamily:
        return cls.from_mapping(m, {j: range(m)})

    @classmethod
    def row(cls, m: int, i: int = 0) -> BasisFamily:
        return cls(m, tuple(frozenset({i}) for _ in range(m)))

    @property
    def size(self) -> int:
        return sum(len(Ij) for Ij in self.I)

    def good(self, k: int) -> list[int]:
        return [j for j, Ij in enumerate(self.I) if len(Ij) > 10 * k * k]

    def vectors(self) -> list[int]:
        return sorted(gfset.basis_vector(self.m, i, j) for j, Ij in enumerate(self.I) for i in Ij)

    def dump(self, fh: TextIO) -> None:
        for j, Ij in enumerate(self.I):
            if Ij:
                fh.write(f"{j}: {','.join(str(i) for i in sorted(Ij))}\n")


def read_family(fh: TextIO, m: int) -> BasisFamily:
    sets: dict[int, set[int]] = {}
    for raw in fh:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        j, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"malformed family line {raw!r}")
        j = int(j)
        if j in sets:
            raise ValueError(f"block {j} listed twice")
        sets[j] = {int(t) for t in rest.split(",") if t.strip()}
    return BasisFamily.from_mapping(m, sets)


@dataclass(frozen=True)
class GrowthReport:
    size_a: int
    size_sum: int
    K: Fraction | None = None
    clipped: bool = False

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.size_sum, self.size_a)

    @property
    def within_K(self) -> bool | None:
        return None if self.K is None else self.ratio <= self.K

    def record(self) -> dict:
        r = self.ratio
        return {
            "sizeA": str(self.size_a),
            "sizeSum": str(self.size_sum),
            "ratioNum": str(r.numerator),
            "ratioDen": str(r.denominator),
            "KNum": None if self.K is None else str(self.K.numerator),
            "KDen": None if self.K is None else str(self.K.denominator),
            "withinK": self.within_K,
            "clipped": self.clipped,
        }


def widened_block_size(m: int, ell: int, k: int) -> int:
    """|Sigma + S| in F_2^m for Sigma = L_ell..L_{ell+k-1}.

    For k >= 2 this is the band L_{ell-1}..L_{ell+k}; a single layer
    L_ell only reaches its two neighbours.
    """
    if k == 1:
        return weight_range_size(m, ell - 1, ell - 1) + weight_range_size(m, ell + 1, ell + 1)
    return weight_range_size(m, ell - 1, ell + k)


def _require_square(A: ProductBandSet) -> None:
    if A.r != A.m:
        raise ValueError(f"B' families need r = m blocks, got r = {A.r}, m = {A.m}")


def column_family_growth(A: ProductBandSet, K=None) -> GrowthReport:
    """|A + B'| for B' = {e_{i,0}}: block 0 widens, the other m-1 blocks stay."""
    _require_square(A)
    P = A.params
    widened = widened_block_size(P.m, P.ell, P.k)
    clipped = P.ell == 0 or P.top == P.m
    return GrowthReport(A.size, widened * A.block_size ** (P.m - 1),
                        None if K is None else Fraction(K), clipped)


def column_family_growth_dense(A: ProductBandSet) -> int:
    """|A + B'| by dense enumeration in F_2^{m*m}; tiny m only."""
    from .construction import enumerate_product_band

    m = A.m
    X = DenseSet.from_indices(m * m, enumerate_product_band(A).astype("int64"))
    Bp = DenseSet.from_indices(m * m, [gfset.basis_vector(m, i, 0) for i in range(m)])
    return len(gfset.sumset(X, Bp))


def block_widening_holds(D: int, ell: int, k: int) -> bool:
    """Sigma + S == L_{ell-1} | ... | L_{ell+k} in F_2^D, checked densely."""
    sigma = gfset.band_mask(D, ell, ell + k - 1)
    return gfset.sumset(sigma, gfset.basis(D)) == gfset.band_mask(D, ell - 1, ell + k)


def invariant_subset(band: BandSpec, e: int) -> DenseSet:
    """Maximal subset of the band mapped to itself by x -> x + e."""
    sigma = gfset.band_mask(band.D, band.ell, band.top)
    return sigma & sigma.translate(e)


@dataclass(frozen=True)
class RowFixture:
    """A' = product of per-block e_{0,j}-invariant sets, closed under B' = {e_{0,j}}."""

    A: ProductBandSet
    block_set: DenseSet
    block_closed: bool
    full_check: bool | None
    growth: GrowthReport

    @property
    def size(self) -> int:
        return len(self.block_set) ** self.A.m

    def contains(self, v: int) -> bool:
        return all(b in self.block_set for b in gfset.unpack_blocks(self.A.m, self.A.m, v))

    def materialize(self) -> SparseSet:
        return product_of_blocks(self.block_set, self.A.m)


def product_of_blocks(block: DenseSet, r: int, limit: int = 10**6) -> SparseSet:
    """The r-fold product block x ... x block as a sparse set."""
    m = block.D
    if len(block) ** r > limit:
        raise ValueError(f"product of size {len(block) ** r} is too large to materialize")
    elems = [0]
    for j in range(r):
        elems = [v | (b << (j * m)) for v in elems for b in block]
    return SparseSet(m, r, elems)


def row_family_fixture(A: ProductBandSet, K=None) -> RowFixture:
    _require_square(A)
    P = A.params
    if P.k < 2:
        raise ValueError("a width-1 band has no subset invariant under a basis vector")
    e = 1  # coordinate 0 of the block
    block = invariant_subset(A.block_band, e)
    closed = gfset.sumset(block, DenseSet.from_indices(P.m, [e])) == block
    full = None
    if P.m * P.m <= gfset.D_MAX and len(block) ** P.m <= 10**6:
        Aprime = product_of_blocks(block, P.m)
        Bp = SparseSet(P.m, P.m, [gfset.basis_vector(P.m, 0, j) for j in range(P.m)])
        full = gfset.sparse_sumset(Aprime, Bp) == Aprime
    if not closed:
        raise RuntimeError("invariant subset is not closed under its basis vector")
    # each e_{0,j} only moves block j, which is e-invariant, so A' + B' = A'
    size = len(block) ** P.m
    growth = GrowthReport(size, size, None if K is None else Fraction(K))
    return RowFixture(A, block, closed, full, growth)


# fibering A'' over the coordinates outside I_j in block j


class NotGoodError(ValueError):
    pass


@dataclass
class Claim4Report:
    j: int
    k: int
    size: int
    fibers: list[IsoperimetryReport] = field(default_factory=list)
    outputs: list[int] = field(default_factory=list)
    single_block_violations: int = 0

    @property
    def outside(self) -> int:
        return sum(f.outside for f in self.fibers)

    @property
    def passes(self) -> bool:
        return 2 * self.outside >= self.size and self.single_block_violations == 0


class _BitGather:
    """Linear maps between a vector and its sub-vector on ``positions``, via byte tables."""

    def __init__(self, positions: list[int]):
        self.positions = positions
        self.base = min(positions) if positions else 0
        span = (max(positions) - self.base + 1) if positions else 0
        where = {p - self.base: t for t, p in enumerate(positions)}
        self.gather = [[sum(1 << where[8 * c + b] for b in range(8) if (byte >> b) & 1 and 8 * c + b in where)
                        for byte in range(256)] for c in range((span + 7) // 8)]
        self.scatter = [[sum(1 << (positions[8 * c + b] - self.base) for b in range(8)
                             if (byte >> b) & 1 and 8 * c + b < len(positions))
                         for byte in range(256)] for c in range((len(positions) + 7) // 8)]

    def compress(self, x: int) -> int:
        x >>= self.base
        out = 0
        for table in self.gather:
            out |= table[x & 255]
            x >>= 8
        return out

    def expand(self, c: int) -> int:
        out = 0
        for table in self.scatter:
            out |= table[c & 255]
            c >>= 8
        return out << self.base


def claim4_verify(
    Asub: SparseSet | Iterable[int], fam: BasisFamily, j: int, k: int, A: ProductBandSet,
    require_good: bool = True,
) -> Claim4Report:
    """Count (A'' + kB'_j) \\ A fiber by fiber and inspect every produced element.

    A'' is split by its coordinates outside {(i, j) : i in I_j}; each fiber is a
    subset of a width-k band in F_2^{I_j}, whose exact weight window is shifted
    by the weight w of the remaining coordinates of block j.
    """
    _require_square(A)
    m = A.m
    if fam.m != m:
        raise ValueError("family and instance disagree on m")
    Ij = sorted(fam.I[j])
    if require_good and len(Ij) <= 10 * k * k:
        raise NotGoodError(f"block {j} is not good: |I_j| = {len(Ij)} <= 10k^2 = {10 * k * k}")
    if not Ij:
        raise NotGoodError(f"block {j} has an empty index set")
    pts = sorted(set(Asub.elements if isinstance(Asub, SparseSet) else (int(a) for a in Asub)))
    bad = [a for a in pts if not A.contains(a)]
    if bad:
        listing = ", ".join(f"{a:#x}" for a in bad[:5])
        raise ValueError(f"{len(bad)} elements of A'' are not in A: {listing}")
    positions = [j * m + i for i in Ij]
    bits = _BitGather(positions)
    fiber_mask = sum(1 << p for p in positions)
    block_mask = ((1 << m) - 1) << (j * m)
    lo, hi = A.params.ell, A.params.top
    groups: dict[int, list[int]] = defaultdict(list)
    for a in pts:
        groups[a & ~fiber_mask].append(bits.compress(a))
    D = len(Ij)
    rep = Claim4Report(j, k, len(pts))
    for v in sorted(groups):
        w = (v & block_mask).bit_count()
        flo, fhi = lo - w, hi - w
        out = outside_sums(groups[v], D, flo, fhi, k)
        width = min(k, D + 1)
        ell = min(max(flo, 0), D + 1 - width)
        band = BandSpec(D, ell, width)
        rep.fibers.append(IsoperimetryReport(band, k, len(groups[v]), len(out),
                                             "up" if 2 * ell <= D else "down"))
        # outputs of one fiber share every block except j with v
        others_bad = any(b != j for b in A.offending_blocks(v))
        for c in (int(c) for c in out):
            full = v | bits.expand(c)
            rep.outputs.append(full)
            wj = (full & block_mask).bit_count()
            if others_bad or lo <= wj <= hi:
                rep.single_block_violations += 1
    return rep


def outputs_disjoint(reports: Iterable[Claim4Report]) -> bool:
    seen: set[int] = set()
    for r in reports:
        s = set(r.outputs)
        if seen & s:
            return False
        seen |= s
    return True


@dataclass(frozen=True)
class BoundDiagnostic:
    m: int
    k: int
    K: Fraction
    size: int
    good: tuple[int, ...]

    @property
    def n_good(self) -> int:
        return len(self.good)

    @property
    def bound(self) -> int:
        return 10 * self.k * self.k * self.m + self.n_good * self.m

    @property
    def good_ceiling(self) -> Fraction:
        return 2 ** (self.k + 2) * self.K ** self.k

    @property
    def good_within_ceiling(self) -> bool:
        return self.n_good <= self.good_ceiling

    @property
    def within_sqrt_bound(self) -> bool:
        return self.size <= (10 * self.k * self.k + self.good_ceiling) * self.m

    def record(self) -> dict:
        c = self.good_ceiling
        return {
            "m": self.m,
            "k": self.k,
            "K": str(self.K),
            "sizeBprime": self.size,
            "goodCount": self.n_good,
            "good": list(self.good),
            "bound": self.bound,
            "sizeWithinBound": self.size <= self.bound,
            "goodCeilingNum": str(c.numerator),
            "goodCeilingDen": str(c.denominator),
            "goodWithinCeiling": self.good_within_ceiling,
            "withinSqrtBound": self.within_sqrt_bound,
        }


def bprime_bound_diagnostic(fam: BasisFamily, K, k: int) -> BoundDiagnostic:
    return BoundDiagnostic(fam.m, k, Fraction(K), fam.size, tuple(fam.good(k)))
