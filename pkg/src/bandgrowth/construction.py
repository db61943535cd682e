"""The product-of-bands set A in (F_2^m)^m and the basis B.

A is the product of m copies of the band L_{m'-k'} | ... | L_{m'+k'} in
F_2^m (k = 2k' + 1, m' = m // 2); B is the standard basis {e_{i,j}}.
Vectors of (F_2^m)^m are ints with block j in bits j*m .. j*m + m - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from statistics import NormalDist

import numpy as np

from .layers import BandSpec, band_size, binomial, cumulative_band_sizes, sample_band_vector, weight_range_size


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionParams:
    m: int
    k: int
    delta: Fraction | None = None
    K: Fraction | None = None
    unchecked: bool = False
    r: int | None = None

    @property
    def blocks(self) -> int:
        """Number of blocks r; the instance proper has r = m."""
        return self.m if self.r is None else self.r

    @property
    def k_half(self) -> int:
        return (self.k - 1) // 2

    @property
    def m_half(self) -> int:
        return self.m // 2

    @property
    def ell(self) -> int:
        return self.m_half - self.k_half

    @property
    def top(self) -> int:
        return self.m_half + self.k_half

    @property
    def hypothesis_met(self) -> bool:
        return self.k >= 3 and self.m % 2 == 0 and self.m > 10 * self.k * self.k


def derive_k(delta: Fraction) -> int:
    """Smallest odd integer strictly greater than 4/delta."""
    k = math.floor(4 / delta) + 1
    return k if k % 2 else k + 1


def derive_m(k: int) -> int:
    """Smallest even integer strictly greater than 10k^2."""
    m = 10 * k * k + 1
    return m if m % 2 == 0 else m + 1


def make_params(
    delta=None, K=None, m: int | None = None, k: int | None = None, unchecked: bool = False,
    r: int | None = None,
) -> ConstructionParams:
    if delta is not None:
        delta = Fraction(delta)
        if not 0 < delta < 1:
            raise ParameterError(f"need 0 < delta < 1, got delta = {delta}")
    if K is not None:
        K = Fraction(K)
        if not K > 1:
            raise ParameterError(f"need K > 1, got K = {K}")
    if k is None:
        if delta is None:
            raise ParameterError("either delta or an explicit k is required")
        k = derive_k(delta)
    if k < 1 or k % 2 == 0:
        raise ParameterError(f"k must be a positive odd integer, got k = {k}")
    if m is None:
        m = derive_m(k)
    if m < 1:
        raise ParameterError(f"m must be positive, got m = {m}")
    if not unchecked:
        if k < 3:
            raise ParameterError(f"need k >= 3 (got {k}); pass unchecked for toy instances")
        if m % 2:
            raise ParameterError(f"m must be even (got {m}); pass unchecked for toy instances")
        if m <= 10 * k * k:
            raise ParameterError(
                f"need m > 10k^2 = {10 * k * k} (got {m}); pass unchecked for toy instances"
            )
        if delta is not None and not k > 2 / delta:
            raise ParameterError(f"need k > 2/delta = {2 / delta} for closure above 1 - delta")
    if r is not None and r < 1:
        raise ParameterError(f"r must be positive, got r = {r}")
    P = ConstructionParams(int(m), int(k), delta, K, unchecked, None if r is None or r == m else int(r))
    if P.ell < 0 or P.top > P.m:
        raise ParameterError(f"band of width {k} does not fit in F_2^{m}")
    return P


@dataclass(frozen=True)
class ProductBandSet:
    params: ConstructionParams

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def r(self) -> int:
        return self.params.blocks

    @property
    def block_band(self) -> BandSpec:
        return BandSpec(self.m, self.params.ell, self.params.k)

    @property
    def block_size(self) -> int:
        return band_size(self.block_band)

    @property
    def size(self) -> int:
        return self.block_size ** self.r

    def contains(self, v: int) -> bool:
        m, lo, hi = self.m, self.params.ell, self.params.top
        if not 0 <= v < (1 << (m * self.r)):
            return False
        mask = (1 << m) - 1
        for j in range(self.r):
            if not lo <= ((v >> (j * m)) & mask).bit_count() <= hi:
                return False
        return True

    def offending_blocks(self, v: int) -> list[int]:
        m, lo, hi = self.m, self.params.ell, self.params.top
        mask = (1 << m) - 1
        return [j for j in range(self.r) if not lo <= ((v >> (j * m)) & mask).bit_count() <= hi]


@dataclass(frozen=True)
class BasisSet:
    m: int
    r: int | None = None

    @property
    def size(self) -> int:
        return self.m * (self.m if self.r is None else self.r)

    def elements(self):
        return (1 << p for p in range(self.size))

    def contains(self, v: int) -> bool:
        return 0 < v < (1 << self.size) and v.bit_count() == 1


def build(delta=None, K=None, m=None, k=None, unchecked=False, r=None) -> tuple[ProductBandSet, BasisSet]:
    P = make_params(delta, K, m, k, unchecked, r)
    return build_params(P)


def build_params(P: ConstructionParams) -> tuple[ProductBandSet, BasisSet]:
    return ProductBandSet(P), BasisSet(P.m, P.r)


def closure_probability_exact(A: ProductBandSet) -> Fraction:
    """P(a + b in A) for uniform a in A, b in B.

    Adding e_{i,j} leaves A exactly when block j sits on the bottom layer with
    coordinate i set, or on the top layer with coordinate i clear.
    """
    P = A.params
    exits = binomial(P.m - 1, P.ell - 1) + binomial(P.m - 1, P.top)
    return 1 - Fraction(exits, A.block_size)


def closure_lower_bound(A: ProductBandSet) -> Fraction:
    return 1 - Fraction(2, A.params.k)


def closure_probability_inner_bound(A: ProductBandSet) -> Fraction:
    """|inner band of width k-2| / |band|: blocks strictly inside stay inside."""
    P = A.params
    if P.k < 3:
        raise ParameterError("inner band is empty for k = 1")
    return Fraction(weight_range_size(P.m, P.ell + 1, P.top - 1), A.block_size)


def enumerate_product_band(A: ProductBandSet, limit: int = 10**7) -> np.ndarray:
    """All elements of A as uint64 ints; only for tiny m."""
    m, r = A.m, A.r
    if m * r > 63:
        raise ParameterError(f"(F_2^{m})^{r} is too large to enumerate")
    if A.size > limit:
        raise ParameterError(f"|A| = {A.size} exceeds enumeration limit {limit}")
    lo, hi = A.params.ell, A.params.top
    block = np.array([x for x in range(1 << m) if lo <= bin(x).count("1") <= hi], dtype=np.uint64)
    out = np.zeros(1, dtype=np.uint64)
    for j in range(r):
        out = (out[:, None] | (block[None, :] << np.uint64(j * m))).reshape(-1)
    return out


def closure_probability_bruteforce(A: ProductBandSet) -> tuple[Fraction, dict[tuple[int, int], Fraction]]:
    """Count all pairs (a, b) with a + b in A; also the per-basis-vector conditional."""
    m, r = A.m, A.r
    lo, hi = A.params.ell, A.params.top
    elems = enumerate_product_band(A)
    mask = np.uint64((1 << m) - 1)
    total = 0
    per_b = {}
    for j in range(r):
        for i in range(m):
            moved = elems ^ np.uint64(1 << (j * m + i))
            ok = np.ones(moved.size, dtype=bool)
            for jj in range(r):
                w = np.bitwise_count((moved >> np.uint64(jj * m)) & mask)
                ok &= (w >= lo) & (w <= hi)
            hits = int(ok.sum())
            total += hits
            per_b[(i, j)] = Fraction(hits, elems.size)
    return Fraction(total, elems.size * m * r), per_b


@dataclass(frozen=True)
class MonteCarloEstimate:
    hits: int
    samples: int
    seed: int
    confidence: float
    ci_low: float
    ci_high: float

    @property
    def estimate(self) -> float:
        return self.hits / self.samples

    def covers(self, value) -> bool:
        return self.ci_low <= float(value) <= self.ci_high


def wilson_interval(hits: int, n: int, confidence: float = 0.99) -> tuple[float, float]:
    z = NormalDist().inv_cdf(1 - (1 - confidence) / 2)
    phat = hits / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def closure_probability_montecarlo(
    A: ProductBandSet, samples: int, seed: int = 0, confidence: float = 0.99
) -> MonteCarloEstimate:
    """Estimate P(a + b in A) by sampling.

    Only block j of a can leave the band when e_{i,j} is added, and block j of
    a uniform a in A is uniform on the band whatever j is, so each sample
    draws the coordinate i and block j alone.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    band = A.block_band
    cdf = cumulative_band_sizes(band)
    m = A.m
    hits = 0
    for _ in range(samples):
        i = int(rng.integers(0, m))
        x = sample_band_vector(band, rng, cdf) ^ (1 << i)
        if band.contains_weight(x.bit_count()):
            hits += 1
    lo, hi = wilson_interval(hits, samples, confidence)
    return MonteCarloEstimate(hits, samples, seed, confidence, lo, hi)


def fmt_float(x) -> str:
    return format(float(x), ".12g")


def instance_report(A: ProductBandSet, mc: MonteCarloEstimate | None = None) -> dict:
    P = A.params
    exact = closure_probability_exact(A)
    lower = closure_lower_bound(A)
    rep = {
        "delta": None if P.delta is None else str(P.delta),
        "K": None if P.K is None else str(P.K),
        "k": P.k,
        "m": P.m,
        "r": P.blocks,
        "ell": P.ell,
        "blockBandSize": str(A.block_size),
        "sizeA": str(A.size),
        "sizeB": str(P.m * P.blocks),
        "exactProbNum": str(exact.numerator),
        "exactProbDen": str(exact.denominator),
        "exactProb": fmt_float(exact),
        "lowerBoundNum": str(lower.numerator),
        "lowerBoundDen": str(lower.denominator),
        "hypothesisMet": P.hypothesis_met,
    }
    if P.k >= 3:
        inner = closure_probability_inner_bound(A)
        rep["innerBoundNum"] = str(inner.numerator)
        rep["innerBoundDen"] = str(inner.denominator)
    if mc is not None:
        rep["mcEstimate"] = fmt_float(mc.estimate)
        rep["mcCI"] = [fmt_float(mc.ci_low), fmt_float(mc.ci_high)]
        rep["mcSamples"] = mc.samples
        rep["mcSeed"] = mc.seed
        rep["mcCoversExact"] = mc.covers(exact)
    return rep


# the Z/p comparison example: A = {0,1}^n, B = basis, inside F_p^n


@dataclass(frozen=True)
class ComparisonReport:
    p: int
    n: int
    size_a: int
    closure: Fraction
    growth: tuple[tuple[int, int, Fraction], ...]  # (t, |A + B'_t|, ratio)


def _encode(digits: np.ndarray, p: int) -> np.ndarray:
    weights = p ** np.arange(digits.shape[1], dtype=np.int64)
    return digits @ weights


def comparison_example(p: int, n: int) -> ComparisonReport:
    if p < 3:
        raise ParameterError("need p >= 3")
    if n < 1:
        raise ParameterError("need n >= 1")
    if p**n > 10**7:
        raise ParameterError(f"p^n = {p**n} is too large to enumerate")
    digits = np.array(list(product((0, 1), repeat=n)), dtype=np.int64)
    member = np.zeros(p**n, dtype=bool)
    member[_encode(digits, p)] = True
    hits = 0
    reached = np.zeros(p**n, dtype=bool)
    growth = []
    for t in range(n):
        moved = digits.copy()
        moved[:, t] = (moved[:, t] + 1) % p
        codes = _encode(moved, p)
        hits += int(member[codes].sum())
        reached[codes] = True
        size = int(reached.sum())
        growth.append((t + 1, size, Fraction(size, len(digits))))
    closure = Fraction(hits, len(digits) * n)
    return ComparisonReport(p, n, len(digits), closure, tuple(growth))
