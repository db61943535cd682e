"""Exact counting for Hamming layers and bands of F_2^D.

All counts are Python ints and all ratios are ``fractions.Fraction``;
floats only appear when a report is rendered for humans.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np


def binomial(n: int, r: int) -> int:
    """C(n, r), zero outside 0 <= r <= n."""
    if n < 0:
        raise ValueError("binomial needs n >= 0")
    if r < 0 or r > n:
        return 0
    return comb(n, r)


@dataclass(frozen=True)
class BandSpec:
    """The band L_ell | ... | L_{ell+k-1} in F_2^D."""

    D: int
    ell: int
    k: int

    def __post_init__(self):
        if self.D < 0 or self.k < 1:
            raise ValueError(f"invalid band {self}")
        if self.ell < 0 or self.ell + self.k - 1 > self.D:
            raise ValueError(f"band layers [{self.ell}, {self.top}] fall outside [0, {self.D}]")

    @property
    def top(self) -> int:
        return self.ell + self.k - 1

    def contains_weight(self, w: int) -> bool:
        return self.ell <= w <= self.top

    @property
    def size(self) -> int:
        return band_size(self)


def layer_size(D: int, d: int) -> int:
    return binomial(D, d)


def band_size(b: BandSpec) -> int:
    return sum(binomial(b.D, d) for d in range(b.ell, b.top + 1))


def weight_range_size(D: int, lo: int, hi: int) -> int:
    """Number of vectors with weight in [lo, hi]; clipped to [0, D]."""
    return sum(binomial(D, d) for d in range(max(lo, 0), min(hi, D) + 1))


def growth_ratio(D: int, i: int, k: int) -> Fraction:
    """C(D-i, k) / C(i+k, k): exactly-k-flip growth from L_i into L_{i+k}."""
    if not 0 <= i <= D - k:
        raise ValueError(f"need 0 <= i <= D - k, got i={i}, D={D}, k={k}")
    return Fraction(binomial(D - i, k), binomial(i + k, k))


def mirror_growth_ratio(D: int, i: int, k: int) -> Fraction:
    """C(i, k) / C(D+k-i, k): growth from L_i down into L_{i-k}."""
    if not k <= i <= D:
        raise ValueError(f"need k <= i <= D, got i={i}, D={D}, k={k}")
    return Fraction(binomial(i, k), binomial(D + k - i, k))


@dataclass(frozen=True)
class RatioChainReport:
    D: int
    k: int
    min_ratio: Fraction
    witness_i: int
    middle_bound: Fraction
    linear_bound: Fraction
    violations: tuple[int, ...]

    @property
    def passes(self) -> bool:
        return not self.violations


def ratio_lower_bound_check(D: int, k: int) -> RatioChainReport:
    """Check C(D-i,k)/C(i+k,k) >= ((D/2-k)/(D/2+k))^k >= (1-4k/D)^k > 1/2 for all i <= D/2."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if D <= 10 * k * k:
        raise ValueError(f"hypothesis D > 10k^2 fails: D={D}, 10k^2={10 * k * k}")
    half = Fraction(D, 2)
    middle = ((half - k) / (half + k)) ** k
    linear = (1 - Fraction(4 * k, D)) ** k
    chain_ok = middle >= linear > Fraction(1, 2)
    bad = []
    best_i, best = 0, None
    for i in range(D // 2 + 1):
        r = growth_ratio(D, i, k)
        if best is None or r < best:
            best, best_i = r, i
        if not (r >= middle and chain_ok):
            bad.append(i)
    return RatioChainReport(D, k, best, best_i, middle, linear, tuple(bad))


def cumulative_band_sizes(b: BandSpec) -> list[int]:
    acc, out = 0, []
    for d in range(b.ell, b.top + 1):
        acc += binomial(b.D, d)
        out.append(acc)
    return out


def randbelow(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) for arbitrarily large n, by rejection on random bytes."""
    if n < 1:
        raise ValueError("n must be positive")
    nbits = (n - 1).bit_length()
    if nbits == 0:
        return 0
    nbytes = (nbits + 7) // 8
    extra = nbytes * 8 - nbits
    while True:
        u = int.from_bytes(rng.bytes(nbytes), "little") >> extra
        if u < n:
            return u


def sample_band_weight(b: BandSpec, rng: np.random.Generator, cdf: list[int] | None = None) -> int:
    """Weight of a uniform element of the band, by exact inverse CDF."""
    cdf = cdf if cdf is not None else cumulative_band_sizes(b)
    u = randbelow(rng, cdf[-1])
    for off, c in enumerate(cdf):
        if u < c:
            return b.ell + off
    raise AssertionError("unreachable")


def sample_band_vector(b: BandSpec, rng: np.random.Generator, cdf: list[int] | None = None) -> int:
    """Uniform element of the band, encoded as an int."""
    d = sample_band_weight(b, rng, cdf)
    if d == 0:
        return 0
    pos = rng.choice(b.D, size=d, replace=False)
    v = 0
    for p in pos.tolist():
        v |= 1 << p
    return v
