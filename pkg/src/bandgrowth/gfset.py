"""Subsets of F_2^D and of block spaces (F_2^m)^r with exact set arithmetic.

Dense sets store a 2^D-bit membership array packed little-endian into
uint64 words: bit ``p % 64`` of word ``p // 64`` is set iff the vector whose
integer encoding is ``p`` belongs to the set, where bit i of the encoding is
coordinate i.  Sparse sets store vectors as Python ints, block j of an
r-block vector occupying bits ``j*m .. j*m + m - 1``.
"""

from __future__ import annotations

from typing import Iterable, Iterator, TextIO

import numpy as np

D_MAX = 28

_WORD = np.dtype("<u8")

# _SWAP_MASKS[b] selects the in-word positions whose bit b is clear.
_SWAP_MASKS = [
    np.uint64(0x5555555555555555),
    np.uint64(0x3333333333333333),
    np.uint64(0x0F0F0F0F0F0F0F0F),
    np.uint64(0x00FF00FF00FF00FF),
    np.uint64(0x0000FFFF0000FFFF),
    np.uint64(0x00000000FFFFFFFF),
]


class DimensionError(ValueError):
    """Operands live in different ambient spaces."""


class EmptySetError(ValueError):
    """A sumset was requested with an empty operand."""


def _nwords(D: int) -> int:
    return max(1, (1 << D) >> 6)


def _check_dim(D: int) -> None:
    if not isinstance(D, (int, np.integer)) or not 1 <= D <= D_MAX:
        raise ValueError(f"dense dimension must be in [1, {D_MAX}], got {D!r}")


def _weight_masks(width: int) -> np.ndarray:
    """Word masks by popcount: entry t marks positions p < width with |p| = t."""
    pos = np.arange(width, dtype=np.uint64)
    w = np.bitwise_count(pos)
    out = np.zeros(8, dtype=_WORD)
    for t in range(7):
        sel = pos[w == t]
        if sel.size:
            out[t] = np.bitwise_or.reduce(np.left_shift(np.uint64(1), sel))
    return out


def _translate_words(words: np.ndarray, D: int, y: int) -> np.ndarray:
    """Membership words of X + {y}: new[p] = old[p ^ y]."""
    hi, lo = y >> 6, y & 63
    out = words
    if hi:
        nd = D - 6
        axes = tuple(nd - 1 - b for b in range(nd) if (hi >> b) & 1)
        out = np.flip(words.reshape((2,) * nd), axis=axes).reshape(-1)
    for b in range(6):
        if (lo >> b) & 1:
            s = np.uint64(1 << b)
            mk = _SWAP_MASKS[b]
            out = ((out & mk) << s) | ((out >> s) & mk)
    if out is words:
        out = words.copy()
    return out


class DenseSet:
    """Immutable subset of F_2^D held as a packed membership array."""

    __slots__ = ("D", "_words")

    def __init__(self, D: int, words: np.ndarray):
        _check_dim(D)
        words = np.ascontiguousarray(words, dtype=_WORD)
        if words.shape != (_nwords(D),):
            raise ValueError("membership array has the wrong length")
        if D < 6:
            words = words & np.uint64((1 << (1 << D)) - 1)
        words.flags.writeable = False
        self.D = int(D)
        self._words = words

    # construction

    @classmethod
    def empty(cls, D: int) -> DenseSet:
        _check_dim(D)
        return cls(D, np.zeros(_nwords(D), dtype=_WORD))

    @classmethod
    def full(cls, D: int) -> DenseSet:
        _check_dim(D)
        return cls(D, np.full(_nwords(D), np.uint64(0xFFFFFFFFFFFFFFFF), dtype=_WORD))

    @classmethod
    def from_indices(cls, D: int, indices: Iterable[int]) -> DenseSet:
        _check_dim(D)
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                         dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= (1 << D)):
            raise ValueError(f"vector index out of range for D={D}")
        words = np.zeros(_nwords(D), dtype=_WORD)
        if idx.size:
            u = idx.astype(np.uint64)
            np.bitwise_or.at(words, (u >> np.uint64(6)).astype(np.int64),
                             np.left_shift(np.uint64(1), u & np.uint64(63)))
        return cls(D, words)

    @classmethod
    def from_bytes(cls, D: int, data: bytes) -> DenseSet:
        _check_dim(D)
        buf = np.frombuffer(data, dtype=np.uint8)
        need = _nwords(D) * 8
        if buf.size > need:
            raise ValueError("bitmap longer than 2^D bits")
        padded = np.zeros(need, dtype=np.uint8)
        padded[: buf.size] = buf
        return cls(D, padded.view(_WORD))

    # inspection

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_bytes(self) -> bytes:
        nbytes = max(1, (1 << self.D) // 8)
        return self._words.view(np.uint8)[:nbytes].tobytes()

    def indices(self) -> np.ndarray:
        bits = np.unpackbits(self._words.view(np.uint8), bitorder="little")
        return np.flatnonzero(bits[: 1 << self.D])

    def __len__(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def __bool__(self) -> bool:
        return bool(self._words.any())

    def __iter__(self) -> Iterator[int]:
        return (int(v) for v in self.indices())

    def __contains__(self, v: int) -> bool:
        if not 0 <= v < (1 << self.D):
            return False
        return bool((int(self._words[v >> 6]) >> (v & 63)) & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseSet):
            return NotImplemented
        return self.D == other.D and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self.D, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"DenseSet(D={self.D}, size={len(self)})"

    # boolean algebra

    def _same(self, other: DenseSet) -> None:
        if self.D != other.D:
            raise DimensionError(f"dimension mismatch: {self.D} vs {other.D}")

    def __or__(self, other: DenseSet) -> DenseSet:
        self._same(other)
        return DenseSet(self.D, self._words | other._words)

    def __and__(self, other: DenseSet) -> DenseSet:
        self._same(other)
        return DenseSet(self.D, self._words & other._words)

    def __sub__(self, other: DenseSet) -> DenseSet:
        self._same(other)
        return DenseSet(self.D, self._words & ~other._words)

    def issubset(self, other: DenseSet) -> bool:
        self._same(other)
        return not bool((self._words & ~other._words).any())

    def translate(self, y: int) -> DenseSet:
        if not 0 <= y < (1 << self.D):
            raise ValueError("translate vector out of range")
        return DenseSet(self.D, _translate_words(self._words, self.D, int(y)))

    def weights(self) -> np.ndarray:
        return np.bitwise_count(self.indices().astype(np.uint64))


def weight(v: int) -> int:
    """Hamming weight of an integer-encoded vector."""
    return int(v).bit_count()


def band_mask(D: int, lo: int, hi: int) -> DenseSet:
    """All vectors of F_2^D with weight in [lo, hi]."""
    _check_dim(D)
    lo, hi = max(lo, 0), min(hi, D)
    if lo > hi:
        return DenseSet.empty(D)
    low_bits = min(D, 6)
    table = _weight_masks(1 << low_bits)
    hw = np.bitwise_count(np.arange(_nwords(D), dtype=np.uint64)).astype(np.int64)
    words = np.zeros(_nwords(D), dtype=_WORD)
    for t in range(low_bits + 1):
        sel = (hw + t >= lo) & (hw + t <= hi)
        words[sel] |= table[t]
    return DenseSet(D, words)


def layer(D: int, d: int) -> DenseSet:
    """The Hamming layer L_d of F_2^D."""
    if not 0 <= d <= D:
        raise ValueError(f"layer index {d} outside [0, {D}]")
    return band_mask(D, d, d)


def basis(D: int) -> DenseSet:
    """The standard basis {e_1, ..., e_D}."""
    return DenseSet.from_indices(D, [1 << i for i in range(D)])


def singleton_zero(D: int) -> DenseSet:
    return DenseSet.from_indices(D, [0])


def sumset(X: DenseSet, Y: DenseSet) -> DenseSet:
    """{x + y : x in X, y in Y} with + the coordinatewise XOR."""
    if X.D != Y.D:
        raise DimensionError(f"dimension mismatch: {X.D} vs {Y.D}")
    nx, ny = len(X), len(Y)
    if nx == 0 or ny == 0:
        raise EmptySetError("sumset with an empty operand is undefined")
    if ny > nx:
        X, Y, nx, ny = Y, X, ny, nx
    D = X.D
    if nx < 8 * _nwords(D):
        xs = X.indices()
        ys = Y.indices()
        return DenseSet.from_indices(D, np.unique(xs[:, None] ^ ys[None, :]))
    acc = np.zeros(_nwords(D), dtype=_WORD)
    for y in Y.indices():
        acc |= _translate_words(X.words, D, int(y))
    return DenseSet(D, acc)


def iterated_sumset(X: DenseSet, k: int) -> DenseSet:
    """The k-fold sumset X + ... + X (k >= 1 summands)."""
    if k < 1:
        raise ValueError("k-fold sumset needs k >= 1; use the singleton {0} for k = 0")
    out = X
    for _ in range(k - 1):
        out = sumset(out, X)
    return out


def add_k_basis(X: DenseSet, k: int) -> DenseSet:
    """X + kS for S the standard basis, computed as ((X + S) + S) + ..."""
    if k < 1:
        raise ValueError("k must be >= 1")
    S = basis(X.D)
    out = X
    for _ in range(k):
        out = sumset(out, S)
    return out


class SparseSet:
    """Immutable deduplicated set of vectors in (F_2^m)^r, vectors as ints."""

    __slots__ = ("m", "r", "_elements")

    def __init__(self, m: int, r: int, elements: Iterable[int] = ()):
        if m < 1 or r < 1:
            raise ValueError("block geometry needs m >= 1 and r >= 1")
        self.m = int(m)
        self.r = int(r)
        elems = frozenset(int(v) for v in elements)
        limit = 1 << (self.m * self.r)
        for v in elems:
            if not 0 <= v < limit:
                raise ValueError(f"vector {v:#x} does not fit {r} blocks of {m} bits")
        self._elements = elems

    @classmethod
    def from_blocks(cls, m: int, r: int, vectors: Iterable[Iterable[int]]) -> SparseSet:
        return cls(m, r, (pack_blocks(m, blocks) for blocks in vectors))

    @classmethod
    def from_dense(cls, X: DenseSet, m: int, r: int) -> SparseSet:
        if m * r != X.D:
            raise DimensionError("block geometry does not match dense dimension")
        return cls(m, r, X)

    @property
    def dim(self) -> int:
        return self.m * self.r

    @property
    def elements(self) -> frozenset[int]:
        return self._elements

    def sorted(self) -> list[int]:
        return sorted(self._elements)

    def blocks(self, v: int) -> list[int]:
        return unpack_blocks(self.m, self.r, v)

    def to_dense(self) -> DenseSet:
        return DenseSet.from_indices(self.dim, self.sorted())

    def __len__(self) -> int:
        return len(self._elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sorted())

    def __contains__(self, v: int) -> bool:
        return v in self._elements

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseSet):
            return NotImplemented
        return (self.m, self.r, self._elements) == (other.m, other.r, other._elements)

    def __hash__(self) -> int:
        return hash((self.m, self.r, self._elements))

    def __repr__(self) -> str:
        return f"SparseSet(m={self.m}, r={self.r}, size={len(self)})"


def pack_blocks(m: int, blocks: Iterable[int]) -> int:
    v = 0
    for j, b in enumerate(blocks):
        if not 0 <= b < (1 << m):
            raise ValueError(f"block {b:#x} does not fit in {m} bits")
        v |= int(b) << (j * m)
    return v


def unpack_blocks(m: int, r: int, v: int) -> list[int]:
    mask = (1 << m) - 1
    return [(v >> (j * m)) & mask for j in range(r)]


def basis_vector(m: int, i: int, j: int) -> int:
    """e_{i,j}: coordinate i of block j (both 0-based)."""
    return 1 << (j * m + i)


def sparse_sumset(X: SparseSet, Y: SparseSet) -> SparseSet:
    if (X.m, X.r) != (Y.m, Y.r):
        raise DimensionError(f"block geometry mismatch: {(X.m, X.r)} vs {(Y.m, Y.r)}")
    if not X.elements or not Y.elements:
        raise EmptySetError("sumset with an empty operand is undefined")
    return SparseSet(X.m, X.r, {x ^ y for x in X.elements for y in Y.elements})


# text format


def write_set(S: DenseSet | SparseSet, fh: TextIO, bitmap: bool = False) -> None:
    if isinstance(S, DenseSet):
        if bitmap:
            fh.write(f"dense D={S.D} encoding=bitmap\n")
            fh.write(S.to_bytes().hex() + "\n")
            return
        fh.write(f"dense D={S.D}\n")
        for v in S:
            fh.write(f"{v:x}\n")
    else:
        fh.write(f"sparse m={S.m} r={S.r}\n")
        for v in S:
            fh.write(f"{v:x}\n")


def _header_fields(tokens: list[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ValueError(f"malformed header token {tok!r}")
        out[key] = val
    return out


def read_set(fh: TextIO) -> DenseSet | SparseSet:
    lines = [ln.strip() for ln in fh.read().splitlines()]
    if not lines:
        raise ValueError("empty set file")
    head = lines[0].split()
    body = [ln for ln in lines[1:] if ln and not ln.startswith("#")]
    if not head or head[0] not in ("dense", "sparse"):
        raise ValueError(f"unknown set file header {lines[0]!r}")
    fields = _header_fields(head[1:])
    if head[0] == "dense":
        D = int(fields["D"])
        if fields.get("encoding", "list") == "bitmap":
            return DenseSet.from_bytes(D, bytes.fromhex("".join(body)))
        return DenseSet.from_indices(D, [int(ln, 16) for ln in body])
    return SparseSet(int(fields["m"]), int(fields["r"]), (int(ln, 16) for ln in body))
