import io
from itertools import combinations
from fractions import Fraction

import numpy as np
import pytest

from bandgrowth import construction as C
from bandgrowth import gfset, witness
from bandgrowth.gfset import DenseSet, SparseSet
from bandgrowth.layers import BandSpec, binomial
from bandgrowth.verify import random_product_points
from oracles import band_set, naive_sumset, popcount


def toy(m, k):
    return C.build(m=m, k=k, unchecked=True)[0]


def test_column_family_toy():
    A = toy(4, 3)
    rep = witness.column_family_growth(A)
    assert rep.size_sum == 16 * 14**3
    assert rep.ratio == Fraction(8, 7)
    assert witness.column_family_growth_dense(A) == 16 * 14**3


def test_column_family_m12():
    A = toy(12, 3)
    rep = witness.column_family_growth(A, K=2)
    num = sum(binomial(12, d) for d in range(4, 9))
    den = sum(binomial(12, d) for d in range(5, 8))
    assert rep.ratio == Fraction(num, den) == Fraction(53, 38)
    # block level by the naive oracle in F_2^12
    widened = naive_sumset(band_set(12, 5, 7), [1 << i for i in range(12)])
    assert len(widened) == num
    assert rep.within_K


@pytest.mark.parametrize("D", range(3, 17))
def test_block_widening_identity(D):
    for k in range(2, D):
        for ell in range(1, D - k):
            assert witness.block_widening_holds(D, ell, k)


def test_single_layer_does_not_widen_to_a_band():
    # L_ell + S skips L_ell itself, so the width-(k+2) identity needs k >= 2
    assert not witness.block_widening_holds(8, 3, 1)
    assert witness.widened_block_size(8, 3, 1) == binomial(8, 2) + binomial(8, 4)
    assert witness.column_family_growth(toy(8, 1)).size_sum == (binomial(8, 3) + binomial(8, 5)) * binomial(8, 4) ** 7


def test_clipped_column_band_flagged():
    A = toy(3, 3)  # ell = 0
    rep = witness.column_family_growth(A)
    assert rep.clipped
    assert rep.size_sum == witness.column_family_growth_dense(A)


def test_invariant_subset_d3():
    inv = witness.invariant_subset(BandSpec(3, 1, 2), 1)
    assert sorted(inv) == [2, 3, 4, 5]
    assert gfset.sumset(inv, DenseSet.from_indices(3, [1])) == inv


def test_invariant_subset_m4_by_enumeration():
    sigma = band_set(4, 1, 3)
    expected = {x for x in sigma if x ^ 1 in sigma}
    inv = witness.invariant_subset(BandSpec(4, 1, 3), 1)
    assert set(inv) == expected and len(inv) == 12


def test_row_family_fixture_toy():
    fx = witness.row_family_fixture(toy(4, 3), K=2)
    assert fx.block_closed and fx.full_check
    assert fx.size == 12**4
    assert fx.growth.ratio == 1 and fx.growth.within_K
    Ap = fx.materialize()
    Bp = SparseSet(4, 4, [gfset.basis_vector(4, 0, j) for j in range(4)])
    assert gfset.sparse_sumset(Ap, Bp) == Ap
    assert all(fx.contains(v) for v in list(Ap)[:50])


@pytest.mark.parametrize("D", range(2, 17))
def test_row_block_closure_all_bands(D):
    for k in range(2, D + 2):
        for ell in range(0, D - k + 2):
            inv = witness.invariant_subset(BandSpec(D, ell, k), 1)
            assert inv, (D, ell, k)  # a width >= 2 band contains an invariant set
            assert gfset.sumset(inv, DenseSet.from_indices(D, [1])) == inv


def test_row_family_needs_width_two():
    with pytest.raises(ValueError):
        witness.row_family_fixture(toy(11, 1))


def test_row_family_large_m_block_only():
    fx = witness.row_family_fixture(toy(12, 3))
    assert fx.block_closed and fx.full_check is None
    assert fx.size == len(fx.block_set) ** 12


def test_claim4_single_point():
    A = toy(11, 1)
    v = gfset.pack_blocks(11, [0b11111] * 11)
    rep = witness.claim4_verify([v], witness.BasisFamily.full(11), 0, 1, A)
    assert rep.outside == 11 and rep.passes


@pytest.mark.parametrize("seed", range(3))
def test_claim4_random_100(seed):
    A = toy(11, 1)
    pts = random_product_points(A, 100, np.random.default_rng(seed))
    fam = witness.BasisFamily.full(11)
    reps = [witness.claim4_verify(pts, fam, j, 1, A) for j in fam.good(1)]
    for r in reps:
        assert r.outside >= 50 and r.passes and r.single_block_violations == 0
        for out in r.outputs:
            assert A.offending_blocks(out) == [r.j]
    assert witness.outputs_disjoint(reps)


def _claim4_naive(pts, Ij, j, k, A):
    """Direct enumeration of (A'' + kB'_j) minus A, no fibering."""
    moves = [gfset.basis_vector(A.m, i, j) for i in Ij]
    cur = set(pts)
    for _ in range(k):
        cur = {v ^ e for v in cur for e in moves}
    return {v for v in cur if not A.contains(v)}


def test_claim4_partial_index_set_shifts_fiber_window():
    A = toy(12, 1)
    I = {3: range(11)}
    fam = witness.BasisFamily.from_mapping(12, I)
    pts = random_product_points(A, 60, np.random.default_rng(2))
    rep = witness.claim4_verify(pts, fam, 3, 1, A)
    assert rep.outside == len(_claim4_naive(pts, range(11), 3, 1, A))
    assert rep.passes
    assert len(rep.fibers) > 1


def test_claim4_width_three():
    m, j = 92, 5
    A = toy(m, 3)
    I = [i for i in range(m) if i != 40]
    fam = witness.BasisFamily.from_mapping(m, {j: I})
    pts = random_product_points(A, 3, np.random.default_rng(0))
    rep = witness.claim4_verify(pts, fam, j, 3, A)
    assert rep.passes and rep.single_block_violations == 0
    # oracle: add every element of 3B'_j directly; only block j moves
    moves = [0] + [sum(gfset.basis_vector(m, i, j) for i in c)
                   for w in (1, 3) for c in combinations(I, w)]
    lo, hi = A.params.ell, A.params.top
    out = {a ^ x for a in pts for x in moves}
    out = {v for v in out if not lo <= ((v >> (j * m)) & ((1 << m) - 1)).bit_count() <= hi}
    assert rep.outside == len(out) == len(set(rep.outputs))


def test_claim4_errors():
    A = toy(11, 1)
    fam = witness.BasisFamily.from_mapping(11, {0: range(11), 1: range(5)})
    v = gfset.pack_blocks(11, [0b11111] * 11)
    with pytest.raises(witness.NotGoodError):
        witness.claim4_verify([v], fam, 1, 1, A)
    with pytest.raises(ValueError, match="not in A"):
        witness.claim4_verify([v ^ 1], fam, 0, 1, A)


def test_bound_diag_examples():
    m, k = 12, 1
    col = witness.bprime_bound_diagnostic(witness.BasisFamily.column(m), 2, k)
    assert (col.size, col.n_good, col.bound) == (m, 1, 10 * m + m)
    full = witness.bprime_bound_diagnostic(witness.BasisFamily.full(m), 2, k)
    assert (full.size, full.n_good, full.bound) == (m * m, m, 10 * m + m * m)
    assert full.good_ceiling == 16
    empty = witness.bprime_bound_diagnostic(witness.BasisFamily(m, (frozenset(),) * m), 2, k)
    assert (empty.size, empty.n_good) == (0, 0)


def test_full_basis_breaks_good_ceiling_for_large_m():
    m, k = 100, 1
    full = witness.bprime_bound_diagnostic(witness.BasisFamily.full(m), Fraction(3, 2), k)
    assert full.good_ceiling == 8 * Fraction(3, 2)
    assert not full.good_within_ceiling and not full.within_sqrt_bound


def test_extremal_families_have_size_m():
    m = 9
    assert witness.BasisFamily.column(m).size == m == witness.BasisFamily.row(m).size


def test_family_file_roundtrip():
    fam = witness.BasisFamily.from_mapping(6, {0: [1, 2], 4: [0, 5]})
    buf = io.StringIO()
    fam.dump(buf)
    assert buf.getvalue() == "0: 1,2\n4: 0,5\n"
    assert witness.read_family(io.StringIO(buf.getvalue()), 6) == fam
    with pytest.raises(ValueError):
        witness.read_family(io.StringIO("0: 9\n"), 6)
    with pytest.raises(ValueError):
        witness.read_family(io.StringIO("nonsense\n"), 6)


def test_families_need_square_instance():
    A = C.build(m=4, k=3, unchecked=True, r=3)[0]
    with pytest.raises(ValueError, match="r = m"):
        witness.column_family_growth(A)
