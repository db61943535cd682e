from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from bandgrowth import gfset
from bandgrowth.gfset import DenseSet
from bandgrowth.plunnecke import BudgetError, HypothesisError, petridis_minimize, ruzsa_variant_verify
from bandgrowth.verify import random_small_instance
from oracles import min_ratio_subset, naive_iterated, naive_sumset


def test_petridis_tie_prefers_larger():
    Ap = DenseSet.from_indices(2, [0b00, 0b01])
    Bp = DenseSet.from_indices(2, [0b00, 0b10])
    res = petridis_minimize(Ap, Bp)
    assert res.X == Ap and res.K0 == 2


def test_petridis_identity_translate():
    Ap = DenseSet.from_indices(6, [3, 9, 17, 40])
    res = petridis_minimize(Ap, DenseSet.from_indices(6, [0]))
    assert res.X == Ap and res.K0 == 1
    assert res.iterated_ratios == [1, 1, 1, 1]


def test_petridis_tie_lexicographic():
    # {1} and {2} both give ratio 2 and size 1; nothing larger does better
    Ap = DenseSet.from_indices(4, [1, 2])
    Bp = DenseSet.from_indices(4, [0, 12])
    res = petridis_minimize(Ap, Bp)
    assert res.K0 == 2 and sorted(res.X) == [1, 2]
    Bp2 = DenseSet.from_indices(4, [0, 3])  # 1+3 = 2: pair is closed-ish
    res2 = petridis_minimize(Ap, Bp2)
    assert res2.K0 == Fraction(len(naive_sumset([1, 2], [0, 3])), 2)


@pytest.mark.parametrize("seed", range(25))
def test_petridis_minimum_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    Ap, Bp = random_small_instance(rng, max_a=9, max_b=5, max_d=8)
    res = petridis_minimize(Ap, Bp, k_max=4)
    assert res.K0 == min_ratio_subset(list(Ap), list(Bp))
    assert res.X.issubset(Ap)
    assert res.K0 <= Fraction(len(gfset.sumset(Ap, Bp)), len(Ap))
    for t, size in enumerate(res.sizes, 1):
        assert size == len(naive_sumset(list(res.X), naive_iterated(set(Bp), t)))
        assert size <= res.K0**t * len(res.X)


def test_petridis_random_d8_size10():
    rng = np.random.default_rng(77)
    for _ in range(10):
        Ap = DenseSet.from_indices(8, rng.choice(256, 10, replace=False))
        Bp = DenseSet.from_indices(8, rng.choice(256, 4, replace=False))
        assert not petridis_minimize(Ap, Bp).violations()


def test_petridis_budget():
    Ap = DenseSet.from_indices(6, range(21))
    with pytest.raises(BudgetError):
        petridis_minimize(Ap, DenseSet.from_indices(6, [0]))


def test_ruzsa_identity_gives_whole_set():
    Ap = DenseSet.from_indices(5, [1, 6, 7, 20])
    res = ruzsa_variant_verify(Ap, DenseSet.from_indices(5, [0]), 1, 3)
    assert res.found and res.status == "witness"
    assert len(res.subset) == 2  # smallest admissible size comes first


def test_ruzsa_band_subset_three_basis():
    D = 6
    band = gfset.band_mask(D, 2, 3)
    Bp = DenseSet.from_indices(D, [1, 2, 4])
    Ap_small = DenseSet.from_indices(D, list(band)[:12])
    K = Fraction(len(gfset.sumset(Ap_small, Bp)), len(Ap_small))
    res = ruzsa_variant_verify(Ap_small, Bp, K, 2)
    assert res.found
    assert 2 * len(res.subset) >= len(Ap_small)
    assert res.sumset_size == len(naive_sumset(list(res.subset), naive_iterated({1, 2, 4}, 2)))
    assert res.sumset_size <= res.coefficient * len(res.subset)


def test_ruzsa_large_k_first_candidate():
    Ap = DenseSet.from_indices(7, [5, 9, 33, 70, 101])
    Bp = DenseSet.from_indices(7, [0, 1, 64, 127])
    K = Fraction(len(gfset.sumset(Ap, Bp)), len(Ap)) * 10
    res = ruzsa_variant_verify(Ap, Bp, K, 2)
    assert res.found and res.searched == 1
    assert sorted(res.subset) == [5, 9, 33]


def test_ruzsa_hypothesis_checked():
    Ap = DenseSet.from_indices(5, [0, 1])
    Bp = DenseSet.from_indices(5, [0, 2, 4, 8])
    with pytest.raises(HypothesisError):
        ruzsa_variant_verify(Ap, Bp, Fraction(3, 2), 2)


def test_ruzsa_search_order_is_size_then_lex():
    Ap = DenseSet.from_indices(5, [1, 2, 3, 4])
    Bp = DenseSet.from_indices(5, [0, 16])
    res = ruzsa_variant_verify(Ap, Bp, 2, 1)
    expected = next(c for s in range(2, 5) for c in combinations([1, 2, 3, 4], s)
                    if len(naive_sumset(c, [0, 16])) <= 4 * 2 * s)
    assert tuple(sorted(res.subset)) == expected
