"""Sets in (F_2^m)^m that are statistically but not combinatorially closed under the basis."""

from .construction import build, closure_probability_exact
from .gfset import DenseSet, SparseSet, iterated_sumset, layer, sparse_sumset, sumset
from .layers import BandSpec, band_size, binomial, growth_ratio

__all__ = [
    "BandSpec",
    "DenseSet",
    "SparseSet",
    "band_size",
    "binomial",
    "build",
    "closure_probability_exact",
    "growth_ratio",
    "iterated_sumset",
    "layer",
    "sparse_sumset",
    "sumset",
]
