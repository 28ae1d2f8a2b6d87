"""Exact and learned tests of the integer decomposition property for Delta_(1,q) simplices."""

from .binning import HibVector, RelevantSet, bin_of, height_from_bin, hib, relevant_set
from .hilbert import HilbertBasis, hilbert_basis, is_idp, is_idp_bins
from .simplex import QVector, build_generators, coords_in_cone, fpp_points, hstar, is_unimodal

__all__ = [
    "HibVector",
    "HilbertBasis",
    "QVector",
    "RelevantSet",
    "bin_of",
    "build_generators",
    "coords_in_cone",
    "fpp_points",
    "height_from_bin",
    "hib",
    "hilbert_basis",
    "hstar",
    "is_idp",
    "is_idp_bins",
    "is_unimodal",
    "relevant_set",
]
