"""Hilbert bases of Delta_(1,q) cones and the two exact IDP tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binning import bins_of
from .simplex import (
    FppPoint,
    QVector,
    as_qvector,
    build_generators,
    fpp_numerators,
    fpp_points,
)


@dataclass(frozen=True)
class HilbertBasis:
    generators: tuple[tuple[int, ...], ...]
    extras: tuple[FppPoint, ...]

    def elements(self) -> list[tuple[int, ...]]:
        return list(self.generators) + [z.coords for z in self.extras]


def irreducible_mask(nums: np.ndarray, n: int) -> np.ndarray:
    """Flag rows that are not reducible by another row or by a generator.

    Rows are weight numerators (over ``n``) of non-zero cone points. Since
    weights are linear, ``z - c`` lies in the cone exactly when the weights of
    ``z`` dominate those of ``c`` coordinate-wise; integrality of ``z - c`` is
    automatic. Generator ``i`` has weight ``n`` in slot ``i`` and 0 elsewhere.
    """
    nums = np.asarray(nums, dtype=np.int64)
    m = len(nums)
    if m == 0:
        return np.zeros(0, dtype=bool)
    by_generator = (nums >= n).any(axis=1)
    reducible = by_generator.copy()
    # chunk over z to keep the (chunk, m, d+1) comparison small
    chunk = max(1, 4_000_000 // (m * nums.shape[1]))
    for start in range(0, m, chunk):
        block = nums[start : start + chunk]
        dominates = (block[:, None, :] >= nums[None, :, :]).all(axis=2)
        # c == z leaves the origin, which is not a reduction
        dominates &= ~(block[:, None, :] == nums[None, :, :]).all(axis=2)
        reducible[start : start + len(block)] |= dominates.any(axis=1)
    return ~reducible


def extra_numerators(q) -> np.ndarray:
    """Weight numerators of the non-generator Hilbert basis elements, ordered by (height, b)."""
    q = as_qvector(q)
    nums = fpp_numerators(q)[1:]
    keep = nums[irreducible_mask(nums, q.N)]
    heights = keep.sum(axis=1) // q.N
    order = np.lexsort((keep[:, -1], heights))
    return keep[order]


def hilbert_basis(q) -> HilbertBasis:
    q = as_qvector(q)
    points = fpp_points(q)
    b_values = extra_numerators(q)[:, -1]
    extras = tuple(points[int(b)] for b in b_values)
    return HilbertBasis(build_generators(q).generators, extras)


def reduce_candidates(q: QVector, candidates: list[FppPoint]) -> HilbertBasis:
    """Reduce a subset of parallelepiped points together with the generators."""
    q = as_qvector(q)
    cand = [z for z in candidates if any(z.weights.numerators)]
    if cand:
        nums = np.array([z.weights.numerators for z in cand], dtype=np.int64)
        mask = irreducible_mask(nums, q.N)
        kept = [z for z, keep in zip(cand, mask) if keep]
    else:
        kept = []
    kept.sort(key=lambda z: (z.height, z.b))
    return HilbertBasis(build_generators(q).generators, tuple(kept))


def is_idp(q) -> bool:
    """True iff every Hilbert basis element has height 1."""
    q = as_qvector(q)
    nums = extra_numerators(q)
    # generators are always at height 1
    return bool(np.all(nums.sum(axis=1) == q.N))


def is_idp_bins(q) -> bool:
    """True iff every Hilbert basis element sits in a bin with index sum <= d+1."""
    q = as_qvector(q)
    nums = extra_numerators(q)
    return bool(np.all(bins_of(nums, q.N, q.d).sum(axis=1) <= q.d + 1))
