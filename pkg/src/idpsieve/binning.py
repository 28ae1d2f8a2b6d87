"""Bins of the fundamental parallelepiped and the sparse HIB labeling."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .simplex import RationalWeights, as_qvector


def bin_of(w: RationalWeights, d: int) -> tuple[int, ...]:
    return tuple((d + 1) * n // w.denominator for n in w.numerators)


def bins_of(nums: np.ndarray, n: int, d: int) -> np.ndarray:
    """Vectorised :func:`bin_of` over rows of weight numerators."""
    return ((d + 1) * np.asarray(nums, dtype=np.int64)) // n


def height_from_bin(alpha) -> int:
    d = len(alpha) - 1
    return -(-sum(alpha) // (d + 1))


def lex_rank(alpha) -> int:
    """Position of ``alpha`` in the lex-ordered cube {0..d}^(d+1)."""
    base = len(alpha)
    rank = 0
    for a in alpha:
        if not 0 <= a < base:
            raise ValueError(f"bin index entry {a} outside [0, {base - 1}]")
        rank = rank * base + int(a)
    return rank


def lex_ranks(alphas: np.ndarray) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=np.int64)
    base = alphas.shape[-1]
    powers = base ** np.arange(base - 1, -1, -1, dtype=np.int64)
    return alphas @ powers


def lex_unrank(rank: int, d: int) -> tuple[int, ...]:
    base = d + 1
    if not 0 <= rank < base**base:
        raise ValueError(f"rank {rank} outside [0, {base**base})")
    out = []
    for _ in range(base):
        rank, a = divmod(rank, base)
        out.append(a)
    return tuple(reversed(out))


@dataclass(frozen=True)
class RelevantSet:
    """All bin indices with coordinate sum > d+1, in lex order."""

    d: int
    indices: tuple[tuple[int, ...], ...]
    cube_ranks: np.ndarray = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.indices)

    def rank(self, alpha) -> int | None:
        """Position of ``alpha`` within the relevant set, or None if not relevant."""
        r = lex_rank(alpha)
        pos = int(np.searchsorted(self.cube_ranks, r))
        if pos < len(self.cube_ranks) and self.cube_ranks[pos] == r:
            return pos
        return None

    def positions(self, alphas: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`rank`; -1 marks irrelevant bins."""
        r = lex_ranks(alphas)
        if len(self.cube_ranks) == 0:
            return np.full(len(r), -1, dtype=np.int64)
        pos = np.searchsorted(self.cube_ranks, r)
        hit = self.cube_ranks[np.minimum(pos, len(self.cube_ranks) - 1)] == r
        return np.where(hit, pos, -1)


@lru_cache(maxsize=None)
def relevant_set(d: int) -> RelevantSet:
    if d < 1:
        raise ValueError("dimension must be at least 1")
    indices = tuple(
        alpha for alpha in itertools.product(range(d + 1), repeat=d + 1) if sum(alpha) > d + 1
    )
    ranks = np.array([lex_rank(a) for a in indices], dtype=np.int64)
    return RelevantSet(d, indices, ranks)


@dataclass(frozen=True)
class HibVector:
    relevant: RelevantSet = field(repr=False)
    positives: tuple[int, ...]

    def dense(self) -> np.ndarray:
        out = np.zeros(len(self.relevant), dtype=np.int8)
        out[list(self.positives)] = 1
        return out


def hib(q) -> HibVector:
    """Relevant bins that contain at least one Hilbert basis element."""
    from .hilbert import extra_numerators

    q = as_qvector(q)
    rel = relevant_set(q.d)
    nums = extra_numerators(q)
    if len(nums) == 0:
        return HibVector(rel, ())
    pos = rel.positions(bins_of(nums, q.N, q.d))
    return HibVector(rel, tuple(int(r) for r in np.unique(pos[pos >= 0])))


def supp_tolerant(positives_count: int, tau: int) -> int:
    return int(positives_count <= tau)


def format_ranks(ranks) -> str:
    return ",".join(str(int(r)) for r in ranks)


def parse_ranks(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    ranks = tuple(int(tok) for tok in text.split(","))
    if any(b <= a for a, b in zip(ranks, ranks[1:])):
        raise ValueError(f"ranks must be strictly ascending: {text!r}")
    return ranks
