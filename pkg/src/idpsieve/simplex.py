"""Exact arithmetic for Delta_(1,q) simplices and their fundamental parallelepipeds.

Points of ``cone(Delta)`` are stored height first: ``(h, x_1, ..., x_d)``.
Generator weights are kept as integer numerators over the normalized
volume ``N = 1 + sum(q)``; nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

# b * q_j < N * N must fit in a signed 64-bit integer for the vectorised paths.
_INT64_LIMIT = 2**63


@dataclass(frozen=True)
class QVector:
    """The tuple ``q`` defining the simplex conv(e_1, ..., e_d, -sum q_i e_i)."""

    q: tuple[int, ...]

    def __post_init__(self):
        q = tuple(int(v) for v in self.q)
        if not q:
            raise ValueError("q-vector must have at least one entry")
        if any(v < 0 for v in q):
            raise ValueError(f"q-vector entries must be non-negative, got {q}")
        object.__setattr__(self, "q", q)
        n = 1 + sum(q)
        if n * n >= _INT64_LIMIT:
            raise OverflowError(f"normalized volume {n} too large: N^2 overflows int64")

    @classmethod
    def parse(cls, text: str) -> "QVector":
        """Parse the comma-separated text form, e.g. ``"4,10,14,14"``."""
        try:
            values = tuple(int(tok) for tok in text.strip().split(","))
        except ValueError:
            raise ValueError(f"cannot parse q-vector {text!r}") from None
        return cls(values)

    @property
    def d(self) -> int:
        return len(self.q)

    @property
    def N(self) -> int:
        return 1 + sum(self.q)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.q)


def as_qvector(q) -> QVector:
    if isinstance(q, QVector):
        return q
    if isinstance(q, str):
        return QVector.parse(q)
    return QVector(tuple(q))


@dataclass(frozen=True)
class ConeBasis:
    d: int
    generators: tuple[tuple[int, ...], ...]

    def matrix(self) -> np.ndarray:
        """Generators as the columns of a (d+1) x (d+1) integer matrix."""
        return np.array(self.generators, dtype=np.int64).T


@dataclass(frozen=True)
class RationalWeights:
    """Generator coefficients ``numerators[i] / denominator``."""

    numerators: tuple[int, ...]
    denominator: int

    @property
    def gammas(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.denominator) for n in self.numerators)

    def in_fpp_range(self) -> bool:
        return all(0 <= n < self.denominator for n in self.numerators)


@dataclass(frozen=True)
class FppPoint:
    coords: tuple[int, ...]
    weights: RationalWeights
    b: int

    @property
    def height(self) -> int:
        return self.coords[0]

    @property
    def spatial(self) -> tuple[int, ...]:
        return self.coords[1:]


def build_generators(q) -> ConeBasis:
    """Return (1, e_1), ..., (1, e_d), (1, -q) with the height coordinate first."""
    q = as_qvector(q)
    d = q.d
    gens = []
    for i in range(d):
        g = [1] + [0] * d
        g[i + 1] = 1
        gens.append(tuple(g))
    gens.append((1,) + tuple(-v for v in q.q))
    return ConeBasis(d, tuple(gens))


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def fpp_numerators(q) -> np.ndarray:
    """Weight numerators of every point of the fundamental parallelepiped.

    Row ``b`` holds ``(b*q_1 mod N, ..., b*q_d mod N, b)``; shape ``(N, d+1)``.
    """
    q = as_qvector(q)
    n = q.N
    b = np.arange(n, dtype=np.int64)[:, None]
    qs = np.array(q.q, dtype=np.int64)[None, :]
    return np.hstack([(b * qs) % n, b])


def points_from_numerators(q, nums: np.ndarray) -> np.ndarray:
    """Map weight numerators (rows) to integer points, height first."""
    q = as_qvector(q)
    n = q.N
    nums = np.asarray(nums, dtype=np.int64)
    last = nums[:, -1:]
    qs = np.array(q.q, dtype=np.int64)[None, :]
    spatial_scaled = nums[:, :-1] - qs * last
    height_scaled = nums.sum(axis=1, keepdims=True)
    scaled = np.hstack([height_scaled, spatial_scaled])
    if np.any(scaled % n):
        raise ArithmeticError("weights do not describe a lattice point")
    return scaled // n


def fpp_points(q) -> list[FppPoint]:
    """All N lattice points of the half-open fundamental parallelepiped, by b."""
    q = as_qvector(q)
    nums = fpp_numerators(q)
    coords = points_from_numerators(q, nums)
    return [
        FppPoint(tuple(int(c) for c in z), RationalWeights(tuple(int(v) for v in w), q.N), b)
        for b, (z, w) in enumerate(zip(coords, nums))
    ]


def cone_numerators(w: Sequence[int], q) -> tuple[int, ...]:
    """Numerators over N of the unique generator coefficients of ``w``.

    Uses the closed-form inverse of the generator matrix:
    ``gamma_{d+1} = (h - sum x) / N`` and ``gamma_j = x_j + q_j * gamma_{d+1}``.
    """
    q = as_qvector(q)
    if len(w) != q.d + 1:
        raise ValueError(f"expected a vector of length {q.d + 1}, got {len(w)}")
    h, xs = int(w[0]), [int(v) for v in w[1:]]
    last = h - sum(xs)
    return tuple(x * q.N + qj * last for x, qj in zip(xs, q.q)) + (last,)


def coords_in_cone(w: Sequence[int], q) -> RationalWeights | None:
    """Exact weights of ``w`` in terms of the generators, or None if outside the cone."""
    q = as_qvector(q)
    nums = cone_numerators(w, q)
    if min(nums) < 0:
        return None
    return RationalWeights(nums, q.N)


def height(z) -> int:
    if isinstance(z, FppPoint):
        return z.coords[0]
    return int(z[0])


def hstar(q) -> list[int]:
    """Number of parallelepiped points at each height 0..d."""
    q = as_qvector(q)
    heights = fpp_numerators(q).sum(axis=1) // q.N
    return np.bincount(heights, minlength=q.d + 1).tolist()


def is_unimodal(v: Iterable[int]) -> bool:
    v = list(v)
    i = 1
    while i < len(v) and v[i - 1] <= v[i]:
        i += 1
    while i < len(v) and v[i - 1] >= v[i]:
        i += 1
    return i >= len(v)
