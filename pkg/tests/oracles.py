"""Independent brute-force checks, deliberately sharing no code paths with the package."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def generator_matrix(q):
    """Columns (1, e_1), ..., (1, e_d), (1, -q), height first."""
    d = len(q)
    cols = []
    for i in range(d):
        c = [1] + [0] * d
        c[i + 1] = 1
        cols.append(c)
    cols.append([1] + [-v for v in q])
    return [[cols[j][i] for j in range(d + 1)] for i in range(d + 1)]


def fraction_inverse(m):
    """Gauss-Jordan inverse over the rationals."""
    n = len(m)
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def weights_of(q, w):
    inv = fraction_inverse(generator_matrix(q))
    return [sum(inv[i][j] * w[j] for j in range(len(w))) for i in range(len(w))]


def _integer_inverse(q):
    inv = fraction_inverse(generator_matrix(q))
    den = 1
    for row in inv:
        for v in row:
            den = den * v.denominator // np.gcd(den, v.denominator)
    adj = np.array([[int(v * den) for v in row] for row in inv], dtype=np.int64)
    return adj, den


def box_points(q, lows, highs):
    ranges = [np.arange(lo, hi + 1) for lo, hi in zip(lows, highs)]
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).astype(np.int64)


def brute_force_fpp(q):
    """Integer points with all generator weights in [0, 1), found by scanning a bounding box."""
    m = np.array(generator_matrix(q), dtype=np.int64)
    d1 = len(q) + 1
    corners = np.array(
        [m @ np.array(s) for s in itertools.product((0, 1), repeat=d1)], dtype=np.int64
    )
    pts = box_points(q, corners.min(axis=0), corners.max(axis=0))
    adj, den = _integer_inverse(q)
    nums = pts @ adj.T
    keep = np.all((nums >= 0) & (nums < den), axis=1)
    return {tuple(int(v) for v in z) for z in pts[keep]}


def in_monoid(q, w) -> bool:
    return all(g >= 0 for g in weights_of(q, w))


def brute_force_decomposable(q, z) -> bool:
    """Does z split as u + (z - u) with both parts non-zero cone lattice points?

    Scans every integer u in the box spanned by the generator multiples that
    make up z; no use of the parallelepiped structure.
    """
    gam = weights_of(q, z)
    m = np.array(generator_matrix(q), dtype=object)
    d1 = len(z)
    scaled = [[m[i][j] * gam[j] for j in range(d1)] for i in range(d1)]
    lows = [int(np.floor(sum(min(0, v) for v in row))) for row in scaled]
    highs = [int(np.ceil(sum(max(0, v) for v in row))) for row in scaled]
    adj, den = _integer_inverse(q)
    pts = box_points(q, lows, highs)
    zz = np.array(z, dtype=np.int64)
    nz = (pts != 0).any(axis=1) & (pts != zz).any(axis=1)
    u_ok = np.all(pts @ adj.T >= 0, axis=1)
    v_ok = np.all((zz - pts) @ adj.T >= 0, axis=1)
    return bool(np.any(nz & u_ok & v_ok))


def relevant_count(d):
    return sum(1 for a in itertools.product(range(d + 1), repeat=d + 1) if sum(a) > d + 1)


def finite_difference_grad(loss_fn, arrays, h=1e-5):
    """Central differences of ``loss_fn()`` w.r.t. every entry of the given arrays (mutated in place)."""
    out = []
    for a in arrays:
        g = np.zeros_like(a)
        it = np.nditer(a, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = a[idx]
            a[idx] = old + h
            fp = loss_fn()
            a[idx] = old - h
            fm = loss_fn()
            a[idx] = old
            g[idx] = (fp - fm) / (2 * h)
        out.append(g)
    return out
