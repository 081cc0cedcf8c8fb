"""Exact enumeration of lattice points in the ellipsoid x M x^t <= B.

Every coordinate range is derived from integer Schur complements scaled by
the leading principal minors, so no floating point is involved anywhere.
The innermost coordinate is handled with numpy for speed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterator, Sequence

import numpy as np

from .forms import bareiss_det

Matrix = tuple[tuple[int, ...], ...]


@lru_cache(maxsize=256)
def scaled_schur(entries: Matrix) -> tuple[tuple[int, Matrix], ...]:
    """For each level i, return (D_i, D_i * S_i) where S_i is the Schur
    complement of the leading i x i block and D_i its determinant."""
    n = len(entries)
    out = []
    for i in range(n):
        if i == 0:
            out.append((1, entries))
            continue
        d = bareiss_det([r[:i] for r in entries[:i]])
        a = [[Fraction(v) for v in r[:i]] for r in entries[:i]]
        inv = _inverse(a)
        rows = []
        for r in range(i, n):
            row = []
            for c in range(i, n):
                s = Fraction(entries[r][c])
                for p in range(i):
                    for q in range(i):
                        s -= entries[r][p] * inv[p][q] * entries[q][c]
                v = s * d
                assert v.denominator == 1
                row.append(int(v))
            rows.append(tuple(row))
        out.append((d, tuple(rows)))
    return tuple(out)


def _inverse(a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _quad_range(a: int, b: int, c: int, limit: int) -> tuple[int, int] | None:
    """Superset [lo, hi] of the integers x with a x^2 + 2 b x + c <= limit."""
    disc = b * b - a * (c - limit)
    if disc < 0:
        return None
    s = isqrt(disc)
    lo = (-b - s - 1) // a
    hi = -((b - s - 1) // a)
    return lo, hi


def iter_short_vectors(
    entries: Matrix, bound: int
) -> Iterator[tuple[tuple[int, ...], np.ndarray, np.ndarray]]:
    """Yield (tail, x0, values) for every tail (x1,...,x_{n-1}) that admits
    some x0 with value <= bound; x0 and values are int64 arrays, exact."""
    n = len(entries)
    levels = scaled_schur(entries)

    def rec(i: int, tail: tuple[int, ...]):
        d, w = levels[i]
        limit = d * bound
        # w is indexed over coordinates i..n-1; tail holds x_{i+1}..x_{n-1}
        a = w[0][0]
        b = sum(w[0][j + 1] * tail[j] for j in range(len(tail)))
        c = sum(w[p + 1][q + 1] * tail[p] * tail[q] for p in range(len(tail)) for q in range(len(tail)))
        rng = _quad_range(a, b, c, limit)
        if rng is None:
            return
        lo, hi = rng
        if i == 0:
            xs = np.arange(lo, hi + 1, dtype=np.int64)
            vals = a * xs * xs + 2 * b * xs + c
            keep = vals <= bound
            if keep.any():
                yield tail, xs[keep], vals[keep]
            return
        for x in range(lo, hi + 1):
            if a * x * x + 2 * b * x + c <= limit:
                yield from rec(i - 1, (x,) + tail)

    yield from rec(n - 1, ())


def short_vector_values(entries: Matrix, bound: int) -> np.ndarray:
    """Boolean array over [0, bound] marking every value x M x^t <= bound."""
    marks = np.zeros(bound + 1, dtype=bool)
    for _tail, _xs, vals in iter_short_vectors(entries, bound):
        marks[vals] = True
    return marks


def vectors_of_norm(entries: Matrix, value: int) -> list[tuple[int, ...]]:
    """All integer vectors x with x M x^t == value, in lexicographic order."""
    found = []
    for tail, xs, vals in iter_short_vectors(entries, value):
        for x0 in xs[vals == value].tolist():
            found.append((int(x0),) + tail)
    found.sort()
    return found


def first_vector_of_norm(entries: Matrix, value: int) -> tuple[int, ...] | None:
    for tail, xs, vals in iter_short_vectors(entries, value):
        hit = np.flatnonzero(vals == value)
        if hit.size:
            return (int(xs[hit[0]]),) + tail
    return None


def box_bounds(entries: Sequence[Sequence[int]], value: int) -> list[int]:
    """Per-coordinate bounds |x_i| <= isqrt(value * adj_ii // det)."""
    n = len(entries)
    det = bareiss_det(entries)
    out = []
    for i in range(n):
        minor = [[entries[r][c] for c in range(n) if c != i] for r in range(n) if r != i]
        adj = bareiss_det(minor) if minor else 1
        out.append(isqrt(value * adj // det))
    return out
