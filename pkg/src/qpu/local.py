"""p-adic representability and genus representability.

A nonzero n is represented over Z_p iff n / p^(2m) is primitively
represented for some m.  A primitive y with Q(y) = n mod p^(2v+1), where v is
the p-adic order of the gradient 2 M y, lifts to an exact solution (Hensel).
For primitive y that order is at most v_max = ord_p(2) + ord_p(det M), so all
primitive solution classes are visible modulo p^k with k = 2 v_max + 1.  The
set of pairs (v, Q(y) mod p^(2v+1)) is computed once per (form, p).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .forms import AnyForm, DiagonalForm, GramForm, parse_form
from .sieve import build_sieve, represents

BRUTE_FORCE_LIMIT = 5 * 10**7


def ord_p(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("ord of zero")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _array_ord(a: np.ndarray, p: int, cap: int) -> np.ndarray:
    out = np.zeros(a.shape, dtype=np.int64)
    cur = a.copy()
    for _ in range(cap):
        hit = (cur % p == 0) & (out < cap)
        if not hit.any():
            break
        out[hit] += 1
        cur[hit] //= p
    zero = a == 0
    out[zero] = cap
    return out


@dataclass(frozen=True)
class LocalTable:
    p: int
    v_max: int
    pairs: frozenset[tuple[int, int]]

    def primitive(self, n: int) -> bool:
        return any((v, n % self.p ** (2 * v + 1)) in self.pairs for v in range(self.v_max + 1))

    def represents(self, n: int) -> bool:
        if n == 0:
            return True
        sq = 1
        while n % sq == 0:
            if self.primitive(n // sq):
                return True
            sq *= self.p * self.p
        return False


def _depth(det: int, p: int) -> tuple[int, int]:
    v_max = ord_p(2, p) + ord_p(det, p)
    return v_max, 2 * v_max + 1


def _table_diagonal(coeffs: tuple[int, ...], p: int) -> LocalTable:
    det = 1
    for a in coeffs:
        det *= a
    v_max, k = _depth(det, p)
    pk = p**k
    ys = np.arange(pk, dtype=np.int64)
    # state[t, primitive, Q mod p^k]; t = min order of a_i y_i, capped at k
    state = np.zeros((k + 1, 2, pk), dtype=bool)
    state[k, 0, 0] = True
    for a in coeffs:
        contrib = (a * ys * ys) % pk
        t = _array_ord((a * ys) % pk, p, k)
        unit = (ys % p != 0).astype(np.int64)
        new = np.zeros_like(state)
        for c, tc, u in set(zip(contrib.tolist(), t.tolist(), unit.tolist())):
            shifted = np.roll(state, c, axis=2)
            for t_old in range(k + 1):
                tm = min(t_old, tc)
                if u:
                    new[tm, 1] |= shifted[t_old, 0] | shifted[t_old, 1]
                else:
                    new[tm, 0] |= shifted[t_old, 0]
                    new[tm, 1] |= shifted[t_old, 1]
        state = new
    two = ord_p(2, p)
    pairs = set()
    for t in range(k):
        for r in np.flatnonzero(state[t, 1]).tolist():
            v = two + t
            if v <= v_max:
                pairs.add((v, r % p ** (2 * v + 1)))
    return LocalTable(p, v_max, frozenset(pairs))


def _table_brute(entries: tuple[tuple[int, ...], ...], det: int, p: int) -> LocalTable:
    n = len(entries)
    v_max, k = _depth(det, p)
    pk = p**k
    if pk**n > BRUTE_FORCE_LIMIT:
        raise RuntimeError(f"local table for p={p} needs {pk}^{n} vectors; over the work limit")
    M = np.array(entries, dtype=np.int64)
    rest = np.array(list(itertools.product(range(pk), repeat=n - 1)), dtype=np.int64).reshape(-1, n - 1)
    two = ord_p(2, p)
    pairs = set()
    for y0 in range(pk):
        Y = np.hstack([np.full((rest.shape[0], 1), y0, dtype=np.int64), rest])
        prim = (Y % p != 0).any(axis=1)
        Y = Y[prim]
        W = (Y @ M.T) % pk
        t = _array_ord(W, p, k).min(axis=1)
        q = np.einsum("ij,ij->i", Y, W) % pk
        for tt, qq in set(zip(t.tolist(), q.tolist())):
            v = two + tt
            if v <= v_max:
                pairs.add((v, qq % p ** (2 * v + 1)))
    return LocalTable(p, v_max, frozenset(pairs))


@lru_cache(maxsize=512)
def local_table(form: AnyForm, p: int) -> LocalTable:
    if isinstance(form, DiagonalForm) or form.is_diagonal():
        return _table_diagonal(tuple(form.diagonal()), p)
    return _table_brute(form.entries, form.det, p)


def local_represents(form: AnyForm, n: int, p: int) -> bool:
    """Is n represented by the form over the p-adic integers?"""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return True
    return local_table(form, p).represents(n)


def prime_divisors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def locally_represents(form: AnyForm, n: int) -> bool:
    """Local representation at every prime dividing 2 det (enough for rank >= 3)."""
    return all(local_represents(form, n, p) for p in prime_divisors(2 * form.det))


# ---------------------------------------------------------------------------
# genus table


@dataclass(frozen=True)
class GenusData:
    representative: AnyForm
    mates: tuple[GramForm, ...]
    class_number: int
    note: str = ""

    def __post_init__(self):
        d = self.representative.det
        for m in self.mates:
            if m.det != d:
                raise ValueError(f"mate {m} has determinant {m.det}, expected {d}")
        if self.class_number != 1 + len(self.mates):
            raise ValueError("class number disagrees with the number of mates")

    @property
    def members(self) -> tuple[AnyForm, ...]:
        return (self.representative,) + self.mates

    @property
    def inferred(self) -> bool:
        return self.note.startswith("inferred")


def parse_genus_line(line: str) -> GenusData:
    rep, mates, cls, note = (part.strip() for part in line.split("|", 3))
    mate_forms = () if mates == "-" else tuple(parse_form(m).gram() for m in mates.split())
    return GenusData(parse_form(rep), mate_forms, int(cls), note)


@lru_cache(maxsize=1)
def load_genera() -> dict[DiagonalForm, GenusData]:
    text = resources.files("qpu").joinpath("data/genera.txt").read_text()
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            g = parse_genus_line(line)
            out[g.representative] = g
    return out


def genus_of(form: DiagonalForm) -> GenusData:
    try:
        return load_genera()[form]
    except KeyError:
        raise KeyError(f"no genus data recorded for {form!r}") from None


def genus_represents(g: GenusData, n: int) -> bool:
    if n == 0:
        return True
    return any(represents(m, n) for m in g.members)


def genus_sieve(g: GenusData, bound: int) -> np.ndarray:
    out = np.zeros(bound + 1, dtype=bool)
    for m in g.members:
        out |= build_sieve(m, bound).bits
    return out
