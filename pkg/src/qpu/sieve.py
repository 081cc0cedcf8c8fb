"""Representation testing: single queries, bulk sieves of Q(f) and excluded families."""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field
from math import gcd, isqrt
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .forms import AnyForm, DiagonalForm, FormValue, GramForm, MalformedFormError
from .lattice import first_vector_of_norm, iter_short_vectors

MAGIC = b"QPUSIEVE"
DEFAULT_BOUND = 10**6
DEFAULT_CAPACITY = 5 * 10**7
# bound allowed for enumerating a coupled block of dimension >= 3
COUPLED_CAPACITY = 2 * 10**6


class SieveCapacityError(RuntimeError):
    pass


class SieveFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# single queries


def _diagonal_witness(coeffs: Sequence[int], n: int) -> tuple[int, ...] | None:
    order = sorted(range(len(coeffs)), key=lambda i: -coeffs[i])
    cs = [coeffs[i] for i in order]
    last = len(cs) - 1
    xs = [0] * len(cs)

    def rec(i: int, rem: int) -> bool:
        a = cs[i]
        if i == last:
            if rem % a:
                return False
            q = rem // a
            r = isqrt(q)
            if r * r != q:
                return False
            xs[i] = r
            return True
        for x in range(isqrt(rem // a), -1, -1):
            xs[i] = x
            if rec(i + 1, rem - a * x * x):
                return True
        return False

    if not rec(0, n):
        return None
    out = [0] * len(cs)
    for pos, i in enumerate(order):
        out[i] = xs[pos]
    return tuple(out)


def represents_direct(form: AnyForm, n: int) -> FormValue | None:
    """Find x with x M x^t == n by exhaustive search over the ellipsoid."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(form, DiagonalForm) or form.is_diagonal():
        w = _diagonal_witness(form.diagonal(), n)
    else:
        w = first_vector_of_norm(form.entries, n)
    return None if w is None else FormValue(n, w)


def represents(form: AnyForm, n: int) -> bool:
    return represents_direct(form, n) is not None


# ---------------------------------------------------------------------------
# bit sets stored in python ints (shift-or is fast on big ints)


def layer_coefficient(bits: int, a: int, bound: int) -> int:
    """Sumset of the marked set with {a x^2 : x >= 0}, truncated to [0, bound]."""
    out = bits
    x = 1
    while a * x * x <= bound:
        out |= bits << (a * x * x)
        x += 1
    return out & ((1 << (bound + 1)) - 1)


def bits_to_array(bits: int, bound: int) -> np.ndarray:
    nbytes = (bound + 8) // 8
    raw = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: bound + 1].astype(bool)


def array_to_bits(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr.astype(bool), bitorder="little").tobytes(), "little")


def _coupled_indices(g: GramForm) -> list[int]:
    n = g.dim
    return [i for i in range(n) if any(g.entries[i][j] for j in range(n) if j != i)]


def sieve_bits(form: AnyForm, bound: int, capacity: int = DEFAULT_CAPACITY) -> int:
    if bound < 1:
        raise ValueError("bound must be positive")
    if bound > capacity:
        raise SieveCapacityError(f"bound {bound} exceeds sieve capacity {capacity}")
    if isinstance(form, DiagonalForm) or form.is_diagonal():
        coupled: list[int] = []
        diag = list(form.diagonal())
    else:
        coupled = _coupled_indices(form)
        diag = [form.entries[i][i] for i in range(form.dim) if i not in coupled]
    if coupled:
        if len(coupled) >= 3 and bound > COUPLED_CAPACITY:
            raise SieveCapacityError(
                f"bound {bound} too large for a coupled block of dimension {len(coupled)}"
            )
        block = tuple(tuple(form.entries[i][j] for j in coupled) for i in coupled)
        marks = np.zeros(bound + 1, dtype=bool)
        for _tail, _xs, vals in iter_short_vectors(block, bound):
            marks[vals] = True
        bits = array_to_bits(marks)
    else:
        bits = 1
    for a in sorted(diag):
        bits = layer_coefficient(bits, a, bound)
    return bits


@dataclass(frozen=True)
class RepresentationSieve:
    """Marks Q(form) on [0, bound]; bits[n] is True iff n is represented."""

    form: AnyForm | None
    bound: int
    bits: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        self.bits.setflags(write=False)

    def __contains__(self, n: int) -> bool:
        if n < 0 or n > self.bound:
            raise IndexError(f"{n} outside sieve range [0, {self.bound}]")
        return bool(self.bits[n])

    def represented(self, n: int) -> bool:
        return n in self

    def values(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def missing(self) -> np.ndarray:
        return np.flatnonzero(~self.bits)

    def to_bytes(self) -> bytes:
        return MAGIC + struct.pack("<Q", self.bound) + np.packbits(self.bits, bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, form: AnyForm | None = None) -> RepresentationSieve:
        if len(data) < 16 or data[:8] != MAGIC:
            raise SieveFormatError("missing QPUSIEVE header")
        (bound,) = struct.unpack("<Q", data[8:16])
        body = np.frombuffer(data[16:], dtype=np.uint8)
        if body.size != (bound + 8) // 8:
            raise SieveFormatError(f"payload has {body.size} bytes, expected {(bound + 8) // 8}")
        bits = np.unpackbits(body, bitorder="little")[: bound + 1].astype(bool)
        return cls(form, bound, bits)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path, form: AnyForm | None = None) -> RepresentationSieve:
        return cls.from_bytes(Path(path).read_bytes(), form)


def build_sieve(form: AnyForm, bound: int, capacity: int = DEFAULT_CAPACITY) -> RepresentationSieve:
    bits = sieve_bits(form, bound, capacity)
    return RepresentationSieve(form, bound, bits_to_array(bits, bound))


# ---------------------------------------------------------------------------
# excluded families c^s(m t + r)


@dataclass(frozen=True)
class ExcludedFamily:
    """The positive integers c^s (m t + r), s, t >= 0, r in residues.

    ``base=None`` fixes s = 0 (a plain residue class such as 8t+1).
    """

    base: int | None
    modulus: int
    residues: frozenset[int]

    def __post_init__(self):
        if self.base is not None and self.base < 2:
            raise ValueError("family base must be at least 2")
        if self.modulus < 1:
            raise ValueError("family modulus must be positive")
        object.__setattr__(self, "residues", frozenset(r % self.modulus for r in self.residues))

    def __contains__(self, n: int) -> bool:
        if n <= 0:
            return False
        while True:
            if n % self.modulus in self.residues:
                return True
            if self.base is None or n % self.base:
                return False
            n //= self.base

    def members(self, bound: int) -> list[int]:
        return family_members(self, bound)

    def mask(self, bound: int) -> np.ndarray:
        out = np.zeros(bound + 1, dtype=bool)
        scale = 1
        while scale <= bound:
            for r in self.residues:
                start = scale * r if r else scale * self.modulus
                out[start : bound + 1 : scale * self.modulus] = True
            if self.base is None:
                break
            scale *= self.base
        return out

    def meets_class(self, r: int, m: int) -> bool:
        """True iff some member is congruent to r modulo m."""
        seen = set()
        s_pow = 1 % m
        while s_pow not in seen:
            seen.add(s_pow)
            g = gcd(m, s_pow * self.modulus % m)
            if any((r - s_pow * res) % g == 0 for res in self.residues):
                return True
            if self.base is None:
                return False
            s_pow = s_pow * self.base % m
        return False

    def __str__(self) -> str:
        rs = sorted(self.residues)
        inner = f"{self.modulus}t+{rs[0]}" if len(rs) == 1 else f"{self.modulus}t+{{{','.join(map(str, rs))}}}"
        return inner if self.base is None else f"{self.base}^s({inner})"


_RESIDUES = r"(?:(\d+)|\{([\d,]+)\})"
_SCALED = re.compile(r"^(\d+)\^s\((\d+)t\+" + _RESIDUES + r"\)$")
_PLAIN = re.compile(r"^(\d+)t\+" + _RESIDUES + r"$")


def parse_family(text: str) -> ExcludedFamily:
    """Parse "4^s(16t+14)", "8t+1" or "25^s(50t+{20,30})"."""
    s = "".join(text.split())
    m = _SCALED.match(s)
    if m:
        base, mod, one, many = m.groups()
    else:
        m = _PLAIN.match(s)
        if m is None:
            raise MalformedFormError(f"cannot parse family {text!r}")
        base = None
        mod, one, many = m.groups()
    res = [int(one)] if one else [int(v) for v in many.split(",")]
    return ExcludedFamily(int(base) if base else None, int(mod), frozenset(res))


def family_members(fam: ExcludedFamily, bound: int) -> list[int]:
    if bound < 1:
        return []
    return np.flatnonzero(fam.mask(bound)).tolist()


@dataclass(frozen=True)
class Congruence:
    """n mod modulus lies in residues."""

    modulus: int
    residues: frozenset[int]

    def __call__(self, n: int) -> bool:
        return n % self.modulus in self.residues

    def mask(self, bound: int) -> np.ndarray:
        return np.isin(np.arange(bound + 1) % self.modulus, sorted(self.residues))


EVEN = Congruence(2, frozenset({0}))


@dataclass
class ExclusionReport:
    form: str
    families: list[str]
    bound: int
    mismatches: list[int]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_excluded(
    form: AnyForm,
    families: Iterable[ExcludedFamily],
    constraint: Congruence | None,
    bound: int,
    domain: Congruence | None = None,
    sieve: RepresentationSieve | None = None,
) -> ExclusionReport:
    """Compare Q(form) on [0, bound] with "satisfies constraint and avoids
    every family".  ``domain`` restricts which n are compared at all."""
    families = list(families)
    sv = sieve if sieve is not None and sieve.bound >= bound else build_sieve(form, bound)
    predicted = np.ones(bound + 1, dtype=bool)
    if constraint is not None:
        predicted &= constraint.mask(bound)
    for fam in families:
        predicted &= ~fam.mask(bound)
    diff = predicted ^ sv.bits[: bound + 1]
    if domain is not None:
        diff &= domain.mask(bound)
    return ExclusionReport(str(form), [str(f) for f in families], bound, np.flatnonzero(diff).tolist())
