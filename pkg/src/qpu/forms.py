"""Diagonal and Gram-matrix quadratic forms.

A diagonal form <a1,...,an> is stored with its coefficients sorted, so two
forms compare equal exactly when they are the same multiset.  A GramForm
holds the full symmetric matrix M, and the value of a vector x is x M x^t.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence, Union

MAX_RANK = 8


class FormError(ValueError):
    """Base class for malformed or illegal form input."""


class MalformedFormError(FormError):
    pass


class NonPositiveCoefficientError(FormError):
    pass


class AsymmetricMatrixError(FormError):
    pass


class NotPositiveDefiniteError(FormError):
    pass


class RankError(FormError):
    pass


class DimensionMismatchError(FormError):
    pass


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class GramForm:
    """Positive definite integral form given by its symmetric matrix."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise MalformedFormError(f"matrix must be square and nonempty: {self.entries!r}")
        if n > MAX_RANK:
            raise RankError(f"rank {n} exceeds the supported maximum {MAX_RANK}")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise AsymmetricMatrixError(f"entry ({i},{j}) differs from ({j},{i})")
        for k in range(1, n + 1):
            if bareiss_det([r[:k] for r in rows[:k]]) <= 0:
                raise NotPositiveDefiniteError(f"leading minor of order {k} is not positive")
        object.__setattr__(self, "entries", rows)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def det(self) -> int:
        return bareiss_det(self.entries)

    def is_diagonal(self) -> bool:
        n = self.dim
        return all(self.entries[i][j] == 0 for i in range(n) for j in range(n) if i != j)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(self.dim))

    def gram(self) -> GramForm:
        return self

    def __str__(self) -> str:
        return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in self.entries) + "]"


@dataclass(frozen=True)
class DiagonalForm:
    """The diagonal form <a1,...,an>; coefficients kept in ascending order."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(sorted(int(c) for c in self.coeffs))
        if not cs:
            raise MalformedFormError("a diagonal form needs at least one coefficient")
        if len(cs) > MAX_RANK:
            raise RankError(f"rank {len(cs)} exceeds the supported maximum {MAX_RANK}")
        if cs[0] < 1:
            raise NonPositiveCoefficientError(f"coefficients must be positive: {self.coeffs!r}")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def of(cls, *coeffs: int) -> DiagonalForm:
        return cls(tuple(coeffs))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    dim = rank

    @property
    def det(self) -> int:
        out = 1
        for c in self.coeffs:
            out *= c
        return out

    def is_diagonal(self) -> bool:
        return True

    def diagonal(self) -> tuple[int, ...]:
        return self.coeffs

    def gram(self) -> GramForm:
        n = self.rank
        return GramForm(tuple(tuple(self.coeffs[i] if i == j else 0 for j in range(n)) for i in range(n)))

    def extended(self, *more: int) -> DiagonalForm:
        return DiagonalForm(self.coeffs + tuple(more))

    def scaled(self, c: int) -> DiagonalForm:
        return DiagonalForm(tuple(c * a for a in self.coeffs))

    def __str__(self) -> str:
        return ",".join(map(str, self.coeffs))

    def __repr__(self) -> str:
        return f"<{str(self)}>"


AnyForm = Union[DiagonalForm, GramForm]


@dataclass(frozen=True)
class FormValue:
    value: int
    witness: tuple[int, ...]


_NUMBER = re.compile(r"^[+-]?\d+$")


def parse_form(text: str) -> AnyForm:
    """Parse "2,3,5" into a DiagonalForm or "[[1,0],[0,2]]" into a GramForm."""
    s = "".join(text.split())
    if not s:
        raise MalformedFormError("empty form literal")
    if s.startswith("["):
        m = re.fullmatch(r"\[(\[[-+\d,]*\](?:,\[[-+\d,]*\])*)\]", s)
        if m is None:
            raise MalformedFormError(f"cannot parse matrix literal {text!r}")
        rows = []
        for row in re.findall(r"\[([^\[\]]*)\]", m.group(1)):
            items = row.split(",")
            if not all(_NUMBER.match(v) for v in items):
                raise MalformedFormError(f"bad matrix row {row!r}")
            rows.append(tuple(int(v) for v in items))
        return GramForm(tuple(rows))
    s = s.strip("<>")
    items = s.split(",")
    if not all(_NUMBER.match(v) for v in items):
        raise MalformedFormError(f"cannot parse coefficient list {text!r}")
    return DiagonalForm(tuple(int(v) for v in items))


def as_gram(form: AnyForm) -> GramForm:
    return form.gram()


def evaluate(form: AnyForm, x: Sequence[int]) -> int:
    """Value x M x^t of the form at an integer vector."""
    if len(x) != form.dim:
        raise DimensionMismatchError(f"vector of length {len(x)} for a form of dimension {form.dim}")
    if isinstance(form, DiagonalForm):
        return sum(a * v * v for a, v in zip(form.coeffs, x))
    m = form.entries
    return sum(m[i][j] * x[i] * x[j] for i in range(len(x)) for j in range(len(x)))


def sub_multisets(f: DiagonalForm) -> list[DiagonalForm]:
    """All proper nonempty sub-multisets of f, by rank then coefficients."""
    if f.rank < 2:
        raise RankError("sub_multisets needs a form of rank at least 2")
    seen = set()
    for k in range(1, f.rank):
        for combo in itertools.combinations(f.coeffs, k):
            seen.add(combo)
    return [DiagonalForm(c) for c in sorted(seen, key=lambda c: (len(c), c))]
