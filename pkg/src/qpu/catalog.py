"""Published finite data: candidate lists, classification rows, exception tables."""

from __future__ import annotations

from dataclasses import dataclass

from .forms import DiagonalForm

CRITERION_PRIMES = (2, 3, 5, 7, 13, 17, 23, 41, 43, 67)


def _d(*c: int) -> DiagonalForm:
    return DiagonalForm.of(*c)


# quaternary forms whose prime-universality needed new arguments
QUATERNARY_CANDIDATES: tuple[DiagonalForm, ...] = tuple(
    [_d(2, 3, 4, 5), _d(2, 3, 4, 11)]
    + [_d(2, 3, 5, h) for h in (5, 11, 13, 14, 16, 17)]
    + [_d(2, 3, 5, h) for h in (*range(20, 28), *range(29, 34), 35, 36, 38, 40, 41, 43)]
)

PROPER_TERNARIES: tuple[DiagonalForm, ...] = (
    _d(1, 1, 2), _d(1, 1, 3), _d(1, 2, 3), _d(1, 2, 4), _d(1, 2, 5),
)

# non-prime-universal rank-4 prefixes of proper forms of rank >= 5, by case
RANK4_CASES: dict[int, tuple[DiagonalForm, ...]] = {
    1: tuple(_d(2, 2, 2, a) for a in (2, 3)),
    2: tuple(_d(2, 2, 3, a) for a in (8, 11, 16, 17)),
    3: tuple(_d(2, 3, 3, a) for a in (3, 4, 6)),
    4: tuple(_d(2, 3, 4, a) for a in (4, 6, 7, 10, 12, 13)),
    5: tuple(_d(2, 3, 5, a) for a in (7, 19, 28, 34, 37, 39, 42)),
    6: tuple(_d(2, 3, 6, a) for a in (6, 7)),
    7: tuple(_d(2, 3, 7, a) for a in (7, 9, 10, 11, 12, 13)),
}


@dataclass(frozen=True)
class ClassificationRow:
    """Fixed prefix plus a last coefficient from [lo, hi] minus ``excluded``, or from ``values``."""

    prefix: tuple[int, ...]
    lo: int | None = None
    hi: int | None = None
    excluded: tuple[int, ...] = ()
    values: tuple[int, ...] | None = None

    def last_values(self) -> list[int]:
        if self.values is not None:
            return list(self.values)
        if self.lo is None:
            return []
        return [a for a in range(self.lo, self.hi + 1) if a not in self.excluded]

    def expand(self) -> list[DiagonalForm]:
        vals = self.last_values()
        if not vals:
            return [DiagonalForm(self.prefix)]
        return [DiagonalForm(self.prefix + (a,)) for a in vals]


def _row(*prefix, lo=None, hi=None, excl=(), values=None) -> ClassificationRow:
    return ClassificationRow(tuple(prefix), lo, hi, tuple(excl), tuple(values) if values else None)


# proper prime-universal forms of rank 5 and 6
HIGHER_PROPER_ROWS: tuple[ClassificationRow, ...] = (
    _row(2, 2, 2, 2, 3),
    _row(2, 2, 2, 3, values=(8, 11, 17)),
    _row(2, 2, 3, 8, 17),
    _row(2, 2, 3, 11, 17),
    _row(2, 2, 3, 16, 17),
    _row(2, 2, 3, 17, lo=17, hi=41, excl=(26, 32, 35, 40)),
    _row(2, 3, 3, 3, 4),
    _row(2, 3, 3, 4, values=(4, 6, 10, 13)),
    _row(2, 3, 4, 4, lo=4, hi=17, excl=(5, 8, 9, 11, 16)),
    _row(2, 3, 4, 6, lo=6, hi=23, excl=(8, 9, 11, 22)),
    _row(2, 3, 4, 7, lo=7, hi=17, excl=(8, 9, 11, 16)),
    _row(2, 3, 4, 10, lo=10, hi=23, excl=(11, 22)),
    _row(2, 3, 4, 12, 13),
    _row(2, 3, 4, 13, lo=13, hi=23, excl=(13, 22)),
    _row(2, 3, 5, 7, values=(7, 19, 28, 34)),
    _row(2, 3, 5, 19, 19),
    _row(2, 3, 6, 6, 7),
    _row(2, 3, 6, 7, lo=7, hi=23, excl=(8, 19, 20, 22)),
    _row(2, 3, 6, 7, 19, 20),
    _row(2, 3, 6, 7, 20, lo=20, hi=67, excl=(21, 23, 63, 66)),
    _row(2, 3, 7, 7, lo=7, hi=13, excl=(7, 8, 9, 10, 12)),
    _row(2, 3, 7, 7, 7, 10),
    _row(2, 3, 7, 9, lo=9, hi=13, excl=(9, 12)),
    _row(2, 3, 7, 10, lo=10, hi=23, excl=(17, 19, 22)),
    _row(2, 3, 7, 11, lo=11, hi=17, excl=(11, 13, 16)),
    _row(2, 3, 7, 12, 13),
    _row(2, 3, 7, 13, lo=13, hi=17, excl=(13, 16)),
)


def higher_proper_forms() -> dict[int, list[DiagonalForm]]:
    """Expansion of the rank 5 / 6 classification rows, sorted per rank."""
    out: dict[int, set] = {}
    for row in HIGHER_PROPER_ROWS:
        for f in row.expand():
            out.setdefault(f.rank, set()).add(f)
    return {k: sorted(v, key=lambda f: f.coeffs) for k, v in sorted(out.items())}


# forms representing every prime except the listed ones
SINGLE_EXCEPTIONS: dict[int, tuple[DiagonalForm, ...]] = {
    2: (_d(1, 3, 4),),
    3: (_d(1, 1, 6),),
    5: (_d(1, 2, 6, 10),),
    7: (_d(1, 1, 1, 9),),
    13: (_d(2, 3, 3, 4), _d(2, 3, 4, 12)),
    17: (_d(2, 2, 2, 3), _d(2, 3, 4, 4), _d(2, 3, 4, 7), _d(2, 3, 7, 11), _d(2, 3, 7, 13)),
    23: (_d(2, 3, 4, 6), _d(2, 3, 4, 10), _d(2, 3, 4, 13), _d(2, 3, 6, 7, 19), _d(2, 3, 6, 7, 22)),
    41: (_d(2, 2, 3, 17),),
    43: (_d(2, 3, 5, 19),),
    67: (_d(2, 3, 6, 7, 20),),
}

# forms with more than one exceptional prime, as printed
MULTI_EXCEPTIONS: dict[DiagonalForm, frozenset[int]] = {
    _d(2, 3, 6, 7): frozenset({23, 47, 67}),
    _d(2, 3, 7, 9): frozenset({13, 97}),
    _d(2, 3, 10, 21): frozenset({13, 17, 43, 47}),
}

# prime truants quoted for individual forms
TRUANTS: dict[DiagonalForm, int] = {
    _d(2, 2, 2, 3): 17,
    _d(2, 2, 3, 17): 41,
    _d(2, 3, 3, 4): 13,
    _d(2, 3, 4, 4): 17,
    _d(2, 3, 4, 6): 23,
    _d(2, 3, 4, 12): 13,
    _d(2, 3, 5, 19): 43,
    _d(2, 3, 6, 7): 23,
    _d(2, 3, 6, 7, 19): 23,
    _d(2, 3, 6, 7, 20): 67,
    _d(2, 3, 6, 7, 22): 23,
}

# excluded families of ternaries: (form, constraint, families, compared domain)
TERNARY_EXCLUSIONS: tuple[tuple[DiagonalForm, str | None, tuple[str, ...], str | None], ...] = (
    (_d(2, 2, 2), "even", ("4^s(16t+14)",), None),
    (_d(2, 2, 3), None, ("8t+1", "9^s(9t+6)"), None),
    (_d(2, 3, 3), None, ("9^s(3t+1)",), None),
    (_d(2, 3, 6), None, ("4^s(8t+7)", "9^s(3t+1)"), None),
    (_d(2, 3, 4), "even", ("4^s(16t+10)",), "even"),
    (_d(2, 4, 12), "even", ("4^s(16t+10)",), "even"),
    (_d(2, 4, 4), "even", ("4^s(16t+14)",), "even"),
    (_d(2, 4, 6), "even", ("4^s(32t+20)",), "even"),
    (_d(2, 4, 10), "even", ("25^s(50t+{20,30})",), "even"),
)

# good-vector relations (f, mate index, d, a); mates index into the genus table
R30 = frozenset({0, 2, 3, 6, 8, 9, 10, 12, 15, 18, 20, 21, 22, 24, 27, 28})
R42 = frozenset({0, 3, 6, 7, 9, 12, 14, 15, 18, 21, 24, 27, 28, 30, 33, 35, 36, 39})


def asserted_relations() -> list[tuple[DiagonalForm, int, int, int]]:
    out = [(_d(2, 3, 5), 0, 7, a) for a in (0, 3, 5, 6)]
    out += [(_d(2, 3, 14), 0, d, a) for d, a in ((8, 3), (32, 12), (32, 16))]
    for m in (0, 1):
        out.append((_d(2, 3, 7), m, 3, 0))
        out += [(_d(2, 3, 7), m, 30, r) for r in sorted(R30)]
        out += [(_d(2, 3, 7), m, 42, r) for r in sorted(R42)]
    return out
