"""Machine checks for covering-congruence arguments.

A proof script says: for every large prime p, subtracting sum c_i k_i d_i^2
with d = table(p mod M) lands in a "safe" residue class that the target
ternary g is known to represent.  Verification checks

  (i)   every residue r mod M coprime to M has a table entry,
  (ii)  r - sum c_i k_i d_i^2 (mod M) is a safe class,
  (iii) for every prime p in [base, B], n = p - ... is >= 0 and n in Q(g),

and that the primes below ``base`` are represented by the full form f except
for the listed exceptions.

Scripts live in INI files under ``qpu/data/scripts``.
"""

from __future__ import annotations

import configparser
import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from math import gcd
from typing import Iterable

import numpy as np

from .forms import AnyForm, DiagonalForm, parse_form
from .primes import prime_mask
from .sieve import (
    Congruence,
    ExcludedFamily,
    RepresentationSieve,
    build_sieve,
    parse_family,
)

DEFAULT_SCRIPT_BOUND = 10**6


class ScriptFormatError(ValueError):
    pass


class SieveBoundError(ValueError):
    pass


# ---------------------------------------------------------------------------
# safe sets


@dataclass(frozen=True)
class Guard:
    """One conjunct of a safe set."""

    kind: str  # "in", "not-in", "coprime", "avoid"
    modulus: int
    residues: frozenset[int] = frozenset()
    family: ExcludedFamily | None = None

    def holds(self, n: int) -> bool:
        if self.kind == "in":
            return n % self.modulus in self.residues
        if self.kind == "not-in":
            return n % self.modulus not in self.residues
        if self.kind == "coprime":
            return gcd(n, self.modulus) == 1
        return n not in self.family

    def class_safe(self, x: int, m: int) -> bool:
        """Does every n = x (mod m) satisfy the guard?  Needs modulus | m for residue guards."""
        if self.kind == "avoid":
            return not self.family.meets_class(x, m)
        if m % self.modulus:
            raise ScriptFormatError(f"guard modulus {self.modulus} does not divide {m}")
        return self.holds(x)

    def __str__(self) -> str:
        rs = ",".join(map(str, sorted(self.residues)))
        if self.kind == "in":
            return f"mod {self.modulus}: {rs}"
        if self.kind == "not-in":
            return f"not mod {self.modulus}: {rs}"
        if self.kind == "coprime":
            return f"coprime {self.modulus}"
        return f"avoid {self.family}"


@dataclass(frozen=True)
class SafeSet:
    guards: tuple[Guard, ...]

    def __contains__(self, n: int) -> bool:
        return all(g.holds(n) for g in self.guards)

    def class_safe(self, x: int, m: int) -> bool:
        return all(g.class_safe(x, m) for g in self.guards)

    def mask(self, bound: int) -> np.ndarray:
        return np.array([n in self for n in range(bound + 1)], dtype=bool)


def _ints(text: str) -> frozenset[int]:
    return frozenset(int(v) for v in text.replace(" ", "").split(",") if v)


def parse_guard(line: str) -> Guard:
    s = line.strip()
    if s == "even":
        return Guard("in", 2, frozenset({0}))
    if s == "odd":
        return Guard("in", 2, frozenset({1}))
    m = re.fullmatch(r"(not\s+)?mod\s+(\d+)\s*:\s*([\d,\s]+)", s)
    if m:
        return Guard("not-in" if m.group(1) else "in", int(m.group(2)), _ints(m.group(3)))
    m = re.fullmatch(r"coprime\s+(\d+)", s)
    if m:
        return Guard("coprime", int(m.group(1)))
    m = re.fullmatch(r"avoid\s+(.+)", s)
    if m:
        fam = parse_family(m.group(1))
        return Guard("avoid", fam.modulus, family=fam)
    raise ScriptFormatError(f"cannot parse safe-set guard {line!r}")


def safe_from_congruence(c: Congruence) -> SafeSet:
    return SafeSet((Guard("in", c.modulus, c.residues),))


# ---------------------------------------------------------------------------
# d tables


Value = tuple[int, ...]


@dataclass(frozen=True)
class Rule:
    value: Value
    specs: tuple[tuple[frozenset[int], int], ...]  # (residues, modulus); empty means otherwise

    def matches(self, r: int) -> bool:
        return not self.specs or any(r % m in rs for rs, m in self.specs)


def _parse_value(text: str) -> Value:
    return tuple(int(v) for v in text.strip().split("/"))


def parse_rule(line: str) -> Rule:
    try:
        value, rest = line.split(":", 1)
    except ValueError:
        raise ScriptFormatError(f"table rule needs 'value: residues mod m', got {line!r}") from None
    specs = []
    for part in rest.split(";"):
        part = part.strip()
        if part == "otherwise":
            return Rule(_parse_value(value), ())
        m = re.fullmatch(r"([\d,\s]+)\s+mod\s+(\d+)", part)
        if not m:
            raise ScriptFormatError(f"cannot parse residue condition {part!r}")
        specs.append((_ints(m.group(1)), int(m.group(2))))
    return Rule(_parse_value(value), tuple(specs))


def _parse_range(text: str) -> list[int]:
    text = text.strip()
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        return list(range(int(m.group(1)), int(m.group(2)) + 1))
    return [int(v) for v in text.split(",")]


# ---------------------------------------------------------------------------
# scripts


@dataclass(frozen=True)
class ProofScript:
    name: str
    form: DiagonalForm  # f, checked directly below ``base``
    target: AnyForm  # g
    modulus: int
    terms: tuple[tuple[int, int], ...]  # (c, k): subtract c * k * d^2
    safe: SafeSet
    base: int
    exceptions: frozenset[int] = frozenset()
    rules: tuple[Rule, ...] = ()
    search: tuple[tuple[int, ...], ...] | None = None  # candidate values, in order
    note: str = ""

    def __post_init__(self):
        if self.modulus < 1:
            raise ScriptFormatError("modulus must be positive")
        if not self.terms:
            raise ScriptFormatError("a script needs at least one subtrahend term")
        for rule in self.rules:
            if len(rule.value) != len(self.terms):
                raise ScriptFormatError(f"{self.name}: table value {rule.value} does not match {len(self.terms)} terms")
            for _, m in rule.specs:
                if self.modulus % m:
                    raise ScriptFormatError(f"{self.name}: rule modulus {m} does not divide {self.modulus}")

    @property
    def reconstructed(self) -> bool:
        return self.search is not None

    def subtract(self, value: Value) -> int:
        return sum(c * k * d * d for (c, k), d in zip(self.terms, value))

    def covered_residues(self) -> list[int]:
        return [r for r in range(self.modulus) if gcd(r, self.modulus) == 1]

    def lookup(self, r: int) -> Value | None:
        for rule in self.rules:
            if rule.matches(r):
                return rule.value
        return None

    def table(self) -> dict[int, Value]:
        """Resolved d-table on residues coprime to the modulus; searched entries
        take the first candidate landing in a safe class."""
        out = {}
        for r in self.covered_residues():
            v = self.lookup(r)
            if v is None and self.search is not None:
                v = next(
                    (c for c in itertools.product(*self.search) if self.safe.class_safe((r - self.subtract(c)) % self.modulus, self.modulus)),
                    None,
                )
            if v is not None:
                out[r] = v
        return out


def load_script_text(text: str, source: str = "<string>") -> list[ProofScript]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text, source=source)
    out = []
    for name in cp.sections():
        sec = cp[name]
        try:
            terms = []
            for t in sec["terms"].split():
                c, _, k = t.partition("*")
                terms.append((int(c), int(k) if k else 1))
            rules, search = (), None
            table = sec.get("table", "").strip()
            if table.startswith("search"):
                body = table[len("search"):]
                search = tuple(tuple(_parse_range(part)) for part in body.split(" x "))
            elif table:
                rules = tuple(parse_rule(line) for line in table.splitlines() if line.strip())
            out.append(
                ProofScript(
                    name=name,
                    form=parse_form(sec["form"]),
                    target=parse_form(sec["target"]),
                    modulus=int(sec["modulus"]),
                    terms=tuple(terms),
                    safe=SafeSet(tuple(parse_guard(g) for g in sec["safe"].splitlines() if g.strip())),
                    base=int(sec["base"]),
                    exceptions=_ints(sec.get("exceptions", "")),
                    rules=rules,
                    search=search,
                    note=" ".join(sec.get("note", "").split()),
                )
            )
        except KeyError as exc:
            raise ScriptFormatError(f"{source} [{name}]: missing key {exc}") from None
    return out


def load_script_file(path) -> list[ProofScript]:
    with open(path) as fh:
        return load_script_text(fh.read(), str(path))


@lru_cache(maxsize=1)
def builtin_scripts() -> tuple[ProofScript, ...]:
    out = []
    folder = resources.files("qpu").joinpath("data/scripts")
    for entry in sorted(folder.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".ini") and entry.name != "transfers.ini":
            out.extend(load_script_text(entry.read_text(), entry.name))
    return tuple(out)


def script_by_name(name: str) -> ProofScript:
    for s in builtin_scripts():
        if s.name == name:
            return s
    raise KeyError(f"no proof script named {name!r}")


# ---------------------------------------------------------------------------
# verification


@dataclass
class ScriptReport:
    name: str
    bound: int
    table: dict[int, Value] = field(repr=False)
    coverage_gaps: list[int] = field(default_factory=list)
    unsafe_classes: list[tuple[int, int]] = field(default_factory=list)  # (r, n mod M)
    prime_failures: list[tuple[int, int]] = field(default_factory=list)  # (p, n)
    prefix_failures: list[int] = field(default_factory=list)
    primes_checked: int = 0

    @property
    def ok(self) -> bool:
        return not (self.coverage_gaps or self.unsafe_classes or self.prime_failures or self.prefix_failures)

    def summary(self) -> str:
        status = "verified" if self.ok else "VIOLATIONS"
        return (
            f"{self.name}: {status}; {len(self.table)} classes, {self.primes_checked} primes up to {self.bound}; "
            f"gaps={self.coverage_gaps[:5]} unsafe={self.unsafe_classes[:5]} "
            f"failures={self.prime_failures[:5]} prefix={self.prefix_failures[:5]}"
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "bound": self.bound,
            "ok": self.ok,
            "table": {str(r): list(v) for r, v in sorted(self.table.items())},
            "coverage_gaps": self.coverage_gaps,
            "unsafe_classes": [list(x) for x in self.unsafe_classes],
            "prime_failures": [list(x) for x in self.prime_failures],
            "prefix_failures": self.prefix_failures,
            "primes_checked": self.primes_checked,
        }


def verify_proof_script(
    s: ProofScript,
    sieve: RepresentationSieve | None = None,
    bound: int | None = None,
    form_sieve: RepresentationSieve | None = None,
) -> ScriptReport:
    """Run checks (i)-(iii) plus the direct check of primes below the base bound.

    ``sieve`` must mark Q(target) at least up to the prime range end B (n <= p <= B).
    """
    if bound is None:
        bound = sieve.bound if sieve is not None else DEFAULT_SCRIPT_BOUND
    if bound < s.base:
        raise SieveBoundError(f"bound {bound} is below the base bound {s.base}")
    if sieve is None:
        sieve = build_sieve(s.target, bound)
    if sieve.bound < bound:
        raise SieveBoundError(f"sieve bound {sieve.bound} is below the prime range end {bound}")

    M = s.modulus
    table = s.table()
    rep = ScriptReport(s.name, bound, table)
    rep.coverage_gaps = [r for r in s.covered_residues() if r not in table]
    for r, v in sorted(table.items()):
        x = (r - s.subtract(v)) % M
        if not s.safe.class_safe(x, M):
            rep.unsafe_classes.append((r, x))

    # (iii) all primes in [base, bound]
    pm = prime_mask(bound)
    ps = np.flatnonzero(pm[s.base :]) + s.base
    rep.primes_checked = int(ps.size)
    sub = np.full(M, -1, dtype=np.int64)
    for r, v in table.items():
        sub[r] = s.subtract(v)
    subs = sub[ps % M]
    n = ps - subs
    ok = (subs >= 0) & (n >= 0)
    ok[ok] = sieve.bits[n[ok]]
    rep.prime_failures = [(int(p), int(v)) for p, v in zip(ps[~ok], n[~ok])]

    # primes below base: f itself, with the declared exceptions
    if s.base > 2:
        fs = form_sieve if form_sieve is not None and form_sieve.bound >= s.base else build_sieve(s.form, s.base)
        small = np.flatnonzero(pm[: s.base])
        missed = {int(p) for p in small if not fs.bits[p]}
        rep.prefix_failures = sorted(missed ^ set(s.exceptions))
    return rep


def verify_scripts(scripts: Iterable[ProofScript], bound: int = DEFAULT_SCRIPT_BOUND) -> list[ScriptReport]:
    """Verify many scripts, sharing one sieve per target."""
    sieves: dict = {}
    out = []
    for s in scripts:
        key = s.target
        if key not in sieves:
            sieves[key] = build_sieve(s.target, bound)
        out.append(verify_proof_script(s, sieves[key], bound))
    return out


# ---------------------------------------------------------------------------
# transfers from genus mates


@dataclass(frozen=True)
class MateTransferClaim:
    g: AnyForm
    mate: AnyForm
    modulus: int
    residues: frozenset[int]
    bound: int
    name: str = ""


@dataclass
class MateTransferReport:
    claim: MateTransferClaim
    counterexamples: list[int]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify_mate_transfer(claim: MateTransferClaim) -> MateTransferReport:
    """Every n <= bound in the congruence classes represented by the mate is represented by g."""
    if claim.bound < 1:
        raise ValueError("bound must be positive")
    sg = build_sieve(claim.g, claim.bound)
    sm = build_sieve(claim.mate, claim.bound)
    n = np.arange(claim.bound + 1)
    in_class = np.isin(n % claim.modulus, sorted(claim.residues))
    hit = in_class & sm.bits
    bad = hit & ~sg.bits
    return MateTransferReport(claim, np.flatnonzero(bad).tolist(), int(hit.sum()))


@lru_cache(maxsize=1)
def builtin_transfer_claims() -> tuple[MateTransferClaim, ...]:
    text = resources.files("qpu").joinpath("data/scripts/transfers.ini").read_text()
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text)
    out = []
    for name in cp.sections():
        sec = cp[name]
        out.append(
            MateTransferClaim(
                g=parse_form(sec["g"]),
                mate=parse_form(sec["mate"]),
                modulus=int(sec["modulus"]),
                residues=_ints(sec["residues"]),
                bound=int(sec["bound"]),
                name=name,
            )
        )
    return tuple(out)
