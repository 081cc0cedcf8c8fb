"""Reproduction checks for the published finite claims, one function per claim.

Each check returns a CheckResult made of labelled items so callers can report
exactly which item failed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import catalog
from .escalate import criterion_check, escalate_tree, minimality_witnesses, missed_primes, prime_truant
from .forms import DiagonalForm, GramForm, NotPositiveDefiniteError
from .goodvec import compute_Rgda, good_residue_set, precedes, verify_transfer
from .lattice import box_bounds
from .local import genus_of, load_genera, local_represents, prime_divisors
from .prooflib import builtin_scripts, builtin_transfer_claims, verify_mate_transfer, verify_scripts
from .sieve import EVEN, build_sieve, parse_family, represents_direct, verify_excluded

PRIME_AUDIT = 10**5


@dataclass
class Item:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class CheckResult:
    number: int
    title: str
    items: list[Item] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(i.ok for i in self.items)

    def failures(self) -> list[Item]:
        return [i for i in self.items if not i.ok]

    def line(self) -> str:
        bad = self.failures()
        tail = "" if not bad else " | failed: " + "; ".join(f"{i.label} ({i.detail})" for i in bad[:4])
        return f"{'PASS' if self.ok else 'FAIL'} criterion {self.number}: {self.title} [{len(self.items) - len(bad)}/{len(self.items)}]{tail}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "ok": self.ok,
                "items": [{"label": i.label, "ok": i.ok, "detail": i.detail} for i in self.items]}


def _missed(f, bound=PRIME_AUDIT) -> list[int]:
    return missed_primes(f, bound)


def check_candidates() -> CheckResult:
    res = CheckResult(1, "quaternary candidates pass the criterion and miss no prime <= 1e5")
    for f in catalog.QUATERNARY_CANDIDATES:
        ok, missed = criterion_check(f)
        audit = _missed(f)
        res.items.append(Item(str(f), ok and not audit, f"criterion missed={missed} audit missed={audit[:5]}"))
    return res


def check_truants() -> CheckResult:
    res = CheckResult(2, "prime truants")
    for f, p in catalog.TRUANTS.items():
        got = prime_truant(f, PRIME_AUDIT)
        res.items.append(Item(f"{f} -> {p}", got == p, f"got {got}"))
    return res


def check_single_exceptions() -> CheckResult:
    res = CheckResult(3, "missed primes <= 1e5 equal the listed exceptions")
    for p, forms in catalog.SINGLE_EXCEPTIONS.items():
        for f in forms:
            got = _missed(f)
            res.items.append(Item(f"{f} misses [{p}]", got == [p], f"got {got}"))
    for f in (DiagonalForm.of(2, 3, 7, 9), DiagonalForm.of(2, 3, 10, 21)):
        want = sorted(catalog.MULTI_EXCEPTIONS[f])
        got = _missed(f)
        res.items.append(Item(f"{f} misses {want}", got == want, f"got {got}"))
    return res


def check_multi_exception() -> CheckResult:
    res = CheckResult(4, "<2,3,6,7> misses exactly 23, 47, 67")
    f = DiagonalForm.of(2, 3, 6, 7)
    got = _missed(f)
    res.items.append(Item(str(f), got == [23, 47, 67], f"got {got}"))
    return res


def _mates(f: DiagonalForm) -> list[GramForm]:
    return list(genus_of(f).mates)


def check_good_vectors() -> CheckResult:
    res = CheckResult(5, "good-vector relations and good residue sets")
    for f, m, d, a in catalog.asserted_relations():
        mate = _mates(f)[m]
        res.items.append(Item(f"{mate} precedes {f} at ({d},{a})", precedes(f, mate, d, a)))
    g = DiagonalForm.of(2, 3, 7)
    for d, want in ((30, catalog.R30), (42, catalog.R42)):
        got = good_residue_set(g, _mates(g), d)
        res.items.append(Item(f"good residues mod {d}", got == set(want), f"got {sorted(got)}"))
    return res


def check_transfers(bound: int = 10**4) -> CheckResult:
    res = CheckResult(6, "transfer inclusions hold on [0, 1e4] for every verified relation")
    for f, m, d, a in catalog.asserted_relations():
        mate = _mates(f)[m]
        if not precedes(f, mate, d, a):
            continue
        rep = verify_transfer(f, mate, d, a, bound)
        res.items.append(Item(f"{mate} -> {f} at ({d},{a})", rep.ok, f"mismatches {rep.mismatches[:5]}"))
    return res


def check_exclusions(bound: int = PRIME_AUDIT) -> CheckResult:
    res = CheckResult(7, "excluded families are exactly the non-represented integers")
    for f, constraint, fams, domain in catalog.TERNARY_EXCLUSIONS:
        rep = verify_excluded(
            f,
            [parse_family(x) for x in fams],
            EVEN if constraint == "even" else None,
            bound,
            domain=EVEN if domain == "even" else None,
        )
        res.items.append(Item(f"{f} minus {', '.join(fams)}", rep.ok, f"mismatches {rep.mismatches[:6]}"))
    return res


def check_scripts(bound: int = 10**6) -> CheckResult:
    res = CheckResult(8, "covering-congruence scripts verified on primes <= 1e6")
    for rep in verify_scripts(builtin_scripts(), bound):
        res.items.append(Item(rep.name, rep.ok, rep.summary() if not rep.ok else ""))
    for claim in builtin_transfer_claims():
        r = verify_mate_transfer(claim)
        res.items.append(Item(f"transfer {claim.name}", r.ok, f"counterexamples {r.counterexamples[:5]}"))
    return res


def check_classification(max_rank: int = 6) -> CheckResult:
    res = CheckResult(9, "escalation regenerates the classification")
    tree = escalate_tree(max_rank)
    proper = tree.proper_by_rank()
    res.items.append(Item("no binary or unary forms", not proper[1] and not proper[2]))
    res.items.append(Item("five ternaries", set(proper[3]) == set(catalog.PROPER_TERNARIES), f"got {proper[3]}"))
    cases = {f for v in catalog.RANK4_CASES.values() for f in v}
    front = set(tree.frontier(4))
    res.items.append(Item("rank-4 frontier", front == cases, f"extra {sorted(front - cases, key=str)} missing {sorted(cases - front, key=str)}"))
    res.items.append(Item("candidates proper at rank 4", set(catalog.QUATERNARY_CANDIDATES) <= set(proper[4])))
    want = catalog.higher_proper_forms()
    for k in (5, 6):
        got = set(proper[k])
        exp = set(want[k])
        res.items.append(Item(f"rank {k} set", got == exp, f"extra {sorted(got - exp, key=str)} missing {sorted(exp - got, key=str)}"))
    return res


def check_criterion_consistency(max_rank: int = 8) -> CheckResult:
    res = CheckResult(10, "criterion agrees with the 1e5 prime audit; criterion set is minimal")
    tree = escalate_tree(max_rank, audit_bound=PRIME_AUDIT)
    bad = tree.contradictions()
    res.items.append(Item(f"{tree.node_count} escalation nodes", not bad, f"disagreements {bad[:5]}"))
    for p, rows in minimality_witnesses().items():
        for f, rest_ok, misses in rows:
            res.items.append(Item(f"{f} drops only {p}", rest_ok and misses))
    return res


# ---------------------------------------------------------------------------
# property suites


def brute_values(form, bound: int) -> np.ndarray:
    """Q(form) on [0, bound] by evaluating every vector in a coordinate box."""
    g = form.gram()
    n = g.dim
    M = np.array(g.entries, dtype=np.int64)
    bb = box_bounds(g.entries, bound)
    diag = g.is_diagonal()
    axes = [np.arange(0 if diag else -b, b + 1, dtype=np.int64) for b in bb]
    out = np.zeros(bound + 1, dtype=bool)
    head = list(itertools.product(*axes[:-1])) if n > 1 else [()]
    last = axes[-1]
    for h in head:
        X = np.empty((last.size, n), dtype=np.int64)
        X[:, :-1] = h
        X[:, -1] = last
        v = np.einsum("ij,jk,ik->i", X, M, X)
        out[v[v <= bound]] = True
    return out


def random_forms(count: int, seed: int = 20240601) -> list:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        kind = rng.random()
        if kind < 0.6:
            rank = rng.choice((2, 3, 3, 4))
            lo = 1 if rank < 4 else 3
            out.append(DiagonalForm(tuple(rng.randint(lo, 30) for _ in range(rank))))
        else:
            a, b, c = (rng.randint(2, 12) for _ in range(3))
            e = [[a, rng.randint(-2, 2), rng.randint(-2, 2)], [0, b, rng.randint(-2, 2)], [0, 0, c]]
            rows = tuple(tuple(e[min(i, j)][max(i, j)] for j in range(3)) for i in range(3))
            try:
                out.append(GramForm(rows))
            except NotPositiveDefiniteError:
                continue
    return out


def check_properties(bound: int = 10**4) -> CheckResult:
    res = CheckResult(11, "property suites")
    rng = random.Random(7)
    bad = []
    for f in random_forms(50):
        sv = build_sieve(f, bound).bits
        if not np.array_equal(sv, brute_values(f, bound)):
            bad.append(str(f))
            continue
        for n in rng.sample(range(bound + 1), 40):
            if (represents_direct(f, n) is not None) != bool(sv[n]):
                bad.append(f"{f}@{n}")
                break
    res.items.append(Item("sieve equals box enumeration and direct search (50 forms)", not bad, f"{bad[:5]}"))

    genera = load_genera()
    gl_bad = []
    for rep, g in genera.items():
        for m in g.members:
            vals = np.flatnonzero(build_sieve(m, 2000).bits)
            for p in prime_divisors(2 * rep.det):
                for n in vals[1:]:
                    if not local_represents(rep, int(n), p):
                        gl_bad.append((str(m), int(n), p))
                        break
    res.items.append(Item("global implies local (genus members, n <= 2000)", not gl_bad, f"{gl_bad[:5]}"))

    cn_bad = []
    for rep, g in genera.items():
        if g.class_number != 1:
            continue
        sv = build_sieve(rep, bound).bits
        ps = prime_divisors(2 * rep.det)
        loc = np.array([n == 0 or all(local_represents(rep, n, p) for p in ps) for n in range(bound + 1)])
        if not np.array_equal(loc, sv):
            cn_bad.append((str(rep), np.flatnonzero(loc ^ sv)[:5].tolist()))
    res.items.append(Item("class number one: local equals global (n <= 1e4)", not cn_bad, f"{cn_bad[:3]}"))

    part_bad = []
    ternaries = [DiagonalForm.of(2, 3, 5), DiagonalForm.of(1, 1, 30)] + _mates(DiagonalForm.of(2, 3, 14)) + _mates(DiagonalForm.of(2, 3, 7))
    for g in ternaries:
        for d in (1, 2, 3, 7, 8, 12):
            sets = [set(compute_Rgda(g, d, a).vectors) for a in range(d)]
            total = sum(len(s) for s in sets)
            union = set().union(*sets)
            if total != d**3 or len(union) != d**3:
                part_bad.append((str(g), d))
    res.items.append(Item("R(g,d,a) partitions (Z/dZ)^3", not part_bad, f"{part_bad[:5]}"))
    return res


CHECKS: dict[int, Callable[[], CheckResult]] = {
    1: check_candidates,
    2: check_truants,
    3: check_single_exceptions,
    4: check_multi_exception,
    5: check_good_vectors,
    6: check_transfers,
    7: check_exclusions,
    8: check_scripts,
    9: check_classification,
    10: check_criterion_consistency,
    11: check_properties,
}


def run_checks(numbers=None) -> list[CheckResult]:
    nums = sorted(CHECKS) if numbers is None else sorted(numbers)
    return [CHECKS[n]() for n in nums]
