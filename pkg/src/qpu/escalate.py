"""Prime truants, the ten-prime criterion, properness and escalation trees."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil

import numpy as np

from .catalog import CRITERION_PRIMES
from .forms import DiagonalForm, sub_multisets
from .primes import prime_mask, primes_upto
from .sieve import _diagonal_witness, bits_to_array, build_sieve, layer_coefficient

STATUS_PROPER = "I-1"
STATUS_IMPROPER = "I-2"
STATUS_ADVANCED = "II-1"
STATUS_STUCK = "II-2"

DEFAULT_NODE_CAP = 500_000


class NotPrimeUniversalError(ValueError):
    """is_proper called on a form failing the criterion."""


class EscalationBudgetError(RuntimeError):
    def __init__(self, message: str, tree: EscalationTree):
        super().__init__(message)
        self.tree = tree


@lru_cache(maxsize=None)
def _reps(coeffs: tuple[int, ...], n: int) -> bool:
    return _diagonal_witness(coeffs, n) is not None


@lru_cache(maxsize=None)
def _missed_criterion(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p for p in CRITERION_PRIMES if not _reps(coeffs, p))


_SMALL_PRIMES = tuple(int(p) for p in primes_upto(CRITERION_PRIMES[-1]))


@lru_cache(maxsize=None)
def _small_truant(coeffs: tuple[int, ...]) -> int | None:
    """Smallest prime <= 67 not represented (None when the criterion passes)."""
    if not _missed_criterion(coeffs):
        return None
    return next(p for p in _SMALL_PRIMES if not _reps(coeffs, p))


def _coeffs(f) -> tuple[int, ...]:
    return f.coeffs if isinstance(f, DiagonalForm) else tuple(sorted(f))


def criterion_check(f: DiagonalForm) -> tuple[bool, list[int]]:
    """Does f represent every prime of the criterion set?  Returns (ok, missed primes)."""
    missed = _missed_criterion(_coeffs(f))
    return not missed, list(missed)


def prime_truant(f: DiagonalForm, prime_bound: int) -> int | None:
    """Smallest prime <= prime_bound that f does not represent, or None."""
    if prime_bound < 67:
        raise ValueError("prime_bound must be at least 67")
    cs = _coeffs(f)
    if prime_bound <= 2000:
        return next((int(p) for p in primes_upto(prime_bound) if not _reps(cs, int(p))), None)
    bits = build_sieve(DiagonalForm(cs), prime_bound).bits
    miss = np.flatnonzero(prime_mask(prime_bound) & ~bits)
    return int(miss[0]) if miss.size else None


def missed_primes(f, bound: int) -> list[int]:
    bits = build_sieve(f, bound).bits
    return np.flatnonzero(prime_mask(bound) & ~bits).tolist()


@dataclass(frozen=True)
class Verdict:
    form: DiagonalForm
    prime_universal: bool
    missed_criterion: tuple[int, ...]
    audit_bound: int
    audit_miss: int | None

    @property
    def contradiction(self) -> bool:
        """Criterion passes but a prime below the audit bound is missed."""
        return self.prime_universal and self.audit_miss is not None


def is_prime_universal(f: DiagonalForm, audit_bound: int = 10**5) -> Verdict:
    ok, missed = criterion_check(f)
    return Verdict(f, ok, tuple(missed), audit_bound, prime_truant(f, audit_bound))


def _proper_coeffs(cs: tuple[int, ...]) -> bool:
    # a prime-universal proper subform sits inside some leave-one-out subform
    if len(cs) < 2:
        return True
    subs = {cs[:i] + cs[i + 1 :] for i in range(len(cs))}
    return all(_missed_criterion(s) for s in subs)


def is_proper(f: DiagonalForm) -> bool:
    """True iff no diagonal subform of smaller rank passes the criterion."""
    ok, missed = criterion_check(f)
    if not ok:
        raise NotPrimeUniversalError(f"{f!r} misses {missed}; properness is defined for prime-universal forms")
    if f.rank < 2:
        return True
    return not any(not _missed_criterion(s.coeffs) for s in sub_multisets(f))


# ---------------------------------------------------------------------------
# repeated coefficients


@dataclass(frozen=True)
class RepetitionOutcome:
    stuck: DiagonalForm  # the form whose truant did not move
    a: int
    p: int
    copies: int | None  # fewest extra copies of a that reach p
    candidates: tuple[int, ...] = ()  # b in (a, p] with <stuck, b> representing p
    admissible: tuple[int, ...] = ()  # candidates not forcing an improper form

    @property
    def resolved_by_copies(self) -> bool:
        return self.copies is not None


def resolve_repetition(prefix: DiagonalForm, a: int, p: int) -> RepetitionOutcome:
    """What happens when appending a does not move the truant p.

    A prefix whose largest coefficient is already a is taken as the stuck form
    itself; otherwise the stuck form is prefix + a.  Each useful copy of a adds
    at least a, so at most ceil(p / a) extra copies are tried.
    """
    cs = _coeffs(prefix)
    stuck = cs if cs and cs[-1] == a else tuple(sorted(cs + (a,)))
    for k in range(1, ceil(p / a) + 1):
        if _reps(stuck + (a,) * k, p):
            return RepetitionOutcome(DiagonalForm(stuck), a, p, k)
    cands = tuple(b for b in range(a + 1, p + 1) if _reps(tuple(sorted(stuck + (b,))), p))
    adm = tuple(b for b in cands if _proper_coeffs(tuple(sorted(stuck + (b,)))))
    return RepetitionOutcome(DiagonalForm(stuck), a, p, None, cands, adm)


# ---------------------------------------------------------------------------
# escalation


@dataclass
class EscalationNode:
    coeffs: tuple[int, ...]
    truant: int | None
    status: str
    children: list[EscalationNode] = field(default_factory=list)
    audit_miss: int | None = None
    repetition: RepetitionOutcome | None = None

    @property
    def form(self) -> DiagonalForm | None:
        return DiagonalForm(self.coeffs) if self.coeffs else None

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def to_dict(self) -> dict:
        d = {"form": list(self.coeffs), "truant": self.truant, "status": self.status}
        if self.audit_miss is not None:
            d["audit_miss"] = self.audit_miss
        if self.repetition is not None:
            r = self.repetition
            d["repetition"] = {"copies": r.copies, "candidates": list(r.candidates), "admissible": list(r.admissible)}
        d["children"] = [c.to_dict() for c in self.children]
        return d


@dataclass
class EscalationTree:
    root: EscalationNode
    max_rank: int
    node_count: int = 0
    audit_bound: int | None = None
    complete: bool = True

    def nodes(self):
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def proper_by_rank(self) -> dict[int, list[DiagonalForm]]:
        out = {k: [] for k in range(1, self.max_rank + 1)}
        for n in self.nodes():
            if n.status == STATUS_PROPER:
                out[n.rank].append(n.coeffs)
        return {k: [DiagonalForm(c) for c in sorted(v)] for k, v in out.items()}

    def frontier(self, rank: int) -> list[DiagonalForm]:
        """Forms of the given rank that fail the criterion."""
        return [DiagonalForm(n.coeffs) for n in sorted(self.nodes(), key=lambda n: n.coeffs)
                if n.rank == rank and n.truant is not None]

    def contradictions(self) -> list[tuple[tuple[int, ...], int]]:
        """Nodes where the criterion and the prime audit disagree."""
        if self.audit_bound is None:
            return []
        out = []
        for n in self.nodes():
            if not n.coeffs:
                continue
            passes = n.truant is None
            if passes == (n.audit_miss is not None):
                out.append((n.coeffs, n.audit_miss))
        return out

    def to_json(self) -> str:
        return json.dumps(
            {"max_rank": self.max_rank, "node_count": self.node_count, "complete": self.complete,
             "audit_bound": self.audit_bound, "root": self.root.to_dict()},
            sort_keys=True,
        )

    def to_dot(self) -> str:
        lines = ["digraph escalation {", '  node [shape=box, fontname="monospace"];']
        ids: dict[tuple[int, ...], str] = {}
        for i, n in enumerate(self.nodes()):
            ids[n.coeffs] = f"n{i}"
            label = "<>" if not n.coeffs else "<" + ",".join(map(str, n.coeffs)) + ">"
            extra = f"\\n{n.status}" + (f" p={n.truant}" if n.truant else "")
            lines.append(f'  n{i} [label="{label}{extra}"];')
        for n in self.nodes():
            for c in n.children:
                lines.append(f"  {ids[n.coeffs]} -> {ids[c.coeffs]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def escalate_tree(
    max_rank: int,
    node_cap: int = DEFAULT_NODE_CAP,
    audit_bound: int | None = None,
    resolve_stuck: bool = False,
) -> EscalationTree:
    """Depth-first escalation from the empty form.

    A node failing the criterion with truant p gets children appending
    a in [last coefficient, p].  Nodes passing the criterion are leaves,
    marked proper (I-1) or improper (I-2).  With ``audit_bound`` every node is
    also audited against all primes up to that bound, using bit sets grown one
    coefficient at a time.
    """
    if not 1 <= max_rank <= 8:
        raise ValueError("max_rank must lie in [1, 8]")
    root = EscalationNode((), 2, "root")
    tree = EscalationTree(root, max_rank, 1, audit_bound)
    primes_bits = None
    if audit_bound is not None:
        pm = prime_mask(audit_bound)
        primes_bits = int.from_bytes(np.packbits(pm, bitorder="little").tobytes(), "little")
    seen = {()}

    def audit(bits: int) -> int | None:
        missing = primes_bits & ~bits
        if not missing:
            return None
        return (missing & -missing).bit_length() - 1

    # stack of (node, bits)
    stack = [(root, 1 if audit_bound is not None else None)]
    while stack:
        node, bits = stack.pop()
        p = node.truant
        if p is None or node.rank >= max_rank:
            continue
        lo = node.coeffs[-1] if node.coeffs else 1
        kids = []
        for a in range(lo, p + 1):
            cs = node.coeffs + (a,)
            if cs in seen:
                continue
            seen.add(cs)
            tree.node_count += 1
            if tree.node_count > node_cap:
                tree.complete = False
                raise EscalationBudgetError(f"escalation exceeded {node_cap} nodes", tree)
            t = _small_truant(cs)
            if t is None:
                status = STATUS_PROPER if _proper_coeffs(cs) else STATUS_IMPROPER
            else:
                status = STATUS_ADVANCED if t > p else STATUS_STUCK
            child = EscalationNode(cs, t, status)
            cbits = None
            if bits is not None:
                cbits = layer_coefficient(bits, a, audit_bound)
                child.audit_miss = audit(cbits)
            if status == STATUS_STUCK and resolve_stuck and node.coeffs:
                child.repetition = resolve_repetition(DiagonalForm(node.coeffs), a, p)
            kids.append((child, cbits))
        node.children = [c for c, _ in kids]
        stack.extend(reversed(kids))
    return tree


def minimality_witnesses() -> dict[int, list[tuple[DiagonalForm, bool, bool]]]:
    """For each criterion prime p and each listed form missing only p:
    (form, passes the criterion without p, misses p)."""
    from .catalog import SINGLE_EXCEPTIONS

    out = {}
    for p, forms in SINGLE_EXCEPTIONS.items():
        rows = []
        for f in forms:
            missed = set(_missed_criterion(f.coeffs))
            rows.append((f, not (missed - {p}), p in missed))
        out[p] = rows
    return out


def audit_bits(f: DiagonalForm, bound: int) -> np.ndarray:
    bits = 1
    for a in f.coeffs:
        bits = layer_coefficient(bits, a, bound)
    return bits_to_array(bits, bound)
