"""Good vectors: transferring representations from a genus mate g to f.

R(g,d,a) is the set of v in (Z/dZ)^3 with v M_g v^t = a (mod d), and
R(f,g,d) the integer matrices T with T^t M_f T = d^2 M_g.  A vector v is good
when v T^t = 0 (mod d) for some T; if every vector of R(g,d,a) is good then
every n = a (mod d) represented by g is represented by f.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .forms import AnyForm, GramForm, RankError
from .lattice import vectors_of_norm
from .sieve import build_sieve

Vector = tuple[int, int, int]
Matrix3 = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

MAX_MODULUS = 64
DEFAULT_WORK_BUDGET = 2 * 10**9


class WorkBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class CosetSet:
    d: int
    a: int
    vectors: tuple[Vector, ...]


@dataclass(frozen=True)
class ScaledIsometrySet:
    d: int
    matrices: tuple[Matrix3, ...]


@dataclass
class TransferCertificate:
    f: GramForm
    g: GramForm
    d: int
    a: int
    good_count: int
    total_count: int
    witnesses: dict[Vector, Matrix3] = field(repr=False)

    @property
    def holds(self) -> bool:
        return self.good_count == self.total_count

    def bad_vectors(self, vectors: tuple[Vector, ...]) -> list[Vector]:
        return [v for v in vectors if v not in self.witnesses]

    def to_dict(self) -> dict:
        return {
            "f": str(self.f),
            "g": str(self.g),
            "d": self.d,
            "a": self.a,
            "good_count": self.good_count,
            "total_count": self.total_count,
            "precedes": self.holds,
            "witnesses": [
                {"vector": list(v), "matrix": [list(r) for r in self.witnesses[v]]}
                for v in sorted(self.witnesses)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _ternary(form: AnyForm) -> GramForm:
    g = form.gram()
    if g.dim != 3:
        raise RankError(f"good-vector computations need ternary forms, got dimension {g.dim}")
    return g


def _check_modulus(d: int) -> None:
    if not 1 <= d <= MAX_MODULUS:
        raise ValueError(f"modulus d must lie in [1, {MAX_MODULUS}]")


@lru_cache(maxsize=64)
def _all_vectors(d: int) -> np.ndarray:
    grid = np.indices((d, d, d)).reshape(3, -1).T
    grid.setflags(write=False)
    return grid


def _values_mod(g: GramForm, d: int) -> np.ndarray:
    V = _all_vectors(d)
    M = np.array(g.entries, dtype=np.int64)
    return np.einsum("ij,jk,ik->i", V, M, V) % d


def compute_Rgda(g: AnyForm, d: int, a: int) -> CosetSet:
    g = _ternary(g)
    _check_modulus(d)
    if not 0 <= a < d:
        raise ValueError("residue a must satisfy 0 <= a < d")
    V = _all_vectors(d)
    sel = V[_values_mod(g, d) == a]
    return CosetSet(d, a, tuple(tuple(int(x) for x in row) for row in sel))


@lru_cache(maxsize=128)
def _rfgd(f: GramForm, g: GramForm, d: int) -> tuple[Matrix3, ...]:
    Mf = np.array(f.entries, dtype=np.int64)
    d2 = d * d
    cols = [np.array(vectors_of_norm(f.entries, d2 * g.entries[j][j]), dtype=np.int64).reshape(-1, 3) for j in range(3)]
    if any(c.shape[0] == 0 for c in cols):
        return ()
    g01 = cols[0] @ Mf @ cols[1].T == d2 * g.entries[0][1]
    g02 = cols[0] @ Mf @ cols[2].T == d2 * g.entries[0][2]
    g12 = cols[1] @ Mf @ cols[2].T == d2 * g.entries[1][2]
    out = []
    for i in range(cols[0].shape[0]):
        for j in np.flatnonzero(g01[i]):
            for k in np.flatnonzero(g02[i] & g12[j]):
                c0, c1, c2 = cols[0][i], cols[1][j], cols[2][k]
                T = tuple(tuple(int(v) for v in row) for row in np.stack([c0, c1, c2], axis=1))
                out.append(T)
    out.sort()
    return tuple(out)


def compute_Rfgd(f: AnyForm, g: AnyForm, d: int) -> ScaledIsometrySet:
    """All T in M_3(Z) with T^t M_f T = d^2 M_g, found column by column."""
    f, g = _ternary(f), _ternary(g)
    if d < 1:
        raise ValueError("d must be positive")
    return ScaledIsometrySet(d, _rfgd(f, g, d))


@lru_cache(maxsize=128)
def _good_analysis(f: GramForm, g: GramForm, d: int, budget: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, tuple]:
    """Residue of each vector mod d, and the index of the first T making it good (-1 if none)."""
    mats = _rfgd(f, g, d)
    V = _all_vectors(d)
    residues = _values_mod(g, d)
    if not mats:
        return V, residues, np.full(V.shape[0], -1, dtype=np.int64), mats
    arr = np.array(mats, dtype=np.int64) % d
    _, first = np.unique(arr.reshape(len(mats), 9), axis=0, return_index=True)
    first = np.sort(first)
    if V.shape[0] * len(first) > budget:
        raise WorkBudgetError(f"{V.shape[0]} vectors x {len(first)} matrices exceeds the work budget")
    witness = np.full(V.shape[0], -1, dtype=np.int64)
    for idx in first:
        open_ = witness < 0
        if not open_.any():
            break
        hit = ((V[open_] @ arr[idx].T) % d == 0).all(axis=1)
        pos = np.flatnonzero(open_)[hit]
        witness[pos] = idx
    return V, residues, witness, mats


def good_vectors(f: AnyForm, g: AnyForm, d: int, a: int, budget: int = DEFAULT_WORK_BUDGET) -> TransferCertificate:
    f, g = _ternary(f), _ternary(g)
    _check_modulus(d)
    V, residues, witness, mats = _good_analysis(f, g, d, budget)
    sel = np.flatnonzero(residues == a)
    good = sel[witness[sel] >= 0]
    wit = {tuple(int(x) for x in V[i]): mats[witness[i]] for i in good}
    return TransferCertificate(f, g, d, a, len(good), len(sel), wit)


def precedes(f: AnyForm, g: AnyForm, d: int, a: int) -> bool:
    """g precedes f at (d, a): every vector of R(g,d,a) is good."""
    return good_vectors(f, g, d, a).holds


def good_residue_set(f: AnyForm, mates: list[AnyForm], d: int) -> set[int]:
    """Residues a mod d for which every mate precedes f."""
    _check_modulus(d)
    out = set(range(d))
    for m in mates:
        V, residues, witness, _ = _good_analysis(_ternary(f), _ternary(m), d, DEFAULT_WORK_BUDGET)
        bad = set(np.unique(residues[witness < 0]).tolist())
        out -= bad
    return out


@dataclass
class TransferReport:
    f: str
    g: str
    d: int
    a: int
    bound: int
    mismatches: list[int]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_transfer(f: AnyForm, g: AnyForm, d: int, a: int, bound: int) -> TransferReport:
    """Every n <= bound with n = a (mod d) represented by g must be represented by f."""
    sf, sg = build_sieve(f, bound), build_sieve(g, bound)
    n = np.arange(bound + 1)
    bad = (n % d == a % d) & sg.bits & ~sf.bits
    return TransferReport(str(f), str(g), d, a, bound, np.flatnonzero(bad).tolist())
