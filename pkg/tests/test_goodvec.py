import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpu.catalog import R30, R42
from qpu.forms import DiagonalForm, RankError, evaluate, parse_form
from qpu.goodvec import (
    compute_Rfgd,
    compute_Rgda,
    good_residue_set,
    good_vectors,
    precedes,
    verify_transfer,
)
from qpu.local import genus_of

D = DiagonalForm.of
G1_11130 = D(1, 1, 30)


def test_rgda_examples():
    assert compute_Rgda(D(2, 3, 5), 1, 0).vectors == ((0, 0, 0),)
    r = compute_Rgda(D(2, 3, 5), 2, 0).vectors
    assert set(r) == {(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1) if y == z}
    assert compute_Rgda(G1_11130, 7, 3).vectors


def test_rgda_deterministic_order():
    v = compute_Rgda(D(2, 3, 7), 6, 2).vectors
    assert list(v) == sorted(v)


def test_rfgd_examples():
    g = D(2, 3, 5)
    mats = compute_Rfgd(g, g, 1).matrices
    assert ((1, 0, 0), (0, 1, 0), (0, 0, 1)) in mats
    assert compute_Rfgd(D(2, 3, 5), G1_11130, 7).matrices
    with pytest.raises(RankError):
        compute_Rfgd(D(1, 1, 1, 1), G1_11130, 7)


def _check_isometry(f, g, d, T):
    Mf = np.array(f.gram().entries)
    Mg = np.array(g.gram().entries)
    T = np.array(T)
    return np.array_equal(T.T @ Mf @ T, d * d * Mg)


@pytest.mark.parametrize("f,g,d", [(D(2, 3, 5), G1_11130, 7), (D(2, 3, 14), parse_form("[[1,0,0],[0,10,4],[0,4,10]]"), 4)])
def test_rfgd_exact_and_closed(f, g, d):
    mats = compute_Rfgd(f, g, d).matrices
    s = set(mats)
    for T in mats:
        assert _check_isometry(f, g, d, T)
        assert tuple(tuple(-x for x in row) for row in T) in s
        # left composition with sign automorphisms of the diagonal f
        for signs in ((-1, 1, 1), (1, -1, 1), (1, 1, -1)):
            assert tuple(tuple(sg * x for x in row) for sg, row in zip(signs, T)) in s


def test_good_vectors_examples(g1_23514):
    g = D(2, 3, 5)
    c = good_vectors(g, g, 1, 0)
    assert c.good_count == c.total_count == 1
    c = good_vectors(D(2, 3, 5), G1_11130, 7, 0)
    assert c.good_count == c.total_count > 0
    c = good_vectors(D(2, 3, 14), g1_23514, 8, 3)
    assert c.holds and c.total_count == 128


def test_witnesses_valid():
    f, g, d, a = D(2, 3, 5), G1_11130, 7, 3
    c = good_vectors(f, g, d, a)
    for v, T in c.witnesses.items():
        assert _check_isometry(f, g, d, T)
        assert all(x % d == 0 for x in np.array(v) @ np.array(T).T)
        assert evaluate(g, v) % d == a


def test_precedes_examples():
    for a in (0, 3, 5, 6):
        assert precedes(D(2, 3, 5), G1_11130, 7, a)
    assert precedes(D(2, 3, 5), D(2, 3, 5), 1, 0)
    # a = 1 is not asserted; the enumeration fixes it one way or the other
    assert isinstance(precedes(D(2, 3, 5), G1_11130, 7, 1), bool)


def test_good_counts_bounded():
    for a in range(7):
        c = good_vectors(D(2, 3, 5), G1_11130, 7, a)
        assert 0 <= c.good_count <= c.total_count
        assert c.holds == (c.good_count == c.total_count)


def test_good_residue_sets():
    f = D(2, 3, 7)
    mates = list(genus_of(f).mates)
    assert good_residue_set(f, mates, 30) == set(R30)
    assert good_residue_set(f, mates, 42) == set(R42)
    assert good_residue_set(f, [], 12) == set(range(12))


def test_verify_transfer_examples(g1_23514):
    assert verify_transfer(D(2, 3, 5), G1_11130, 7, 0, 10**4).ok
    assert verify_transfer(D(2, 3, 14), g1_23514, 32, 12, 10**4).ok
    assert verify_transfer(D(2, 3, 5), D(2, 3, 5), 1, 0, 100).ok


def test_transfer_fails_without_relation():
    # outside the good residues the inclusion can fail; for <2,3,5> at d = 7 it does at a = 2
    f = D(2, 3, 5)
    bad = [a for a in range(7) if not verify_transfer(f, G1_11130, 7, a, 2000).ok]
    assert bad and all(not precedes(f, G1_11130, 7, a) for a in bad)


def test_certificate_json_deterministic():
    c1 = good_vectors(D(2, 3, 5), G1_11130, 7, 5).to_json()
    c2 = good_vectors(D(2, 3, 5), G1_11130, 7, 5).to_json()
    assert c1 == c2
    data = json.loads(c1)
    assert data["precedes"] is True and data["good_count"] == data["total_count"] == len(data["witnesses"])


def test_modulus_limits():
    with pytest.raises(ValueError):
        compute_Rgda(D(2, 3, 5), 0, 0)
    with pytest.raises(ValueError):
        compute_Rgda(D(2, 3, 5), 5, 5)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([D(2, 3, 5), G1_11130, D(2, 3, 7), parse_form("[[2,1,1],[1,3,1],[1,1,9]]")]), st.integers(1, 14))
def test_partition(g, d):
    sets = [set(compute_Rgda(g, d, a).vectors) for a in range(d)]
    assert sum(len(s) for s in sets) == d**3
    assert len(set().union(*sets)) == d**3
