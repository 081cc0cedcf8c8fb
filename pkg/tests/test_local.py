import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from qpu.forms import DiagonalForm, parse_form
from qpu.local import (
    genus_of,
    genus_represents,
    genus_sieve,
    _table_brute,
    _table_diagonal,
    local_represents,
    local_table,
    ord_p,
    parse_genus_line,
    prime_divisors,
)
from qpu.sieve import build_sieve, represents

D = DiagonalForm.of


def test_examples():
    assert local_represents(D(1, 1, 1), 0, 2)
    assert not local_represents(D(1, 1, 1), 7, 2)
    assert local_represents(D(2, 3, 5), 1, 5)
    assert local_represents(parse_form("[[2,1,1],[1,3,1],[1,1,9]]"), 0, 7)


def test_sum_of_three_squares_at_two():
    # n is a sum of three 2-adic squares iff n is not 4^s(8t+7)
    for n in range(1, 600):
        m = n
        while m % 4 == 0:
            m //= 4
        assert local_represents(D(1, 1, 1), n, 2) == (m % 8 != 7)


@pytest.mark.parametrize(
    "coeffs,p", [((1, 1, 1), 2), ((2, 3, 5), 5), ((1, 2), 3), ((3, 5), 2), ((2, 3, 6), 3), ((1, 1, 2), 2), ((1, 3, 6), 2), ((3, 6), 3)]
)
def test_diagonal_table_matches_brute_force(coeffs, p):
    f = D(*coeffs)
    fast = _table_diagonal(f.coeffs, p)
    slow = _table_brute(f.gram().entries, f.det, p)
    assert fast == slow


def test_genus_examples(genera):
    g235 = genus_of(D(2, 3, 5))
    assert len(g235.members) == 2
    assert genus_represents(g235, 1)
    assert not genus_represents(genus_of(D(2, 2, 2)), 14)
    for g in genera.values():
        assert genus_represents(g, 0)


def test_genus_table(genera):
    assert len(genera) == 18
    g = genus_of(D(2, 3, 7))
    assert g.class_number == 3 and len(g.mates) == 2
    assert genus_of(D(3, 5, 35)).inferred
    assert not genus_of(D(3, 5, 21)).inferred
    for rep, g in genera.items():
        assert len(g.members) == g.class_number
        for m in g.mates:
            assert m.det == rep.det


def test_parse_genus_line():
    g = parse_genus_line("2,3,5 | [[1,0,0],[0,1,0],[0,0,30]] | 2 | note")
    assert g.representative == D(2, 3, 5) and len(g.mates) == 1
    with pytest.raises(ValueError):
        parse_genus_line("2,3,5 | - | 2 | class number disagrees with the member count")


def test_ord_p():
    assert ord_p(48, 2) == 4 and ord_p(7, 3) == 0
    assert prime_divisors(2 * 84) == [2, 3, 7]


@pytest.mark.parametrize("rep", [D(2, 3, 5), D(2, 3, 14), D(3, 5, 21), D(3, 5, 35), D(2, 3, 7)])
def test_local_global_on_genus(rep):
    g = genus_of(rep)
    B = 10**4
    glob = genus_sieve(g, B)
    ps = prime_divisors(2 * rep.det)
    loc = np.array([all(local_represents(rep, n, p) for p in ps) for n in range(B + 1)])
    assert np.array_equal(glob, loc)


@pytest.mark.parametrize(
    "rep", [D(2, 2, 2), D(2, 2, 3), D(2, 3, 3), D(2, 3, 6), D(2, 4, 4), D(2, 4, 6), D(2, 4, 10), D(2, 4, 12)]
)
def test_class_number_one_collapse(rep):
    g = genus_of(rep)
    assert g.class_number == 1
    B = 10**4
    sv = build_sieve(rep, B).bits
    assert np.array_equal(genus_sieve(g, B), sv)
    ps = prime_divisors(2 * rep.det)
    loc = np.array([all(local_represents(rep, n, p) for p in ps) for n in range(B + 1)])
    assert np.array_equal(loc, sv)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=3), st.sampled_from([2, 3, 5, 7, 11]), st.integers(0, 1000))
def test_global_implies_local(coeffs, p, n):
    f = DiagonalForm(tuple(coeffs))
    # keep the p-adic tables small
    assume(ord_p(f.det, p) <= (3 if p == 2 else 2 if p == 3 else 1))
    if represents(f, n):
        assert local_represents(f, n, p)
