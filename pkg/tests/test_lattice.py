import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from qpu.forms import GramForm, NotPositiveDefiniteError, evaluate
from qpu.lattice import box_bounds, short_vector_values, vectors_of_norm


def _brute(entries, bound):
    bb = box_bounds(entries, bound)
    out = set()
    for x in itertools.product(*(range(-b, b + 1) for b in bb)):
        v = sum(entries[i][j] * x[i] * x[j] for i in range(len(x)) for j in range(len(x)))
        if v <= bound:
            out.add(v)
    return out


def test_values_match_box_enumeration(g2_237):
    got = set(np.flatnonzero(short_vector_values(g2_237.entries, 300)).tolist())
    assert got == _brute(g2_237.entries, 300)


def test_vectors_of_norm_exact(g1_23514):
    vs = vectors_of_norm(g1_23514.entries, 28)
    assert (0, 1, 1) in vs and (0, -1, -1) in vs
    assert all(evaluate(g1_23514, v) == 28 for v in vs)
    bb = box_bounds(g1_23514.entries, 28)
    brute = [x for x in itertools.product(*(range(-b, b + 1) for b in bb)) if evaluate(g1_23514, x) == 28]
    assert sorted(brute) == sorted(vs)


@st.composite
def ternary(draw):
    while True:
        a, b, c = (draw(st.integers(1, 8)) for _ in range(3))
        d, e, f = (draw(st.integers(-3, 3)) for _ in range(3))
        try:
            return GramForm(((a, d, e), (d, b, f), (e, f, c)))
        except NotPositiveDefiniteError:
            continue


@settings(max_examples=40, deadline=None)
@given(ternary(), st.integers(1, 120))
def test_random_ternary_values(g, bound):
    got = set(np.flatnonzero(short_vector_values(g.entries, bound)).tolist())
    assert got == _brute(g.entries, bound)
    assert 0 in got
