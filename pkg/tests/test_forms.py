import pytest
from hypothesis import given, strategies as st

from qpu.forms import (
    AsymmetricMatrixError,
    DiagonalForm,
    DimensionMismatchError,
    GramForm,
    MalformedFormError,
    NonPositiveCoefficientError,
    NotPositiveDefiniteError,
    RankError,
    bareiss_det,
    evaluate,
    parse_form,
    sub_multisets,
)
from qpu.sieve import represents


def test_parse_diagonal_sorted():
    f = parse_form("2,3,5,14")
    assert isinstance(f, DiagonalForm)
    assert f.coeffs == (2, 3, 5, 14)
    assert parse_form("14, 5,3,2") == f
    assert parse_form("<2,3,5,14>") == f
    assert str(f) == "2,3,5,14"


def test_parse_single():
    assert parse_form("1") == DiagonalForm((1,))


def test_parse_matrix():
    g = parse_form("[[1,0,0],[0,10,4],[0,4,10]]")
    assert isinstance(g, GramForm)
    assert g.entries == ((1, 0, 0), (0, 10, 4), (0, 4, 10))
    assert g.det == 84
    assert str(g) == "[[1,0,0],[0,10,4],[0,4,10]]"
    assert parse_form(str(g)) == g


@pytest.mark.parametrize(
    "text,err",
    [
        ("0,2,3", NonPositiveCoefficientError),
        ("-1,2", NonPositiveCoefficientError),
        ("[[1,2],[0,1]]", AsymmetricMatrixError),
        ("[[1,2],[2,1]]", NotPositiveDefiniteError),
        ("[[1,0],[0,0]]", NotPositiveDefiniteError),
        ("2,,3", MalformedFormError),
        ("abc", MalformedFormError),
        ("", MalformedFormError),
        ("[[1,0],[0]]", MalformedFormError),
        ("1,1,1,1,1,1,1,1,1", RankError),
    ],
)
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_form(text)


def test_error_kinds_distinct():
    kinds = {NonPositiveCoefficientError, AsymmetricMatrixError, NotPositiveDefiniteError, MalformedFormError}
    assert len(kinds) == 4
    for k in kinds:
        assert issubclass(k, ValueError)


def test_evaluate_examples(g1_23514):
    assert evaluate(DiagonalForm.of(2, 3, 4, 5), (1, 0, 0, 0)) == 2
    assert evaluate(g1_23514, (0, 1, 1)) == 28
    assert evaluate(DiagonalForm.of(2, 2, 3), (1, 1, 2)) == 16


def test_evaluate_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        evaluate(DiagonalForm.of(2, 3), (1, 2, 3))


def test_diagonal_embeds_as_gram():
    f = DiagonalForm.of(2, 3, 5)
    g = f.gram()
    assert g.entries == ((2, 0, 0), (0, 3, 0), (0, 0, 5))
    assert g.is_diagonal() and g.det == f.det == 30


def test_bareiss():
    assert bareiss_det([[2, 1, 1], [1, 3, 1], [1, 1, 9]]) == 42
    assert bareiss_det([[0, 1], [1, 0]]) == -1


def test_sub_multisets_examples():
    assert sub_multisets(DiagonalForm.of(2, 3)) == [DiagonalForm.of(2), DiagonalForm.of(3)]
    assert sub_multisets(DiagonalForm.of(2, 2, 3)) == [
        DiagonalForm.of(2), DiagonalForm.of(3), DiagonalForm.of(2, 2), DiagonalForm.of(2, 3)
    ]
    subs = sub_multisets(DiagonalForm.of(2, 3, 6, 7, 19, 20))
    # six distinct coefficients: 2^6 - 2 subsets, none duplicated
    assert len(subs) == 62
    assert DiagonalForm.of(2, 3, 6, 7, 20) in subs


def test_sub_multisets_rank_one():
    with pytest.raises(RankError):
        sub_multisets(DiagonalForm.of(5))


coeffs = st.lists(st.integers(1, 30), min_size=1, max_size=5)


@given(coeffs, st.data())
def test_evaluate_even_and_scaling(cs, data):
    f = DiagonalForm(tuple(cs))
    x = data.draw(st.lists(st.integers(-20, 20), min_size=f.rank, max_size=f.rank))
    v = evaluate(f, x)
    assert v == evaluate(f, [-t for t in x])
    assert v >= 0 and (v == 0) == all(t == 0 for t in x)
    c = data.draw(st.integers(1, 9))
    assert evaluate(f.scaled(c), x) == c * v
    assert evaluate(f.gram(), x) == v


@given(st.lists(st.integers(1, 12), min_size=2, max_size=4), st.integers(0, 300))
def test_subform_values_lift(cs, n):
    f = DiagonalForm(tuple(cs))
    for g in sub_multisets(f):
        if represents(g, n):
            assert represents(f, n)
