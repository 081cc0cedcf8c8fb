import numpy as np
import pytest

from qpu.catalog import R30
from qpu.forms import DiagonalForm, parse_form
from qpu.goodvec import good_residue_set
from qpu.local import genus_of
from qpu.prooflib import (
    MateTransferClaim,
    ScriptFormatError,
    SieveBoundError,
    builtin_scripts,
    builtin_transfer_claims,
    load_script_text,
    parse_guard,
    parse_rule,
    script_by_name,
    verify_mate_transfer,
    verify_proof_script,
    verify_scripts,
)
from qpu.sieve import build_sieve

D = DiagonalForm.of

SCRIPT_2345 = """
[plain 2,3,4,5]
form = 2,3,4,5
target = 2,3,4
terms = 5
modulus = 64
safe = even
       avoid 4^s(16t+10)
base = 127
table = 1: 1,3 mod 8; 7 mod 16; 21 mod 64
        5: 13,45 mod 64
        3: otherwise
"""


@pytest.fixture(scope="module")
def sieve_234():
    return build_sieve(D(2, 3, 4), 10**5)


def test_2345_script(sieve_234):
    (s,) = load_script_text(SCRIPT_2345)
    assert s.table()[1] == (1,) and s.table()[13] == (5,) and s.table()[5] == (3,)
    rep = verify_proof_script(s, sieve_234, 10**5)
    assert rep.ok, rep.summary()
    assert rep.primes_checked > 9000


def test_literal_fixed_subtraction_fails():
    # subtracting 17 * 6^2 from every prime: p = 613 leaves n = 1, which <2,2,3> misses
    text = """
[fixed]
form = 2,2,3,17
target = 2,2,3
terms = 17*36
modulus = 1
safe = avoid 8t+1
       avoid 9^s(9t+6)
base = 613
exceptions = 41
table = 1: otherwise
"""
    (s,) = load_script_text(text)
    rep = verify_proof_script(s, bound=5000)
    assert not rep.ok
    assert (613, 1) in rep.prime_failures
    assert rep.unsafe_classes == [(0, 0)]


def test_transcribed_2_2_3_17_holds():
    rep = verify_proof_script(script_by_name("2,2,3,17"), bound=10**5)
    assert rep.ok, rep.summary()


def test_empty_table_coverage():
    (s,) = load_script_text("[empty]\nform = 2,3\ntarget = 2,3\nterms = 1\nmodulus = 1\nsafe = even\nbase = 3\n")
    rep = verify_proof_script(s, bound=100)
    assert rep.coverage_gaps == [0] and not rep.ok


def test_sieve_bound_error(sieve_234):
    (s,) = load_script_text(SCRIPT_2345)
    with pytest.raises(SieveBoundError):
        verify_proof_script(s, sieve_234, bound=100)
    with pytest.raises(SieveBoundError):
        verify_proof_script(s, sieve_234, bound=2 * 10**5)


def test_unsafe_table_reported(sieve_234):
    (s,) = load_script_text(SCRIPT_2345.replace("3: otherwise", "1: otherwise"))
    rep = verify_proof_script(s, sieve_234, 10**4)
    assert rep.unsafe_classes and not rep.ok


def test_prefix_exceptions_checked():
    s = script_by_name("2,3,6,7")
    assert s.exceptions == frozenset({23, 47, 67})
    rep = verify_proof_script(s, bound=10**5)
    assert rep.ok and rep.prefix_failures == []


def test_format_errors():
    with pytest.raises(ScriptFormatError):
        parse_guard("between 3 and 4")
    with pytest.raises(ScriptFormatError):
        parse_rule("1 1 mod 8")
    with pytest.raises(ScriptFormatError):
        load_script_text(SCRIPT_2345.replace("21 mod 64", "21 mod 48"))
    with pytest.raises(ScriptFormatError):
        load_script_text(SCRIPT_2345.replace("terms = 5", "terms = 5 7"))


def test_guards():
    g = parse_guard("not mod 32: 0,6,22,24")
    assert not g.holds(38) and g.holds(7)
    assert parse_guard("coprime 6").holds(25)
    fam = parse_guard("avoid 4^s(16t+10)")
    assert not fam.holds(40) and fam.holds(8)
    assert fam.class_safe(8, 64) and not fam.class_safe(10, 64)
    assert str(parse_guard("mod 3: 1,2")) == "mod 3: 1,2"


@pytest.fixture(scope="module")
def builtin_reports():
    return {r.name: r for r in verify_scripts(builtin_scripts(), 10**6)}


def test_builtin_scripts_verify(builtin_reports):
    assert len(builtin_reports) == len(builtin_scripts()) >= 60
    bad = [r.summary() for r in builtin_reports.values() if not r.ok]
    assert not bad


def test_verification_order_independent():
    ss = [script_by_name(n) for n in ("2,3,4,5", "2,3,5,14", "2,3,3,4")]
    a = [r.to_dict() for r in verify_scripts(ss, 10**5)]
    b = [r.to_dict() for r in verify_scripts(ss[::-1], 10**5)][::-1]
    assert a == b


def test_m30_safe_set_matches_good_residues():
    g = D(2, 3, 7)
    B = 10**4
    s = script_by_name("2,3,7,9")
    res = good_residue_set(g, list(genus_of(g).mates), 30)
    assert res == set(R30)
    n = np.arange(B + 1)
    direct = np.isin(n % 30, sorted(res)) & ~np.isin(n % 32, [0, 6, 22, 24])
    assert np.array_equal(s.safe.mask(B), direct)
    # and g represents all of it
    sv = build_sieve(g, B).bits
    assert not (direct & ~sv).any()


def test_mate_transfer_examples():
    claims = {c.name: c for c in builtin_transfer_claims()}
    assert len(claims) == 5
    for c in claims.values():
        r = verify_mate_transfer(c)
        assert r.ok and r.checked > 0
    g = D(3, 5, 21)
    assert verify_mate_transfer(MateTransferClaim(g, g, 1, frozenset({0}), 100)).ok


def test_mate_transfer_counterexample():
    # <1,1,30> represents 1 and <2,3,5> does not
    r = verify_mate_transfer(MateTransferClaim(D(2, 3, 5), D(1, 1, 30), 1, frozenset({0}), 200))
    assert 1 in r.counterexamples
    with pytest.raises(ValueError):
        verify_mate_transfer(MateTransferClaim(D(2, 3, 5), D(1, 1, 30), 1, frozenset({0}), 0))


def test_reconstructed_flag():
    assert script_by_name("2,3,4,11").reconstructed
    assert not script_by_name("2,3,4,5").reconstructed
    with pytest.raises(KeyError):
        script_by_name("9,9,9")
