import math

import pytest
from hypothesis import given, strategies as st

from coxsys.asymptotics import (
    CHAIN_NAMES,
    DELTA,
    EULER_GAMMA,
    Comparison,
    bound_chain,
    fill_bound,
    landau_ratio,
    landau_table,
    ln_index_bound,
    systole_count_comparison,
    totient_primorials,
)
from coxsys.errors import CoxsysError
from coxsys.numberfield import totient

from oracles import totient_sieve


def test_primorials_match_sieve(frozen):
    rows = totient_primorials(6)
    assert [[r.q, r.phi] for r in rows] == frozen["primorials"]
    assert [r.q for r in rows[:3]] == [6, 30, 210]


def test_primorial_totients_beyond_sieve():
    for r in totient_primorials(12):
        assert r.phi == totient(r.q)


def test_landau_matches_oracle(frozen):
    got = [row["ratio"] for row in landau_table(6)]
    for g, w in zip(got, frozen["landau"]):
        assert abs(g - w) <= 1e-12 * abs(w)


def test_landau_limit_is_exp_minus_gamma():
    assert landau_table(1)[0]["limit"] == pytest.approx(0.5614594835668851, rel=1e-15)


def test_delta_constants(frozen):
    assert DELTA == pytest.approx(frozen["delta"], rel=1e-14)
    assert abs(DELTA - 9.4246) < 1e-4
    assert abs(6 * DELTA - 56.547) < 1e-3
    assert DELTA ** 2 == pytest.approx(144 * math.exp(-EULER_GAMMA) * math.log(3), rel=1e-12)
    assert 9.5 == 57 / 6 and 9.5 > DELTA


def test_index_bound_k6():
    ln_delta = ln_index_bound(6, 2)
    assert ln_delta / math.log(3) == pytest.approx(1728)
    assert ln_delta / math.log(10) == pytest.approx(824.5, abs=0.05)


def test_bound_chain_report_shape():
    rep = bound_chain(10)
    assert [row["k"] for row in rep["rows"][:3]] == [6, 30, 210]
    assert set(rep["summary"]) == set(CHAIN_NAMES)
    for row in rep["chain"]:
        for c in row["comparisons"]:
            assert c["status"] != "INDETERMINATE"
            assert abs(c["margin"]) >= 1e3 * 1e-9 * max(abs(c["lhs"]), abs(c["rhs"]), 1.0)


def test_bound_chain_rejects_small_delta_plus():
    with pytest.raises(CoxsysError):
        bound_chain(3, delta_plus=9.0)


def test_comparison_status():
    assert Comparison("x", 2.0, 1.0).status == "HOLDS"
    assert Comparison("x", 1.0, 2.0).status == "FAILS"
    assert Comparison("x", 1.0, 1.0 + 1e-10).status == "INDETERMINATE"


def test_fill_bound():
    assert fill_bound(10 ** 6) == pytest.approx(15607799.16, rel=1e-9)
    with pytest.raises(CoxsysError) as err:
        fill_bound(15)
    assert err.value.code == "DOMAIN"
    with pytest.raises(CoxsysError):
        systole_count_comparison(10, 4)


def test_systole_count_comparison_large_genus():
    assert systole_count_comparison(10 ** 6, 6).status == "HOLDS"


@given(st.integers(3, 3000))
def test_landau_ratio_positive_and_bounded(q):
    phi = totient_sieve(q)[q]
    r = landau_ratio(q, phi)
    assert r < math.log(math.log(q)) + 1e-12
    if q > 15:
        assert r > 0
