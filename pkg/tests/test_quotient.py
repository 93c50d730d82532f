import random

import numpy as np
import pytest

from coxsys.errors import CoxsysError
from coxsys.quotient import (
    PrimeDatum,
    QuotientDatum,
    closure_order,
    log3_index_bound,
    perm_mul,
    quotient_order,
    schreier_sims,
)


def _transposition(n, a, b):
    p = np.arange(n)
    p[a], p[b] = b, a
    return p


def _commuting_transpositions():
    return QuotientDatum(4, [_transposition(12, 2 * i, 2 * i + 1) for i in range(6)], label="toy")


def _symmetric_generators(n):
    cycle = np.roll(np.arange(n), -1)
    return [_transposition(n, 0, 1), cycle]


def test_toy_datum_orders_agree():
    d = _commuting_transpositions()
    assert d.validate()
    rep = quotient_order(d, seeds=[0, 1, 2])
    assert rep.order == 64 and rep.closure_order == 64
    assert rep.to_json()["membership"] == "100/100"


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_schreier_sims_symmetric_group(n):
    gens = _symmetric_generators(n)
    orders = {schreier_sims(gens, seed=s).order for s in range(4)}
    fact = 1
    for i in range(2, n + 1):
        fact *= i
    assert orders == {fact}
    assert closure_order(gens) == fact


def test_schreier_sims_membership():
    gens = [np.array([1, 0, 2, 3, 4]), np.array([0, 1, 3, 4, 2])]   # S2 x A3
    chain = schreier_sims(gens, seed=5)
    assert chain.order == 6
    assert chain.contains(perm_mul(gens[0], gens[1]))
    assert not chain.contains(np.array([0, 1, 3, 2, 4]))


def test_random_product_of_generators_is_member():
    gens = _symmetric_generators(6)
    chain = schreier_sims(gens, seed=1)
    rng = random.Random(0)
    g = np.arange(6)
    for _ in range(50):
        g = perm_mul(g, gens[rng.randrange(2)])
        assert chain.contains(g)


def test_closure_cap():
    assert closure_order(_symmetric_generators(7), cap=100) is None


def test_prime_datum_k3_p2():
    d = PrimeDatum(3, 2)
    assert d.validate()
    rep = quotient_order(d, seeds=[0, 1, 2])
    assert rep.order == 576 and rep.closure_order == 576


def test_prime_datum_k4_p2():
    rep = quotient_order(PrimeDatum(4, 2), seeds=[0, 1])
    assert rep.order == 64 and rep.closure_order == 64


def test_unsupported_modulus():
    with pytest.raises(CoxsysError) as err:
        PrimeDatum(3, 9)
    assert err.value.code == "UNSUPPORTED_MODULUS"


def test_invalid_datum():
    n = 4
    bad = QuotientDatum(4, [np.arange(n)] + [_transposition(n, 0, 1)] * 5)
    with pytest.raises(CoxsysError) as err:
        bad.validate()
    assert err.value.code == "INVALID_DATUM"


def test_malformed_datum():
    with pytest.raises(CoxsysError):
        QuotientDatum(4, [np.arange(3)] * 5)


def test_index_bound():
    assert log3_index_bound(6) == 1728
    assert log3_index_bound(3) == 72 * 3 * 2
