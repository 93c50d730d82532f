import itertools
import math
import random

import numpy as np
import pytest

from coxsys.ball import ball_enumerate
from coxsys.coxeter import commuting_subset, reduce, wk_matrix
from coxsys.errors import CoxsysError
from coxsys.numberfield import compare_linf, make_context
from coxsys.tits import (
    ball_norm_check,
    element_order,
    f_product_check,
    gram,
    product_norm_sample,
    rho,
    tits_rep,
    verify_relations,
)


def _column(mat, j):
    return [mat.entry(i, j) for i in range(6)]


def _float_value(coeffs, c):
    return sum(a * c ** t for t, a in enumerate(coeffs))


@pytest.mark.parametrize("k", range(3, 9))
def test_gram_determinant_three_ways(k, frozen):
    g = gram(k)
    assert g.agree
    assert any(g.det_elimination)
    ctx = make_context(k)
    want = frozen["gramDetEmbeddings"][str(k)]
    got = [_float_value(g.det_elimination, cv) for cv in ctx.embeddings]
    assert sorted(got) == pytest.approx(sorted(want), rel=1e-9)


def test_gram_det_k3_is_minus_100():
    assert gram(3).det_elimination == (-100,)


def test_gram_det_k4_value():
    c = math.sqrt(2)
    det = gram(4).det_elimination
    assert _float_value(det, c) == pytest.approx(-4 * c ** 3 * (2 - c) * (4 + c) ** 2)
    assert _float_value(det, c) == pytest.approx(-194.3, abs=0.1)


@pytest.mark.parametrize("k", range(3, 31))
def test_gram_nondegenerate(k):
    assert any(gram(k).det_elimination)


@pytest.mark.parametrize("k", [3, 4, 5, 7])
def test_reflection_columns(k):
    ctx = make_context(k)
    zero, one = ctx.zero, ctx.one
    for i in range(6):
        r = rho((i,), k)
        col_i = _column(r, i)
        assert col_i == [ctx.scalar(-1) if x == i else zero for x in range(6)]
        assert _column(r, (i + 1) % 6) == [one if x == (i + 1) % 6 else zero for x in range(6)]
        col = _column(r, (i + 2) % 6)
        assert col[(i + 2) % 6] == one
        assert col[i] == ctx.gen
        assert all(col[x] == zero for x in range(6) if x not in (i, (i + 2) % 6))


def test_rho_empty_is_identity():
    assert rho((), 5).is_identity()


@pytest.mark.parametrize("k", range(3, 9))
def test_relations(k):
    rep = verify_relations(k)
    assert rep["pass"] and rep["relations"] == 18


@pytest.mark.parametrize("k", range(3, 9))
def test_order_of_s1s3_is_exactly_k(k):
    t = rho((0, 2), k)
    powers = [t ** ell for ell in range(1, k + 1)]
    assert powers[-1].is_identity()
    assert not any(p.is_identity() for p in powers[:-1])


def test_element_order_examples():
    assert element_order((0, 1), 4, 10) == 2
    for k in (3, 4, 7):
        assert element_order((0, 2), k, 50) == k
    assert element_order((0, 3), 4, 100) is None
    assert element_order((), 4, 1) == 1
    with pytest.raises(CoxsysError):
        element_order((0,), 4, 0)


def test_determinant_sign_on_ball():
    rep = tits_rep(4)
    ball = ball_enumerate(4, 4, use_cache=False)
    for idx in range(len(ball)):
        word = ball.word(idx)
        det = rep.rho(word).determinant()
        assert det == rep.ctx.scalar((-1) ** len(word))
        assert len(word) == ball.depths[idx]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_isometry_on_ball(k):
    rep = tits_rep(k)
    ball = ball_enumerate(k, 4, use_cache=False)
    G = rep.G.astype(np.int64)
    for m in ball.matrices:
        lhs = rep.mul(rep.mul(m.transpose(0, 2, 1).copy(), G), m)
        assert np.array_equal(lhs, G)


def test_faithfulness_proxy():
    # distinct canonical reduced words of length <= 4 give distinct matrices
    M = wk_matrix(4)
    rep = tits_rep(4)
    canon = {}
    for n in range(5):
        for w in itertools.product(range(6), repeat=n):
            r = reduce(w, M).word
            if len(r) == n:
                canon.setdefault(r, rep.rho(r))
    keys = {m.key() for m in canon.values()}
    assert len(keys) == len(canon)
    assert len(canon) == ball_enumerate(4, 4, use_cache=False).sizes[-1]


def _random_word(rng, letters, n):
    return tuple(rng.choice(letters) for _ in range(n))


def test_centralizer_sampling_full():
    # I = {s1, s3}, t = s2: every s in I commutes with t
    M = wk_matrix(4)
    assert commuting_subset(M, {0, 2}, 1) == {0, 2}
    rng = random.Random(3)
    t = rho((1,), 4)
    for _ in range(50):
        w = rho(_random_word(rng, [0, 2], rng.randint(1, 10)), 4)
        assert w * t == t * w


def test_centralizer_sampling_proper():
    # I = {s2, s4, s5}, t = s3: I(t) = {s2, s4}; s5 in the support breaks commutation
    k = 4
    M = wk_matrix(k)
    assert commuting_subset(M, {1, 3, 4}, 2) == {1, 3}
    rng = random.Random(5)
    t = rho((2,), k)
    seen_both = set()
    for _ in range(200):
        w = reduce(_random_word(rng, [1, 3, 4], rng.randint(1, 10)), M).word
        commutes = rho(w, k) * t == t * rho(w, k)
        assert commutes == (4 not in w)
        seen_both.add(commutes)
    assert seen_both == {True, False}


@pytest.mark.parametrize("k", [4, 5, 6])
def test_gal_entry_sampling(k):
    # conjugates of blue pairs by red words keep the Coxeter order
    rng = random.Random(k)
    red, blue = [0, 2, 4], [1, 3, 5]
    M = wk_matrix(k)
    for _ in range(30):
        t, u = rng.sample(blue, 2)
        w = _random_word(rng, red, rng.randint(0, 6))
        winv = tuple(reversed(w))
        sigma = winv + (t,) + w
        tau = winv + (u,) + w
        m = M.m(t, u)
        assert element_order(sigma + tau, k, 2 * k + 2) == m


def test_f_single_letter():
    for i in range(6):
        ok, coeff = f_product_check((i,), 4)
        assert ok and coeff == make_context(4).one


def test_f_product_examples():
    ctx = make_context(4)
    ok, coeff = f_product_check((0, 2), 4)
    assert ok and coeff == tuple(-x for x in ctx.gen)
    ok, coeff = f_product_check((0, 3, 0), 4)
    assert ok and coeff == ctx.scalar(4)
    ok, coeff = f_product_check((0, 1), 4)
    assert coeff == ctx.zero


def test_rho_s1_minus_identity_norm():
    # in E-coordinates rho(s1) - 1 = -E_{1,1}, so the norm is 1
    rep = tits_rep(4)
    coords = rep.e_coordinates(rho((0,), 4).minus_identity())
    flat = [tuple(coords[i][j]) for i in range(6) for j in range(6)]
    nonzero = [(divmod(n, 6), x) for n, x in enumerate(flat) if any(x)]
    assert nonzero == [((0, 0), rep.ctx.scalar(-1))]
    # the raw entries of rho(s1) - 1 are the Gram row, of norm 2
    raw = rho((0,), 4).minus_identity()
    row = [tuple(int(raw[t, 0, j]) for t in range(rep.d)) for j in range(6)]
    assert max(compare_linf(x, 2, rep.ctx) for x in row) == 0
    assert all(compare_linf(x, 3, rep.ctx) < 0 for x in row)


@pytest.mark.parametrize("k", [4, 5, 7])
def test_product_norm_sampling(k):
    rep = product_norm_sample(k, trials=300, max_len=12, seed=k)
    assert rep["failures"] == 0 and rep["maxRatio"] <= 1.0 + 1e-12


def test_ball_norm_bound_k4(ball_k4_r6):
    rep = ball_norm_check(4, 6, ball=ball_k4_r6)
    assert rep["checked"] == len(ball_k4_r6) - 1
    assert rep["failures"] == 0 and rep["maxRatio"] < 1
