"""The reflection representation of W(k) over Z[c], c = 2cos(pi/k).

A 6x6 matrix over Z[c] is stored as an integer array of shape (d, 6, 6),
meaning sum_j layer[j] * c^j with d the degree of c.  Matrices act on
column vectors in the basis of simple roots, and rho(s_1 ... s_n) is the
product rho(s_1) ... rho(s_n) in reading order.

Coordinates in the basis E_ij (E_ij(x) = B(alpha_j, x) alpha_i): a matrix
A equals a @ G, where G is the Gram matrix, so a = A G^-1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CoxsysError, VerificationError
from .numberfield import compare_linf, linf_enclosure, make_context

N = 6


def _reduce_layers(full, psi, d):
    """Reduce an array of 2d-1 layers modulo psi, in place; return the first d."""
    for t in range(full.shape[0] - 1, d - 1, -1):
        top = full[t]
        if top.any():
            for j in range(d):
                if psi[j]:
                    full[t - d + j] = full[t - d + j] - psi[j] * top
    return full[:d].copy()


class TitsRep:
    """Precomputed data for W(k): Gram matrix, generators, identity."""

    def __init__(self, k, dtype=object):
        self.k = k
        self.ctx = make_context(k)
        self.d = self.ctx.degree
        self.dtype = dtype
        d = self.d
        c = self.ctx.gen
        neg_c = tuple(-x for x in c)
        row_by_dist = {0: self.ctx.scalar(2), 1: self.ctx.zero, 2: neg_c, 3: self.ctx.scalar(-2)}
        self.gram = [[row_by_dist[min((i - j) % N, (j - i) % N)] for j in range(N)]
                     for i in range(N)]
        self.G = self.layers_from_entries(self.gram)
        self.identity = np.zeros((d, N, N), dtype=dtype)
        self.identity[0] = np.eye(N, dtype=int)
        self.gens = []
        for i in range(N):
            g = self.identity.copy()
            g[:, i, :] -= self.G[:, i, :]
            self.gens.append(g)
        self._ginv = None

    # -- layer arithmetic --------------------------------------------------------
    def layers_from_entries(self, entries):
        out = np.zeros((self.d, N, N), dtype=self.dtype)
        for i in range(N):
            for j in range(N):
                for t, v in enumerate(entries[i][j]):
                    out[t, i, j] = v
        return out

    def entries(self, layers):
        return [[tuple(layers[t, i, j] for t in range(layers.shape[0])) for j in range(N)]
                for i in range(N)]

    def mul(self, a, b):
        d = self.d
        dtype = object if object in (a.dtype, b.dtype) else a.dtype
        full = np.zeros((2 * d - 1, N, N), dtype=dtype)
        for i in range(d):
            if not a[i].any():
                continue
            for j in range(d):
                full[i + j] = full[i + j] + a[i] @ b[j]
        return _reduce_layers(full, self.ctx.psi, d)

    def times_c(self, x):
        """Multiply a layered array by c."""
        d = self.d
        out = np.zeros_like(x)
        out[1:] = x[:-1]
        top = x[d - 1]
        for j in range(d):
            if self.ctx.psi[j]:
                out[j] = out[j] - self.ctx.psi[j] * top
        return out

    def right_mul_gen(self, a, i):
        """a @ rho(s_i) by column operations."""
        out = a.copy()
        col = a[:, :, i]
        out[:, :, i] = -col
        cc = self.times_c(col[:, :, None])[:, :, 0]
        for j in ((i + 2) % N, (i - 2) % N):
            out[:, :, j] = out[:, :, j] + cc
        out[:, :, (i + 3) % N] = out[:, :, (i + 3) % N] + 2 * col
        return out

    def rho(self, word):
        m = self.identity.copy()
        for s in word:
            m = self.right_mul_gen(m, s)
        return TitsMatrix(self, m, len(word))

    def is_identity_word(self, word):
        return self.rho(word).is_identity()

    # -- E coordinates -----------------------------------------------------------
    @property
    def gram_inverse(self):
        """G^-1 as a 6x6 array of field elements (Fraction coefficient tuples)."""
        if self._ginv is None:
            ctx = self.ctx
            m = [[tuple(Fraction(v) for v in self.gram[i][j]) for j in range(N)]
                 + [ctx.one if i == j else ctx.zero for j in range(N)] for i in range(N)]
            for col in range(N):
                piv = next(r for r in range(col, N) if any(m[r][col]))
                m[col], m[piv] = m[piv], m[col]
                inv = ctx.inverse(m[col][col])
                m[col] = [ctx.mul(x, inv) for x in m[col]]
                for r in range(N):
                    if r != col and any(m[r][col]):
                        f = m[r][col]
                        m[r] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(m[r], m[col])]
            self._ginv = [row[N:] for row in m]
        return self._ginv

    def e_coordinates(self, layers):
        """Solve a @ G = A exactly; the result must be integral."""
        ctx = self.ctx
        A = self.entries(layers)
        ginv = self.gram_inverse
        out = []
        for i in range(N):
            row = []
            for j in range(N):
                acc = tuple(Fraction(0) for _ in range(self.d))
                for l in range(N):
                    if any(A[i][l]):
                        acc = ctx.add(acc, ctx.mul(A[i][l], ginv[l][j]))
                if any(v.denominator != 1 for v in acc):
                    raise VerificationError("NOT_INTEGRAL", f"E-coordinate ({i},{j}) = {acc}")
                row.append(tuple(int(v) for v in acc))
            out.append(row)
        return out

    def from_e_coordinates(self, coords):
        return self.mul(self.layers_from_entries(coords), self.G)

    def e_step(self, a, i):
        """E-coordinates of rho(w s_i) - 1 from those of rho(w) - 1."""
        out = a.copy()
        col = np.zeros((self.d, N), dtype=a.dtype)
        for l, dist in ((i, 0), ((i + 2) % N, 2), ((i - 2) % N, 2), ((i + 3) % N, 3)):
            if dist == 0:
                col = col + 2 * a[:, :, l]
            elif dist == 2:
                col = col - self.times_c(a[:, :, l][:, :, None])[:, :, 0]
            else:
                col = col - 2 * a[:, :, l]
        out[:, :, i] = out[:, :, i] - col
        out[0, i, i] -= 1
        return out


@lru_cache(maxsize=None)
def tits_rep(k):
    return TitsRep(k)


@dataclass(frozen=True, eq=False)
class TitsMatrix:
    rep: TitsRep
    layers: np.ndarray
    length: int | None = None

    def key(self):
        return tuple(int(v) for v in self.layers.flat)

    def __eq__(self, other):
        return isinstance(other, TitsMatrix) and self.rep.k == other.rep.k \
            and np.array_equal(self.layers, other.layers)

    def __hash__(self):
        return hash(self.key())

    def __mul__(self, other):
        ln = None if self.length is None or other.length is None else self.length + other.length
        return TitsMatrix(self.rep, self.rep.mul(self.layers, other.layers), ln)

    def __pow__(self, n):
        out = TitsMatrix(self.rep, self.rep.identity.copy(), 0)
        for _ in range(n):
            out = out * self
        return out

    def is_identity(self):
        return np.array_equal(self.layers, self.rep.identity)

    def entry(self, i, j):
        return tuple(int(self.layers[t, i, j]) for t in range(self.rep.d))

    def entries(self):
        return self.rep.entries(self.layers)

    def transpose(self):
        return TitsMatrix(self.rep, self.layers.transpose(0, 2, 1).copy(), self.length)

    def minus_identity(self):
        return self.layers - self.rep.identity

    def determinant(self):
        return bareiss_det(self.entries(), self.rep.ctx)

    def to_json(self):
        return [[list(self.entry(i, j)) for j in range(N)] for i in range(N)]


# -- determinants ---------------------------------------------------------------

def bareiss_det(entries, ctx):
    """Fraction-free Gaussian elimination over Z[c]; divisions are exact."""
    m = [list(row) for row in entries]
    n = len(m)
    sign = 1
    prev = ctx.one
    for col in range(n - 1):
        piv = next((r for r in range(col, n) if any(m[r][col])), None)
        if piv is None:
            return ctx.zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        for r in range(col + 1, n):
            for j in range(col + 1, n):
                num = ctx.sub(ctx.mul(p, m[r][j]), ctx.mul(m[r][col], m[col][j]))
                m[r][j] = ctx.divide_exact(num, prev)
            m[r][col] = ctx.zero
        prev = p
    det = m[n - 1][n - 1]
    return det if sign == 1 else tuple(-v for v in det)


def _cube_root_trace(j):
    """w^j + w^2j for w a primitive cube root of unity, computed in Z[w]."""
    # elements a + b*w with w^2 = -1 - w
    def mul(x, y):
        a, b = x
        c, d = y
        return (a * c - b * d, a * d + b * c - b * d)

    w_pow = (1, 0)
    for _ in range(j % 3):
        w_pow = mul(w_pow, (0, 1))
    w2_pow = mul(w_pow, w_pow)
    a, b = w_pow[0] + w2_pow[0], w_pow[1] + w2_pow[1]
    if b != 0:
        raise ArithmeticError("trace is not rational")
    return a


def gram_det_eigen(ctx):
    """Product of the circulant eigenvalues 2 - 2(-1)^j - c (w^j + w^2j)."""
    out = ctx.one
    for j in range(N):
        lam = ctx.sub(ctx.scalar(2 - 2 * (-1) ** j), tuple(_cube_root_trace(j) * v for v in ctx.gen))
        out = ctx.mul(out, lam)
    return out


def gram_det_closed(ctx):
    """-4 c^3 (2 - c) (4 + c)^2."""
    c = ctx.gen
    c3 = ctx.mul(ctx.mul(c, c), c)
    two_minus = ctx.sub(ctx.scalar(2), c)
    four_plus = ctx.add(ctx.scalar(4), c)
    out = ctx.mul(ctx.mul(c3, two_minus), ctx.mul(four_plus, four_plus))
    return tuple(-4 * v for v in out)


@dataclass
class GramReport:
    k: int
    entries: list
    det_elimination: tuple
    det_eigen: tuple
    det_closed: tuple

    @property
    def agree(self):
        return self.det_elimination == self.det_eigen == self.det_closed

    def to_json(self):
        return {"k": self.k, "gram": [[list(e) for e in row] for row in self.entries],
                "det": list(self.det_elimination), "detEigen": list(self.det_eigen),
                "detClosedForm": list(self.det_closed), "agree": self.agree,
                "nonzero": any(self.det_elimination)}


def gram(k):
    rep = tits_rep(k)
    ctx = rep.ctx
    return GramReport(k, rep.gram, bareiss_det(rep.gram, ctx), gram_det_eigen(ctx),
                      gram_det_closed(ctx))


def rho(word, k):
    return tits_rep(k).rho(word)


# -- relations and orders ---------------------------------------------------------

def defining_relations(k):
    rels = []
    for i in range(N):
        rels.append(((i, i), 1))
        rels.append(((i, (i + 1) % N), 2))
        rels.append(((i, (i + 2) % N), k))
    return rels


def verify_relations(k):
    rep = tits_rep(k)
    checked = []
    for (a, b), m in defining_relations(k):
        word = (a,) if a == b else (a, b)
        mat = rep.rho(word) ** (2 if a == b else m)
        if not mat.is_identity():
            raise VerificationError("RELATION_FAILED", f"(s{a + 1} s{b + 1})^{m}", relation=(a, b, m))
        checked.append({"pair": [a + 1, b + 1], "exponent": 2 if a == b else m})
    t = rep.rho((0, 2))
    power = t
    for ell in range(1, k):
        if power.is_identity():
            raise VerificationError("RELATION_FAILED", f"(s1 s3)^{ell} = 1 with {ell} < k")
        power = power * t
    return {"k": k, "relations": len(checked), "orderS1S3": k, "pass": True}


def element_order(word, k, cap):
    """Least n <= cap with rho(word)^n = 1, or None when the cap is exceeded."""
    if cap < 1:
        raise CoxsysError("BAD_CAP", "cap must be >= 1")
    rep = tits_rep(k)
    m = rep.rho(word)
    power = m
    for n in range(1, cap + 1):
        if power.is_identity():
            return n
        power = power * m
    return None


# -- norm bounds ----------------------------------------------------------------

def _cheap_norm_bound(coeffs):
    """Rigorous upper bound for ||x||: every embedding of c has |c_v| < 2."""
    return sum(abs(a) << j for j, a in enumerate(coeffs))


def norm_below(coeffs, bound, ctx):
    """||x|| < bound, using the cheap bound first."""
    if _cheap_norm_bound(coeffs) < bound:
        return True
    return compare_linf(coeffs, bound, ctx) < 0


def e_norm_array_float(layers, ctx):
    """Float value of max_ij ||a_ij|| for a layered coordinate array (informational)."""
    powers = np.array([[cv ** t for t in range(layers.shape[0])] for cv in ctx.embeddings])
    vals = np.tensordot(powers, layers.astype(float), axes=(1, 0))
    return float(np.abs(vals).max())


def matrix_norm_below(coords, bound, ctx):
    return all(norm_below(x, bound, ctx) for row in coords for x in row)


def f_product_check(word, k):
    """Verify F_w = a_w E_{i1, in} and ||a_w|| <= 2^(n-1) for an index word.

    F_w is built as a matrix product; its E-coordinates are then solved for
    and compared with the product of Gram entries along the word.
    """
    rep = tits_rep(k)
    ctx = rep.ctx
    mat = rep.identity.copy()
    for i in word:
        f = np.zeros_like(rep.identity)
        f[:, i, :] = rep.G[:, i, :]
        mat = rep.mul(mat, f)
    coords = rep.e_coordinates(mat)
    expected = ctx.one
    for a, b in zip(word, word[1:]):
        expected = ctx.mul(expected, rep.gram[a][b])
    first, last = word[0], word[-1]
    for i in range(N):
        for j in range(N):
            want = expected if (i, j) == (first, last) else ctx.zero
            if tuple(coords[i][j]) != tuple(want):
                raise VerificationError("BOUND_VIOLATED", f"F_w coordinate mismatch at ({i},{j})")
    n = len(word)
    ok = compare_linf(expected, 2 ** (n - 1), ctx) <= 0
    return ok, expected


def product_norm_sample(k, trials=1000, max_len=12, seed=0):
    rng = random.Random(seed)
    rep = tits_rep(k)
    failures, worst = [], 0.0
    for _ in range(trials):
        n = rng.randint(1, max_len)
        word = tuple(rng.randrange(N) for _ in range(n))
        ok, coeff = f_product_check(word, k)
        ratio = float(linf_enclosure(coeff, rep.ctx)[1]) / 2 ** (n - 1)
        worst = max(worst, ratio)
        if not ok:
            failures.append(word)
    return {"checked": trials, "failures": len(failures), "maxRatio": worst,
            "failed": [list(w) for w in failures[:10]]}


def ball_norm_check(k, radius, ball=None):
    """||rho(w) - 1|| < 3^l(w) for every element of the ball."""
    from .ball import ball_enumerate

    rep = tits_rep(k)
    ctx = rep.ctx
    if ball is None:
        ball = ball_enumerate(k, radius, with_e_coords=True)
    failures, worst = [], 0.0
    checked = 0
    for depth, word, coords in ball.iter_e_coordinates():
        if depth == 0:
            continue
        checked += 1
        bound = 3 ** depth
        entries = [[tuple(int(coords[t, i, j]) for t in range(rep.d)) for j in range(N)]
                   for i in range(N)]
        if not matrix_norm_below(entries, bound, ctx):
            failures.append(word)
        worst = max(worst, e_norm_array_float(coords, ctx) / bound)
    return {"checked": checked, "failures": len(failures), "maxRatio": worst,
            "failed": [list(w) for w in failures[:10]]}


def norm_checks(k, radius, trials=1000, seed=0):
    a = product_norm_sample(k, trials=trials, seed=seed)
    b = ball_norm_check(k, radius)
    report = {"k": k, "radius": radius, "productBound": a, "ballBound": b,
              "pass": a["failures"] == 0 and b["failures"] == 0}
    if not report["pass"]:
        raise VerificationError("BOUND_VIOLATED", str(report), report=report)
    return report
