"""Exact arithmetic in Z[2cos(pi/k)].

Elements are integer coefficient vectors in the power basis 1, c, c^2, ...
of c = 2cos(pi/k), reduced modulo the minimal polynomial ``psi`` of c.
The field embeddings are the real numbers 2cos(m pi/k) with m coprime to
2k and 0 < m < k.  Absolute values of embeddings are bounded rigorously:
interval enclosures of the powers c_v^j are rounded outward to dyadic
integers, after which every evaluation is exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import libmp

from .errors import CoxsysError

DEFAULT_PREC = 64


# -- integer polynomials, constant term first -------------------------------

def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def poly_divmod_monic(p, q):
    """Divide ``p`` by the monic polynomial ``q`` over Z."""
    p = list(p)
    dq = len(q) - 1
    if q[-1] != 1:
        raise ValueError("divisor must be monic")
    if len(p) - 1 < dq:
        return [0], _trim(p)
    quot = [0] * (len(p) - dq)
    for i in range(len(p) - 1, dq - 1, -1):
        t = p[i]
        if t:
            quot[i - dq] = t
            for j in range(dq + 1):
                p[i - dq + j] -= t * q[j]
    return _trim(quot), _trim(p[:dq] or [0])


@lru_cache(maxsize=None)
def cyclotomic(n):
    """Phi_n as a coefficient tuple, by exact division of x^n - 1."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, rem = poly_divmod_monic(num, list(cyclotomic(d)))
            if any(rem):
                raise ArithmeticError(f"Phi_{d} does not divide x^{n}-1")
    return tuple(num)


def totient(n):
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _trace_polys(deg):
    # x^j + x^-j written as a polynomial in y = x + 1/x
    polys = [[2], [0, 1]]
    for _ in range(2, deg + 1):
        prev, cur = polys[-2], polys[-1]
        nxt = [0] + cur
        for i, a in enumerate(prev):
            nxt[i] -= a
        polys.append(nxt)
    return polys


def minimal_polynomial(k):
    """Minimal polynomial of 2cos(pi/k), read off from Phi_{2k}."""
    phi = cyclotomic(2 * k)
    half = (len(phi) - 1) // 2
    basis = _trace_polys(half)
    psi = [0] * (half + 1)
    psi[0] += phi[half]
    for j in range(1, half + 1):
        for i, a in enumerate(basis[j]):
            psi[i] += phi[half + j] * a
    return tuple(psi)


# -- the field context -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldContext:
    k: int
    psi: tuple
    degree: int
    embedding_indices: tuple
    _enclosure_cache: dict = field(default_factory=dict, repr=False)

    def __repr__(self):
        return f"FieldContext(k={self.k}, psi={list(self.psi)})"

    @property
    def embeddings(self):
        """Embedding values 2cos(m pi/k) as floats (informational)."""
        return [2 * math.cos(m * math.pi / self.k) for m in self.embedding_indices]

    # ring operations on raw coefficient tuples
    def reduce(self, p):
        d = self.degree
        p = list(p)
        if len(p) > d:
            for i in range(len(p) - 1, d - 1, -1):
                t = p[i]
                if t:
                    for j in range(d + 1):
                        p[i - d + j] -= t * self.psi[j]
            p = p[:d]
        return tuple(p) + (0,) * (d - len(p))

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def mul(self, x, y):
        return self.reduce(poly_mul(x, y))

    def scalar(self, n):
        return (n,) + (0,) * (self.degree - 1)

    @property
    def zero(self):
        return (0,) * self.degree

    @property
    def one(self):
        return self.scalar(1)

    @property
    def gen(self):
        """Coordinates of c itself."""
        return self.reduce([0, 1])

    def mult_matrix(self, x):
        """Integer matrix of multiplication by ``x`` on the power basis."""
        cols = []
        col = list(x)
        for _ in range(self.degree):
            cols.append(col)
            col = list(self.mul(col, self.gen))
        return [[cols[j][i] for j in range(self.degree)] for i in range(self.degree)]

    def inverse(self, x):
        """Inverse of a nonzero field element, with Fraction coefficients."""
        d = self.degree
        m = [[Fraction(v) for v in row] + [Fraction(int(i == 0))]
             for i, row in enumerate(self.mult_matrix(x))]
        for col in range(d):
            piv = next((r for r in range(col, d) if m[r][col] != 0), None)
            if piv is None:
                raise ZeroDivisionError("element is not invertible")
            m[col], m[piv] = m[piv], m[col]
            pv = m[col][col]
            m[col] = [v / pv for v in m[col]]
            for r in range(d):
                if r != col and m[r][col] != 0:
                    f = m[r][col]
                    m[r] = [a - f * b for a, b in zip(m[r], m[col])]
        return tuple(m[r][d] for r in range(d))

    def divide_exact(self, x, y):
        q = self.mul(x, self.inverse(y))
        if any(v.denominator != 1 for v in q):
            raise ArithmeticError("quotient is not an algebraic integer")
        return tuple(int(v) for v in q)

    def evaluate_float(self, x, m):
        c = 2 * math.cos(m * math.pi / self.k)
        return sum(a * c ** j for j, a in enumerate(x))

    # rigorous embeddings
    def enclosures(self, prec=DEFAULT_PREC):
        """Per embedding, integer bounds (lo_j, hi_j) with lo_j <= 2^prec c_v^j <= hi_j."""
        cached = self._enclosure_cache.get(prec)
        if cached is not None:
            return cached
        ctx = type(mpmath.iv)()
        ctx.prec = prec + 32
        out = []
        for m in self.embedding_indices:
            cv = 2 * ctx.cos(ctx.pi * m / self.k)
            powers, p = [], ctx.mpf(1)
            for _ in range(self.degree):
                lo, hi = p._mpi_
                powers.append((int(libmp.to_int(libmp.mpf_shift(lo, prec), "f")),
                               int(libmp.to_int(libmp.mpf_shift(hi, prec), "c"))))
                p = p * cv
            out.append(tuple(powers))
        out = tuple(out)
        self._enclosure_cache[prec] = out
        return out


@lru_cache(maxsize=None)
def make_context(k):
    if k < 3:
        raise CoxsysError("K_TOO_SMALL", f"k={k} < 3")
    psi = minimal_polynomial(k)
    degree = len(psi) - 1
    if degree != totient(2 * k) // 2:
        raise ArithmeticError("degree mismatch for minimal polynomial")
    idx = tuple(m for m in range(1, k) if math.gcd(m, 2 * k) == 1)
    return FieldContext(k, psi, degree, idx)


# -- norms --------------------------------------------------------------------

def _embedding_bounds(x, enc):
    """Integer enclosure of 2^prec * x_v for one embedding ``enc``."""
    lo = hi = 0
    for a, (l, h) in zip(x, enc):
        if a >= 0:
            lo += a * l
            hi += a * h
        else:
            lo += a * h
            hi += a * l
    return lo, hi


def _abs_bounds(x, ctx, prec):
    scale = 1 << prec
    out = []
    for enc in ctx.enclosures(prec):
        lo, hi = _embedding_bounds(x, enc)
        if lo >= 0:
            out.append((lo, hi))
        elif hi <= 0:
            out.append((-hi, -lo))
        else:
            out.append((0, max(-lo, hi)))
    return out, scale


def linf_enclosure(x, ctx, rel_width=1e-9, prec=DEFAULT_PREC):
    """Enclosure [lo, hi] (Fractions) of max_v |x_v|.

    Precision is doubled until hi - lo <= rel_width * max(1, hi).
    """
    x = tuple(x)
    if not any(x[1:]):
        v = Fraction(abs(x[0]))
        return v, v
    while True:
        bounds, scale = _abs_bounds(x, ctx, prec)
        lo = Fraction(max(b[0] for b in bounds), scale)
        hi = Fraction(max(b[1] for b in bounds), scale)
        if hi - lo <= Fraction(rel_width) * max(1, hi):
            return lo, hi
        prec *= 2


def compare_linf(x, bound, ctx, prec=DEFAULT_PREC):
    """Sign of ||x|| - bound for an integer ``bound``: -1, 0 or +1.

    Exact when x is rational; otherwise ||x|| is irrational or a non-integer
    and the enclosure is refined until it separates from ``bound``.
    """
    x = tuple(x)
    if not any(x[1:]):
        a = abs(x[0])
        return (a > bound) - (a < bound)
    while True:
        bounds, scale = _abs_bounds(x, ctx, prec)
        target = bound * scale
        if all(h < target for _, h in bounds):
            return -1
        if any(l > target for l, _ in bounds):
            return 1
        if prec > 1 << 14:
            # an embedding equal to +-bound forces x rational, handled above
            raise ArithmeticError("norm comparison did not separate")
        prec *= 2


def norm_below(x, bound, ctx):
    return compare_linf(x, bound, ctx) < 0


def field_norm_enclosure(x, ctx, prec=DEFAULT_PREC):
    """Enclosure of |N(x)| = prod_v |x_v| as Fractions."""
    bounds, scale = _abs_bounds(tuple(x), ctx, prec)
    lo = hi = Fraction(1)
    for l, h in bounds:
        lo *= Fraction(l, scale)
        hi *= Fraction(h, scale)
    return lo, hi


def mod_reduce(x, modulus):
    """Coefficientwise residue of ``x`` modulo an integer; psi is monic so this is canonical."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    return tuple(a % modulus for a in x)


# -- convenience wrapper ---------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicInt:
    ctx: FieldContext
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.ctx.degree:
            object.__setattr__(self, "coeffs", self.ctx.reduce(self.coeffs))

    @classmethod
    def of(cls, ctx, value):
        if isinstance(value, AlgebraicInt):
            return value
        if isinstance(value, int):
            return cls(ctx, ctx.scalar(value))
        return cls(ctx, ctx.reduce(tuple(value)))

    @classmethod
    def generator(cls, ctx):
        return cls(ctx, ctx.gen)

    def _coerce(self, other):
        if isinstance(other, AlgebraicInt):
            if other.ctx is not self.ctx:
                raise CoxsysError("CONTEXT_MISMATCH", f"k={self.ctx.k} vs k={other.ctx.k}")
            return other
        if isinstance(other, int):
            return AlgebraicInt(self.ctx, self.ctx.scalar(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgebraicInt(self.ctx, self.ctx.add(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgebraicInt(self.ctx, self.ctx.sub(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AlgebraicInt(self.ctx, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgebraicInt(self.ctx, self.ctx.mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n):
        out = AlgebraicInt(self.ctx, self.ctx.one)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self):
        return not any(self.coeffs)

    def linf(self, rel_width=1e-9):
        return linf_enclosure(self.coeffs, self.ctx, rel_width)

    def mod(self, modulus):
        return mod_reduce(self.coeffs, modulus)

    def embed(self):
        return [self.ctx.evaluate_float(self.coeffs, m) for m in self.ctx.embedding_indices]
