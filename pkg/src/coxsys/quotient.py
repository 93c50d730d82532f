"""Finite quotients of W(k): data, Cayley graphs and group orders.

A quotient datum is a finite group with six involution generators.  Two
encodings are supported: permutations of n points, and the reduction of
the Tits representation modulo a prime p.  Orders come from a randomized
Schreier-Sims stabilizer chain on permutations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .congruence import ModMatrix, congruence_image
from .errors import CoxsysError, VerificationError
from .numberfield import totient
from .tits import N, tits_rep


# -- permutations -------------------------------------------------------------
# A permutation is an int array p with x -> p[x]; products apply left first.

def perm_mul(p, q):
    return q[p]


def perm_inv(p):
    out = np.empty_like(p)
    out[p] = np.arange(len(p), dtype=p.dtype)
    return out


def perm_is_identity(p):
    return bool((p == np.arange(len(p))).all())


def perm_order(p):
    seen = np.zeros(len(p), dtype=bool)
    order = 1
    for start in range(len(p)):
        if seen[start]:
            continue
        length, x = 0, start
        while not seen[x]:
            seen[x] = True
            x = p[x]
            length += 1
        order = order * length // math.gcd(order, length)
    return order


# -- stabilizer chain -----------------------------------------------------------

@dataclass
class _Level:
    base: int
    gens: list
    transversal: dict = field(default_factory=dict)   # point -> (u, u^-1)

    def rebuild(self, n):
        ident = np.arange(n, dtype=np.int64)
        self.transversal = {self.base: (ident, ident)}
        queue = [self.base]
        while queue:
            pt = queue.pop()
            u, _ = self.transversal[pt]
            for g in self.gens:
                img = int(g[pt])
                if img not in self.transversal:
                    v = perm_mul(u, g)
                    self.transversal[img] = (v, perm_inv(v))
                    queue.append(img)


@dataclass
class StabilizerChain:
    degree: int
    levels: list

    @property
    def order(self):
        out = 1
        for lev in self.levels:
            out *= len(lev.transversal)
        return out

    @property
    def base(self):
        return [lev.base for lev in self.levels]

    def sift(self, g):
        for i, lev in enumerate(self.levels):
            pt = int(g[lev.base])
            if pt not in lev.transversal:
                return g, i
            g = perm_mul(g, lev.transversal[pt][1])
        return g, len(self.levels)

    def contains(self, g):
        h, _ = self.sift(g)
        return perm_is_identity(h)


class _ProductReplacement:
    def __init__(self, gens, rng, slots=10, warmup=60):
        self.rng = rng
        self.slots = [gens[i % len(gens)] for i in range(max(slots, len(gens)))]
        self.acc = np.arange(len(gens[0]), dtype=np.int64)
        for _ in range(warmup):
            self.next()

    def next(self):
        i, j = self.rng.sample(range(len(self.slots)), 2)
        if self.rng.random() < 0.5:
            self.slots[i] = perm_mul(self.slots[i], self.slots[j])
        else:
            self.slots[i] = perm_mul(self.slots[j], self.slots[i])
        self.acc = perm_mul(self.acc, self.slots[i])
        return self.acc


def schreier_sims(gens, seed=0, confidence=40):
    """Randomized Schreier-Sims.  Stops after ``confidence`` consecutive random
    elements sift to the identity."""
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    n = len(gens[0])
    rng = random.Random(seed)
    chain = StabilizerChain(n, [])
    nontrivial = [g for g in gens if not perm_is_identity(g)]
    if not nontrivial:
        return chain
    source = _ProductReplacement(nontrivial, rng)
    pending = list(nontrivial)
    quiet = 0
    while quiet < confidence:
        g = pending.pop() if pending else source.next()
        h, depth = chain.sift(g)
        if perm_is_identity(h):
            quiet += 1
            continue
        quiet = 0
        if depth == len(chain.levels):
            moved = int(np.flatnonzero(h != np.arange(n))[0])
            chain.levels.append(_Level(moved, []))
        for lev in chain.levels[:depth + 1]:
            lev.gens.append(h)
            lev.rebuild(n)
    return chain


# -- quotient data --------------------------------------------------------------

@dataclass
class QuotientDatum:
    """Six permutation images of the generators of W(k), with generator signs."""
    k: int
    gens: list
    signs: tuple = (-1,) * N
    label: str = "permutation datum"
    sign_witness: str = "coloring"

    def __post_init__(self):
        self.gens = [np.asarray(g, dtype=np.int64) for g in self.gens]
        if len(self.gens) != N:
            raise CoxsysError("MALFORMED_DATUM", "need six generators")

    @property
    def degree(self):
        return len(self.gens[0])

    def validate(self):
        """Generators are nontrivial involutions satisfying the relations of W(k)."""
        for i, g in enumerate(self.gens):
            if perm_is_identity(g) or not perm_is_identity(perm_mul(g, g)):
                raise CoxsysError("INVALID_DATUM", f"sigma_{i + 1} is not a nontrivial involution")
        for i in range(N):
            a = perm_mul(self.gens[i], self.gens[(i + 1) % N])
            if perm_order(a) not in (1, 2):
                raise CoxsysError("INVALID_DATUM", f"(sigma_{i + 1} sigma_{i + 2})^2 != 1")
            b = perm_mul(self.gens[i], self.gens[(i + 2) % N])
            if self.k % perm_order(b):
                raise CoxsysError("INVALID_DATUM", f"(sigma_{i + 1} sigma_{i + 3})^k != 1")
        if any(s != -1 for s in self.signs):
            raise CoxsysError("INVALID_DATUM", "every generator must have sign -1")
        return True

    def cayley_graph(self, cap=10 ** 6):
        """Regular orbit: tile ids and right-multiplication table, BFS from the identity."""
        ident = np.arange(self.degree, dtype=np.int64)
        return _bfs_cayley(ident, lambda g, s: perm_mul(g, self.gens[s]),
                           lambda g: g.tobytes(), cap)


@dataclass
class PrimeDatum:
    """The image of rho modulo a prime p, as ModMatrix generators."""
    k: int
    p: int
    signs: tuple = (-1,) * N
    sign_witness: str = "determinant"

    def __post_init__(self):
        if not _is_prime(self.p):
            raise CoxsysError("UNSUPPORTED_MODULUS", f"{self.p} is not prime")
        self.rep = tits_rep(self.k)
        self.gens = [congruence_image((i,), self.k, modulus=self.p) for i in range(N)]
        if self.p == 2:
            self.sign_witness = "coloring"

    @property
    def label(self):
        return f"rho mod {self.p}"

    def gen_perm(self, i):
        return _block_perm(self.gens[i], self.rep.ctx, self.p)

    def perms(self):
        return [self.gen_perm(i) for i in range(N)]

    def validate(self):
        ident = ModMatrix.identity(self.k, self.p)
        for i, g in enumerate(self.gens):
            if g.is_identity() or not (g * g).is_identity():
                raise CoxsysError("INVALID_DATUM", f"sigma_{i + 1} is not a nontrivial involution")
            a = g * self.gens[(i + 1) % N]
            if not (a * a).is_identity():
                raise CoxsysError("INVALID_DATUM", f"(sigma_{i + 1} sigma_{i + 2})^2 != 1")
            b = g * self.gens[(i + 2) % N]
            power = ident
            for _ in range(self.k):
                power = power * b
            if not power.is_identity():
                raise CoxsysError("INVALID_DATUM", f"(sigma_{i + 1} sigma_{i + 3})^k != 1")
        if self.sign_witness == "determinant":
            for i in range(N):
                if _block_det_mod_p(self.gens[i], self.rep.ctx, self.p) != self.p - 1:
                    raise CoxsysError("INVALID_DATUM", f"det sigma_{i + 1} != -1 mod p")
        return True

    def cayley_graph(self, cap=10 ** 6):
        rep, p = self.rep, self.p
        ident = ModMatrix.identity(self.k, p).layers
        return _bfs_cayley(ident, lambda g, s: rep.right_mul_gen(g, s) % p,
                           lambda g: g.astype(np.int64).tobytes(), cap)


def _is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _bfs_cayley(ident, step, key, cap):
    index = {key(ident): 0}
    elems = [ident]
    table = []
    head = 0
    while head < len(elems):
        g = elems[head]
        row = []
        for s in range(N):
            h = step(g, s)
            kh = key(h)
            j = index.get(kh)
            if j is None:
                if len(elems) >= cap:
                    raise CoxsysError("SIZE_CAP", f"group has more than {cap} elements")
                j = len(elems)
                index[kh] = j
                elems.append(h)
            row.append(j)
        table.append(row)
        head += 1
    return np.array(table, dtype=np.int64)


def _block_matrix(mm, ctx, p):
    """The 6d x 6d matrix over F_p of a ModMatrix acting on (O/p)^6."""
    d = ctx.degree
    out = np.zeros((N * d, N * d), dtype=np.int64)
    for i in range(N):
        for j in range(N):
            x = tuple(int(mm.layers[t, i, j]) for t in range(d))
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = np.array(ctx.mult_matrix(x)) % p
    return out


def _block_perm(mm, ctx, p):
    big = _block_matrix(mm, ctx, p)
    dim = big.shape[0]
    npts = p ** dim
    idx = np.arange(npts, dtype=np.int64)
    digits = np.stack([(idx // p ** e) % p for e in range(dim)], axis=1)
    images = digits @ big.T % p
    weights = p ** np.arange(dim, dtype=np.int64)
    return images @ weights


def _block_det_mod_p(mm, ctx, p):
    m = [[int(v) % p for v in row] for row in _block_matrix(mm, ctx, p)]
    n = len(m)
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col] % p
        inv = pow(m[col][col], -1, p)
        for r in range(col + 1, n):
            f = m[r][col] * inv % p
            if f:
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[col])]
    return det % p


# -- orders --------------------------------------------------------------------

@dataclass
class OrderReport:
    order: int
    seeds: list
    orders_by_seed: list
    closure_order: int | None
    membership_passed: int
    membership_total: int
    log3_order: float
    log3_index_bound_value: int | None

    @property
    def passed(self):
        same = len(set(self.orders_by_seed)) == 1
        closure_ok = self.closure_order is None or self.closure_order == self.order
        return same and closure_ok and self.membership_passed == self.membership_total

    def to_json(self):
        return {"order": self.order, "seeds": self.seeds, "ordersBySeed": self.orders_by_seed,
                "closureOrder": self.closure_order,
                "membership": f"{self.membership_passed}/{self.membership_total}",
                "log3Order": self.log3_order, "log3IndexBound": self.log3_index_bound_value,
                "pass": self.passed}


def log3_index_bound(k):
    """log_3 of 3^(72 k phi(2k))."""
    return 72 * k * totient(2 * k)


def closure_order(gens, cap=10 ** 6):
    """Order by explicit closure of the permutation group (BFS over elements)."""
    ident = np.arange(len(gens[0]), dtype=np.int64)
    seen = {ident.tobytes()}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = perm_mul(g, s)
                kh = h.tobytes()
                if kh not in seen:
                    seen.add(kh)
                    if len(seen) > cap:
                        return None
                    nxt.append(h)
        frontier = nxt
    return len(seen)


def _random_word_element(gens, rng, length=60):
    g = np.arange(len(gens[0]), dtype=np.int64)
    for _ in range(length):
        g = perm_mul(g, gens[rng.randrange(len(gens))])
    return g


def quotient_order(datum, seeds=(0,), closure_cap=10 ** 6, membership_tests=100):
    """Group order from stabilizer chains under several seeds, with sanity checks."""
    gens = datum.perms() if isinstance(datum, PrimeDatum) else datum.gens
    chains = [schreier_sims(gens, seed=s) for s in seeds]
    orders = [c.order for c in chains]
    order = orders[0]
    rng = random.Random(seeds[0] + 7919)
    passed = sum(chains[0].contains(_random_word_element(gens, rng)) for _ in range(membership_tests))
    closure = closure_order(gens, closure_cap) if order <= closure_cap else None
    report = OrderReport(order, list(seeds), orders, closure, passed, membership_tests,
                         math.log(order, 3), log3_index_bound(datum.k))
    if not report.passed:
        raise VerificationError("VERIFICATION_FAILED", str(report.to_json()), report=report)
    return report
