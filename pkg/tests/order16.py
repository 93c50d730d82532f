"""Exhaustive search for k=4 quotient data with exactly 16 elements.

A valid datum needs three red involutions whose pairwise products have
order exactly 4.  Two of them generate a dihedral group D of order 8, so
a 16-element group Q is D itself or a split extension D x| <c> by an
involutive automorphism.  Both cases are enumerated here without using
coxsys.
"""

from itertools import product


def _compose(p, q):
    """p then q, as tuples on {0,1,2,3}."""
    return tuple(q[p[i]] for i in range(4))


S = (0, 3, 2, 1)            # reflection of the square
R = (1, 2, 3, 0)            # rotation
IDENT = (0, 1, 2, 3)


def dihedral():
    elems = {IDENT}
    frontier = [IDENT]
    while frontier:
        nxt = []
        for g in frontier:
            for h in (S, R):
                x = _compose(g, h)
                if x not in elems:
                    elems.add(x)
                    nxt.append(x)
        frontier = nxt
    return sorted(elems)


def _order(x, mul, ident):
    y, n = x, 1
    while y != ident:
        y, n = mul(y, x), n + 1
    return n


def automorphisms(D):
    """Homomorphisms D -> D determined by the images of S and S R that are bijective."""
    a, b = S, _compose(S, R)
    words = {IDENT: ()}
    frontier = [IDENT]
    while frontier:
        nxt = []
        for g in frontier:
            for letter, h in ((0, a), (1, b)):
                x = _compose(g, h)
                if x not in words:
                    words[x] = words[g] + (letter,)
                    nxt.append(x)
        frontier = nxt
    out = []
    for a2, b2 in product(D, repeat=2):
        def phi(g, a2=a2, b2=b2):
            y = IDENT
            for letter in words[g]:
                y = _compose(y, a2 if letter == 0 else b2)
            return y
        table = {g: phi(g) for g in D}
        if len(set(table.values())) != len(D):
            continue
        if all(table[_compose(g, h)] == _compose(table[g], table[h]) for g in D for h in D):
            out.append(table)
    return out


def red_triples():
    """All (a, b, c) in some 16-element group with pairwise product order 4."""
    D = dihedral()
    a, b = S, _compose(S, R)
    found = []
    # c inside D: the group would have order 8, listed for completeness
    for c in D:
        if c != IDENT and _compose(c, c) == IDENT:
            if _order(_compose(b, c), _compose, IDENT) == 4 and \
                    _order(_compose(c, a), _compose, IDENT) == 4:
                found.append(("inside", c))
    # c outside D: Q = D x| <c>, (x, e)(y, f) = (x phi^e(y), e + f)
    for phi in automorphisms(D):
        if any(phi[phi[g]] != g for g in D):
            continue

        def mul(p, q, phi=phi):
            (x, e), (y, f) = p, q
            return (_compose(x, phi[y] if e else y), (e + f) % 2)

        one = (IDENT, 0)
        A, B = (a, 0), (b, 0)
        for x in D:
            c = (x, 1)
            if mul(c, c) != one:
                continue
            if _order(mul(B, c), mul, one) == 4 and _order(mul(c, A), mul, one) == 4:
                found.append(("extension", phi, x))
    return found




def group_from(triple):
    """Elements and multiplication of the group holding a red triple."""
    if triple[0] == "inside":
        D = dihedral()
        return D, _compose, IDENT, (S, _compose(S, R), triple[1])
    _, phi, x = triple

    def mul(p, q):
        (u, e), (v, f) = p, q
        return (_compose(u, phi[v] if e else v), (e + f) % 2)

    elems = [(g, e) for g in dihedral() for e in (0, 1)]
    return elems, mul, (IDENT, 0), ((S, 0), (_compose(S, R), 0), (x, 1))


def full_data():
    """Sextuples (s1..s6) in a 16-element group meeting every k=4 gate."""
    out = []
    for triple in red_triples():
        elems, mul, one, (r1, r3, r5) = group_from(triple)
        if len(elems) != 16:
            continue
        invol = [g for g in elems if g != one and mul(g, g) == one]

        def commute(x, y):
            return mul(x, y) == mul(y, x)

        def order4(x, y):
            return _order(mul(x, y), mul, one) == 4

        for s2, s4, s6 in product(invol, repeat=3):
            sig = [r1, s2, r3, s4, r5, s6]
            ok = all(commute(sig[i], sig[(i + 1) % 6]) and sig[i] != sig[(i + 1) % 6]
                     for i in range(6))
            ok = ok and all(order4(sig[i], sig[(i + 2) % 6]) for i in range(6))
            if ok:
                out.append((elems, mul, one, sig))
    return out


def as_permutations(elems, mul, sig):
    index = {g: n for n, g in enumerate(elems)}
    return [[index[mul(g, s)] for g in elems] for s in sig]


if __name__ == "__main__":
    print("red triples:", len(red_triples()), "complete data:", len(full_data()))
