"""Tessellated surfaces built from finite quotients of W(k).

Tiles are the group elements; tile q meets tile q*sigma_i along a side of
index i; the four tiles q<sigma_i, sigma_i+1> share a corner.  The index-i
curve through side {q, q sigma_i} is traced by alternately multiplying
the anchor tile by sigma_{i+1} and sigma_{i-1}.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CoxsysError, VerificationError
from .quotient import PrimeDatum, QuotientDatum
from .tits import N

HEXAGON_SIDE = math.acosh(2.0)
DEFAULT_TILE_CAP = 10 ** 6


@dataclass
class TessellatedSurface:
    k: int
    tiles: list                      # [(id, sign)]
    edges: list                      # [(a, b, index)] with a < b
    vertices: list                   # [(corner index i, sorted tile tuple)]
    curves: list                     # [(index, [side ids])] where side ids index ``edges``
    f0: int
    f1: int
    f2: int
    genus: int
    counts_only: bool = False
    notes: list = field(default_factory=list)

    def to_json(self):
        if self.counts_only:
            raise CoxsysError("COUNTS_ONLY", "surface was not built explicitly")
        return {"k": self.k, "f0": self.f0, "f1": self.f1, "f2": self.f2, "genus": self.genus,
                "tiles": [{"id": t, "sign": s} for t, s in self.tiles],
                "edges": [{"a": a, "b": b, "index": i + 1} for a, b, i in self.edges],
                "vertices": [{"index": i + 1, "tiles": list(ts)} for i, ts in self.vertices],
                "curves": [{"index": i + 1, "sides": list(sides)} for i, sides in self.curves]}

    @classmethod
    def from_json(cls, data):
        return cls(k=data["k"],
                   tiles=[(t["id"], t["sign"]) for t in data["tiles"]],
                   edges=[(e["a"], e["b"], e["index"] - 1) for e in data["edges"]],
                   vertices=[(v["index"] - 1, tuple(v["tiles"])) for v in data.get("vertices", [])],
                   curves=[(c["index"] - 1, list(c["sides"])) for c in data["curves"]],
                   f0=data["f0"], f1=data["f1"], f2=data["f2"], genus=data["genus"])

    def __eq__(self, other):
        if not isinstance(other, TessellatedSurface):
            return NotImplemented
        return self.to_json() == other.to_json()


# -- gates ----------------------------------------------------------------------

def _word_order(table, word, cap):
    """Order of the element spelled by ``word`` in the group with Cayley table ``table``."""
    q = 0
    for n in range(1, cap + 1):
        for s in word:
            q = int(table[q, s])
        if q == 0:
            return n
    return None


def check_gates(table, k):
    """Regularity gates: sigma_i sigma_{i+1} != 1 and order(sigma_{i-1} sigma_{i+1}) = k."""
    for i in range(N):
        if int(table[int(table[0, i]), (i + 1) % N]) == 0:
            raise CoxsysError("CONDITION_11_1_VIOLATED", f"sigma_{i + 1} sigma_{i + 2} = 1", i=i + 1)
    for i in range(N):
        order = _word_order(table, ((i - 1) % N, (i + 1) % N), len(table) + 1)
        if order != k:
            raise CoxsysError("CONDITION_11_2_VIOLATED",
                              f"order(t_{i + 1}) = {order} != {k}", i=i + 1, l=order)


def _check_relations(table, k):
    for i in range(N):
        if _word_order(table, (i,), 2) != 2:
            raise CoxsysError("INVALID_DATUM", f"sigma_{i + 1} is not an involution")
        if _word_order(table, (i, (i + 1) % N), 2) is None:
            raise CoxsysError("INVALID_DATUM", f"(sigma_{i + 1} sigma_{i + 2})^2 != 1")
        order = _word_order(table, (i, (i + 2) % N), k)
        if order is None or k % order:
            raise CoxsysError("INVALID_DATUM", f"(sigma_{i + 1} sigma_{i + 3})^k != 1")


def _two_color(table):
    """Signs with sign(q sigma_i) = -sign(q); NONORIENTABLE if impossible."""
    n = len(table)
    sign = np.zeros(n, dtype=np.int64)
    sign[0] = 1
    queue = deque([0])
    while queue:
        q = queue.popleft()
        for s in range(N):
            r = int(table[q, s])
            if sign[r] == 0:
                sign[r] = -sign[q]
                queue.append(r)
            elif sign[r] == sign[q]:
                raise CoxsysError("NONORIENTABLE", f"tiles {q} and {r} share a sign across index {s + 1}")
    return sign


# -- builder --------------------------------------------------------------------

def _datum_order(datum):
    from .quotient import quotient_order
    return quotient_order(datum).order


def build_surface(datum, tile_cap=DEFAULT_TILE_CAP, order_hint=None):
    """Build the decorated tessellation of a quotient datum.

    Above ``tile_cap`` tiles only counts are produced; the gates are then
    checked through element orders in the permutation or matrix model.
    """
    k = datum.k
    try:
        table = datum.cayley_graph(cap=tile_cap)
    except CoxsysError as err:
        if err.code != "SIZE_CAP":
            raise
        return _counts_only(datum, order_hint)
    _check_relations(table, k)
    check_gates(table, k)
    sign = _two_color(table)
    n = len(table)

    edge_id = {}
    edges = []
    for q in range(n):
        for i in range(N):
            r = int(table[q, i])
            key = (min(q, r), max(q, r), i)
            if key not in edge_id:
                edge_id[key] = len(edges)
                edges.append(key)

    vertices = {}
    for q in range(n):
        for i in range(N):
            j = (i + 1) % N
            a = int(table[q, i])
            coset = tuple(sorted({q, a, int(table[a, j]), int(table[q, j])}))
            if len(coset) != 4:
                raise CoxsysError("CONDITION_11_1_VIOLATED", f"corner ({i + 1},{j + 1}) degenerates")
            vertices.setdefault((i, coset), None)
    vertex_list = sorted(vertices)

    curves = []
    used = np.zeros(len(edges), dtype=bool)
    for seed in range(len(edges)):
        if used[seed]:
            continue
        a0, b0, i = edges[seed]
        sides = [seed]
        used[seed] = True
        anchor = a0
        for step in range(1, 2 * k + 1):
            mult = (i + 1) % N if step % 2 == 1 else (i - 1) % N
            anchor = int(table[anchor, mult])
            other = int(table[anchor, i])
            sid = edge_id[(min(anchor, other), max(anchor, other), i)]
            if sid == seed:
                if step != 2 * k:
                    raise CoxsysError("EARLY_CURVE_CLOSURE", f"curve closed after {step} sides")
                break
            if step == 2 * k:
                raise VerificationError("CURVE_NOT_CLOSED", f"curve of index {i + 1} did not close")
            if used[sid]:
                raise VerificationError("CURVE_OVERLAP", f"side {sid} lies on two curves")
            used[sid] = True
            sides.append(sid)
        curves.append((i, sides))

    f2, f1, f0 = n, len(edges), len(vertex_list)
    chi = f0 - f1 + f2
    if chi % 2:
        raise VerificationError("ODD_EULER_CHARACTERISTIC", str(chi))
    genus = (2 - chi) // 2
    surf = TessellatedSurface(k, [(q, int(sign[q])) for q in range(n)], edges,
                              vertex_list, curves, f0, f1, f2, genus)
    verify_surface(surf)
    return surf


def _counts_only(datum, order_hint):
    from .quotient import perm_mul, perm_order

    k = datum.k
    gens = datum.perms() if isinstance(datum, PrimeDatum) else datum.gens
    datum.validate()
    for i in range(N):
        if perm_order(perm_mul(gens[i], gens[(i + 1) % N])) == 1:
            raise CoxsysError("CONDITION_11_1_VIOLATED", f"sigma_{i + 1} sigma_{i + 2} = 1", i=i + 1)
        order = perm_order(perm_mul(gens[(i - 1) % N], gens[(i + 1) % N]))
        if order != k:
            raise CoxsysError("CONDITION_11_2_VIOLATED", f"order(t_{i + 1}) = {order}", i=i + 1, l=order)
    f2 = order_hint if order_hint is not None else _datum_order(datum)
    if f2 % 4:
        raise CoxsysError("NONORIENTABLE", f"f2 = {f2} is not divisible by 4")
    f1 = 3 * f2
    f0 = f1 // 2
    genus = 1 + f2 // 4
    return TessellatedSurface(k, [], [], [], [], f0, f1, f2, genus, counts_only=True,
                              notes=["counts from |Q| and gate checks only"])


def verify_surface(s):
    """Structural invariants of an explicitly built surface."""
    problems = []
    if s.f1 != 3 * s.f2:
        problems.append("f1 != 3 f2")
    if 2 * s.f0 != s.f1:
        problems.append("f0 != f1/2")
    if 2 - 2 * s.genus != s.f0 - s.f1 + s.f2:
        problems.append("Euler characteristic")
    if 4 * (s.genus - 1) != s.f2:
        problems.append("g != 1 + f2/4")
    if not s.counts_only:
        sign = dict(s.tiles)
        sides = np.zeros(len(s.tiles), dtype=np.int64)
        for a, b, _ in s.edges:
            if sign[a] == sign[b]:
                problems.append(f"tiles {a},{b} share a sign")
                break
            sides[a] += 1
            sides[b] += 1
        if not (sides == 6).all():
            problems.append("a tile does not have six sides")
        corners = np.zeros(len(s.tiles), dtype=np.int64)
        for _, tiles in s.vertices:
            if len(tiles) != 4:
                problems.append("vertex valence != 4")
                break
            for t in tiles:
                corners[t] += 1
        if not (corners == 6).all():
            problems.append("a tile does not have six corners")
        covered = sorted(x for _, sides_ in s.curves for x in sides_)
        if covered != list(range(s.f1)):
            problems.append("curves do not cover each side exactly once")
        if any(len(sides_) != 2 * s.k for _, sides_ in s.curves):
            problems.append("curve with the wrong number of sides")
        for idx, sides_ in s.curves:
            if any(s.edges[x][2] != idx for x in sides_):
                problems.append("curve mixes side indices")
                break
    if not math.isclose(s.f2 * math.pi, 4 * math.pi * (s.genus - 1), rel_tol=1e-12):
        problems.append("Gauss-Bonnet")
    if problems:
        raise VerificationError("SURFACE_INVARIANT", "; ".join(problems))
    return True


def fill_bound(g):
    """57 g / (sqrt(ln g) sqrt(lnlnln g)) for g >= 16."""
    from .asymptotics import fill_bound as fb
    return fb(g)


def systole_report(s, certificate=None):
    curve_len = 2 * s.k * HEXAGON_SIDE
    count = s.f1 // (2 * s.k)
    report = {"k": s.k, "genus": s.genus, "curveCount": count,
              "curveCountFormula": 6 * (s.genus - 1) / s.k,
              "curveLength": curve_len, "area": s.f2 * math.pi,
              "gaussBonnet": math.isclose(s.f2 * math.pi, 4 * math.pi * (s.genus - 1), rel_tol=1e-12),
              "countsOnly": s.counts_only}
    report["fillBound"] = fill_bound(s.genus) if s.genus >= 16 else None
    certified = bool(certificate and certificate.get("analyticRadius", 0) >= 4 * s.k
                     and certificate.get("pass"))
    report["systolesCertified"] = certified
    if not certified:
        report["note"] = ("curves are systole candidates only; no ball-avoidance "
                          "certificate of radius 4k is attached")
    return report


def export_surface(s, path):
    data = s.to_json()
    try:
        Path(path).write_text(json.dumps(data))
    except OSError as err:
        raise CoxsysError("IO_ERROR", str(err)) from err
    return path


def import_surface(path):
    try:
        return TessellatedSurface.from_json(json.loads(Path(path).read_text()))
    except OSError as err:
        raise CoxsysError("IO_ERROR", str(err)) from err


# -- a small explicit datum -----------------------------------------------------

def _pauli_mul(a, b):
    # (phase mod 4, x, z) meaning i^phase X^x Z^z
    return ((a[0] + b[0] + 2 * a[2] * b[1]) % 4, a[1] ^ b[1], a[2] ^ b[2])


def pauli_square_datum():
    """A valid datum for k = 4 of order 256 inside a product of two Pauli groups.

    The red letters live in one factor and the blue letters in the other,
    so red and blue letters commute, and within each factor the three
    letters pairwise generate dihedral groups of order 8.
    """
    paulis = [(p, x, z) for p in range(4) for x in range(2) for z in range(2)]
    elements = [(a, b) for a in paulis for b in paulis]
    index = {e: n for n, e in enumerate(elements)}
    e0 = (0, 0, 0)
    red = [(0, 0, 1), (0, 1, 0), (1, 1, 1)]
    blue = [(0, 0, 1), (0, 1, 0), (1, 1, 1)]
    gens_pairs = []
    for j in range(3):
        gens_pairs.append((e0, red[j]))
        gens_pairs.append((blue[j], e0))
    gens = []
    for g in gens_pairs:
        gens.append([index[(_pauli_mul(a, g[0]), _pauli_mul(b, g[1]))] for a, b in elements])
    return QuotientDatum(4, gens, label="Pauli x Pauli, order 256")
