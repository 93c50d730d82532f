"""Breadth-first enumeration of balls in W(k), keyed by exact Tits matrices."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CoxsysError, VerificationError
from .tits import N, tits_rep

DEFAULT_ELEMENT_CAP = 10 ** 7
_INT_LIMIT = 1 << 52


@dataclass
class Ball:
    k: int
    radius: int
    depths: list
    parents: list            # (parent index, generator) or None for the identity
    matrices: list           # int64 arrays (d, 6, 6)
    e_coords: list | None = None
    sizes: list = field(default_factory=list)

    def __len__(self):
        return len(self.depths)

    def word(self, idx):
        out = []
        while self.parents[idx] is not None:
            idx, s = self.parents[idx]
            out.append(s)
        return tuple(reversed(out))

    def iter_e_coordinates(self):
        if self.e_coords is None:
            raise CoxsysError("NO_COORDINATES", "ball built without E-coordinates")
        for idx, (depth, coords) in enumerate(zip(self.depths, self.e_coords)):
            yield depth, self.word(idx), coords

    def index(self):
        return {m.tobytes(): i for i, m in enumerate(self.matrices)}

    def key_hash(self, idx):
        return hashlib.sha256(self.matrices[idx].tobytes()).hexdigest()[:16]


def _cache_path(k, radius):
    root = os.environ.get("COXSYS_CACHE_DIR")
    if not root:
        return None
    return Path(root) / f"ball_k{k}_r{radius}.json"


def _write_cache(path, ball):
    path.parent.mkdir(parents=True, exist_ok=True)
    records = [{"depth": ball.depths[i], "word": list(ball.word(i)), "hash": ball.key_hash(i)}
               for i in range(len(ball))]
    path.write_text(json.dumps({"k": ball.k, "radius": ball.radius, "count": len(ball),
                                "records": records}))


def _read_cache(path, k, radius, with_e_coords):
    data = json.loads(path.read_text())
    if data["k"] != k or data["radius"] != radius or data["count"] != len(data["records"]):
        return None
    rep = tits_rep(k)
    ident = rep.identity.astype(np.int64)
    index = {}
    depths, parents, mats = [], [], []
    for rec in data["records"]:
        word = tuple(rec["word"])
        m = ident
        for s in word:
            m = rep.right_mul_gen(m, s)
        if hashlib.sha256(m.tobytes()).hexdigest()[:16] != rec["hash"]:
            return None
        if word:
            parent = index.get(_matrix_of(rep, ident, word[:-1]).tobytes())
            if parent is None:
                return None
            parents.append((parent, word[-1]))
        else:
            parents.append(None)
        index[m.tobytes()] = len(mats)
        depths.append(rec["depth"])
        mats.append(m)
    ball = Ball(k, radius, depths, parents, mats)
    ball.sizes = [sum(1 for d in depths if d <= r) for r in range(radius + 1)]
    if with_e_coords:
        _attach_e_coords(ball)
    return ball


def _matrix_of(rep, ident, word):
    m = ident
    for s in word:
        m = rep.right_mul_gen(m, s)
    return m


def _attach_e_coords(ball):
    rep = tits_rep(ball.k)
    coords = [np.zeros_like(ball.matrices[0])]
    for idx in range(1, len(ball)):
        parent, s = ball.parents[idx]
        coords.append(rep.e_step(coords[parent], s))
    ball.e_coords = coords


def ball_enumerate(k, radius, element_cap=DEFAULT_ELEMENT_CAP, with_e_coords=False,
                   use_cache=True):
    """All elements of length <= radius, by BFS under right multiplication.

    When ``with_e_coords`` is set, E-coordinates of rho(w) - 1 are carried
    along and each one is checked against the matrix via a @ G = rho(w) - 1.
    """
    if radius < 0:
        raise CoxsysError("BAD_RADIUS", "radius must be >= 0")
    path = _cache_path(k, radius) if use_cache else None
    if path is not None and path.exists():
        cached = _read_cache(path, k, radius, with_e_coords)
        if cached is not None:
            if with_e_coords:
                _verify_e_coords(cached)
            return cached
    rep = tits_rep(k)
    ident = rep.identity.astype(np.int64)
    index = {ident.tobytes(): 0}
    depths, parents, mats = [0], [None], [ident]
    sizes = [1]
    frontier = [0]
    for depth in range(1, radius + 1):
        nxt = []
        for idx in frontier:
            for s in range(N):
                m = rep.right_mul_gen(mats[idx], s)
                key = m.tobytes()
                if key in index:
                    continue
                if np.abs(m).max() >= _INT_LIMIT:
                    raise CoxsysError("CAP_EXCEEDED", "matrix entries exceed the int64 range")
                index[key] = len(mats)
                depths.append(depth)
                parents.append((idx, s))
                mats.append(m)
                nxt.append(index[key])
                if len(mats) > element_cap:
                    raise CoxsysError("CAP_EXCEEDED", f"ball exceeds {element_cap} elements")
        frontier = nxt
        sizes.append(len(mats))
    ball = Ball(k, radius, depths, parents, mats, sizes=sizes)
    if with_e_coords:
        _attach_e_coords(ball)
        _verify_e_coords(ball)
    if path is not None:
        _write_cache(path, ball)
    return ball


def _verify_e_coords(ball):
    rep = tits_rep(ball.k)
    ident = rep.identity.astype(np.int64)
    G = rep.G.astype(np.int64)
    for idx, (m, a) in enumerate(zip(ball.matrices, ball.e_coords)):
        if not np.array_equal(rep.mul(a, G), m - ident):
            raise VerificationError("BAD_COORDINATES", f"element {ball.word(idx)}")


def check_ball_closure(ball):
    """Neighbors of interior elements are present with depth differing by exactly one."""
    rep = tits_rep(ball.k)
    index = ball.index()
    for idx, m in enumerate(ball.matrices):
        depth = ball.depths[idx]
        if depth >= ball.radius:
            continue
        for s in range(N):
            j = index.get(rep.right_mul_gen(m, s).tobytes())
            if j is None or abs(ball.depths[j] - depth) != 1:
                return False
    return True
