"""Congruence images of W(k) and ball-avoidance certificates.

The congruence subgroup of level 3^m is the set of w with rho(w) - 1 in
3^m R, where R is the Z[c]-span of the E_ij.  Equivalently, every
E-coordinate of rho(w) - 1 is divisible by 3^m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ball import ball_enumerate
from .errors import CoxsysError, VerificationError
from .tits import N, matrix_norm_below, tits_rep


def _dtype_for(modulus, rep):
    worst = N * rep.d * (modulus - 1) ** 2 * (1 + max(abs(p) for p in rep.ctx.psi)) ** rep.d
    return np.int64 if worst < (1 << 62) else object


@dataclass(frozen=True, eq=False)
class ModMatrix:
    """A 6x6 matrix over (Z/M)[x]/psi, as reduced layers of shape (d, 6, 6)."""
    k: int
    modulus: int
    layers: np.ndarray

    @classmethod
    def identity(cls, k, modulus):
        rep = tits_rep(k)
        return cls(k, modulus, rep.identity.astype(_dtype_for(modulus, rep)) % modulus)

    def __mul__(self, other):
        if other.k != self.k or other.modulus != self.modulus:
            raise CoxsysError("CONTEXT_MISMATCH", "different k or modulus")
        rep = tits_rep(self.k)
        return ModMatrix(self.k, self.modulus, rep.mul(self.layers, other.layers) % self.modulus)

    def __eq__(self, other):
        return isinstance(other, ModMatrix) and self.k == other.k \
            and self.modulus == other.modulus and np.array_equal(self.layers, other.layers)

    def __hash__(self):
        return hash((self.k, self.modulus, self.layers.tobytes()))

    def is_identity(self):
        return self == ModMatrix.identity(self.k, self.modulus)


def congruence_image(word, k, m=None, modulus=None):
    """rho(word) reduced mod 3^m (or mod an explicit ``modulus``)."""
    if modulus is None:
        if m is None or m < 1:
            raise CoxsysError("BAD_MODULUS", "m must be >= 1")
        modulus = 3 ** m
    rep = tits_rep(k)
    mat = rep.identity.astype(_dtype_for(modulus, rep)) % modulus
    for s in word:
        mat = rep.right_mul_gen(mat, s) % modulus
    return ModMatrix(k, modulus, mat)


def e_coordinates_mod(word, k, modulus):
    """E-coordinates of rho(word) - 1, reduced mod ``modulus`` step by step."""
    rep = tits_rep(k)
    a = np.zeros((rep.d, N, N), dtype=_dtype_for(modulus, rep))
    for s in word:
        a = rep.e_step(a, s) % modulus
    return a


def in_H(word, k, m):
    """True iff rho(word) - 1 lies in 3^m R."""
    if m < 1:
        raise CoxsysError("BAD_MODULUS", "m must be >= 1")
    return not e_coordinates_mod(word, k, 3 ** m).any()


def default_m(k):
    return 4 * k


@dataclass
class AvoidanceCertificate:
    k: int
    m: int
    radius_checked: int
    analytic_radius: int
    verified_analytic_radius: int
    exhaustive_radius: int
    exhaustive_pass: bool
    consistent: bool
    covers_criterion_radius: bool
    witness: tuple | None = None

    @property
    def passed(self):
        return self.exhaustive_pass and self.consistent

    def to_json(self):
        return {"k": self.k, "m": self.m, "radiusChecked": self.radius_checked,
                "analyticRadius": self.analytic_radius,
                "verifiedAnalyticRadius": self.verified_analytic_radius,
                "exhaustiveRadius": self.exhaustive_radius,
                "coversCriterionRadius": self.covers_criterion_radius,
                "witness": None if self.witness is None else [s + 1 for s in self.witness],
                "consistent": self.consistent, "pass": self.passed}


def ball_avoidance_certificate(k, m, radius, ball=None):
    """Exhaustive and analytic evidence that short elements avoid the level-3^m subgroup.

    Exhaustive: scan the ball of the given radius for nontrivial w with
    rho(w) - 1 in 3^m R.  Analytic: ||rho(w) - 1|| < 3^l(w) (checked on the
    ball) and ||x|| >= 1 for nonzero x force avoidance up to length m.
    """
    if m < 1 or radius < 0:
        raise CoxsysError("BAD_ARGUMENT", "need m >= 1 and radius >= 0")
    if ball is None or ball.radius < radius or ball.e_coords is None:
        ball = ball_enumerate(k, radius, with_e_coords=True)
    rep = tits_rep(k)
    ctx = rep.ctx
    modulus = 3 ** m
    first_hit = None
    norm_ok_through = radius
    for idx, (depth, coords) in enumerate(zip(ball.depths, ball.e_coords)):
        if depth == 0 or depth > radius:
            continue
        entries = [[tuple(int(coords[t, i, j]) for t in range(rep.d)) for j in range(N)]
                   for i in range(N)]
        if not matrix_norm_below(entries, 3 ** depth, ctx):
            norm_ok_through = min(norm_ok_through, depth - 1)
        if not any(int(v) % modulus for v in coords.flat):
            if first_hit is None or depth < ball.depths[first_hit]:
                first_hit = idx
    exhaustive_radius = radius if first_hit is None else ball.depths[first_hit] - 1
    verified = min(m, norm_ok_through)
    witness = None if first_hit is None else ball.word(first_hit)
    consistent = first_hit is None or ball.depths[first_hit] > m
    consistent = consistent and norm_ok_through == radius
    cert = AvoidanceCertificate(k, m, radius, m, verified, exhaustive_radius,
                                first_hit is None, consistent, m >= 4 * k, witness)
    if not consistent:
        raise VerificationError("INCONSISTENT", str(cert.to_json()), certificate=cert)
    return cert

