"""Primorials, totients, Landau ratios and the systole-count bound chain.

The index bound 3^(144 k phi(k)) is only ever handled through its natural
logarithm.  Comparisons are made in log space and flagged INDETERMINATE
when the margin is not at least 1000 times the float error budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CoxsysError

EULER_GAMMA = float(np.euler_gamma)
REL_ERROR_BUDGET = 1e-9
MARGIN_FACTOR = 1e3
DELTA = 12 * math.sqrt(math.exp(-EULER_GAMMA) * math.log(3))
DELTA_PLUS = 9.5
CHAIN_NAMES = ("kAboveRootLnIndex", "deltaPlusLogLog", "inverseKBelowFill")


def odd_primes(n):
    """The first n odd primes, by trial division."""
    out = []
    c = 3
    while len(out) < n:
        if all(c % p for p in out if p * p <= c):
            out.append(c)
        c += 2
    return out


@dataclass(frozen=True)
class Primorial:
    n: int
    q: int
    phi: int
    primes: tuple


def totient_primorials(n):
    """q_i = 2 p_1 ... p_i over odd primes, with phi(q_i) = prod (p - 1)."""
    if n < 1:
        raise CoxsysError("BAD_ARGUMENT", "n must be >= 1")
    primes = odd_primes(n)
    rows = []
    q, phi = 2, 1
    for i, p in enumerate(primes, start=1):
        q *= p
        phi *= p - 1
        rows.append(Primorial(i, q, phi, tuple(primes[:i])))
    return rows


def landau_ratio(q, phi):
    """phi(q) lnln(q) / q, with the rational part exact."""
    return float(Fraction(phi, q)) * math.log(math.log(q))


def landau_table(n):
    return [{"k": r.q, "phi": r.phi, "ratio": landau_ratio(r.q, r.phi),
             "limit": math.exp(-EULER_GAMMA)} for r in totient_primorials(n)]


def ln_index_bound(k, phi_k):
    """ln of 3^(144 k phi(k))."""
    return 144 * k * phi_k * math.log(3)


def lnln_index_bound(k, phi_k):
    """ln ln 3^(144 k phi(k)), safe for integers beyond float range."""
    return math.log(144 * k * phi_k) + math.log(math.log(3))


@dataclass
class Comparison:
    name: str
    lhs: float
    rhs: float

    @property
    def margin(self):
        return self.lhs - self.rhs

    @property
    def budget(self):
        return REL_ERROR_BUDGET * max(abs(self.lhs), abs(self.rhs), 1.0)

    @property
    def status(self):
        if abs(self.margin) < MARGIN_FACTOR * self.budget:
            return "INDETERMINATE"
        return "HOLDS" if self.margin > 0 else "FAILS"

    def to_json(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "status": self.status}


def chain_comparisons(k, phi_k, delta_plus=DELTA_PLUS):
    """The three chain inequalities for one k, each as a log-space comparison lhs > rhs."""
    lnL = lnln_index_bound(k, phi_k)
    lnk = math.log(k)
    c2 = Comparison("kAboveRootLnIndex", lnk, 0.5 * lnL)
    c3 = Comparison("deltaPlusLogLog", delta_plus ** 2 * math.log(lnk), DELTA ** 2 * math.log(lnL))
    # 1/k < d+ / (sqrt(lnlnln D) sqrt(ln D)), written as ln of both sides
    c4 = Comparison("inverseKBelowFill", math.log(delta_plus) + lnk,
                    0.5 * math.log(math.log(lnL)) + 0.5 * lnL)
    return [c2, c3, c4]


def bound_row(r):
    lnL = lnln_index_bound(r.q, r.phi)
    # fill factor 57 / (sqrt(ln g) sqrt(lnlnln g)) at g = 3^(144 k phi(k)), as a log
    return {"k": r.q, "phi": r.phi, "log3IndexBound": 144 * r.q * r.phi,
            "lnLnGenusBound": lnL, "landauRatio": landau_ratio(r.q, r.phi),
            "lnFillFactor": math.log(57) - 0.5 * lnL - 0.5 * math.log(math.log(lnL))}


def bound_chain(n_primorials, delta_plus=DELTA_PLUS):
    """Evaluate the chain inequalities over the first primorials.

    For each inequality the report gives the first primorial where it holds
    (None if never within the list) and whether it keeps holding afterwards.
    """
    if delta_plus <= DELTA:
        raise CoxsysError("BAD_ARGUMENT", f"delta+ = {delta_plus} must exceed {DELTA}")
    rows = totient_primorials(n_primorials)
    per_k = []
    for r in rows:
        comps = chain_comparisons(r.q, r.phi, delta_plus)
        per_k.append({"k": r.q, "comparisons": [c.to_json() for c in comps]})
    summary = {}
    for idx, name in enumerate(CHAIN_NAMES):
        statuses = [row["comparisons"][idx]["status"] for row in per_k]
        first = next((i for i, s in enumerate(statuses) if s == "HOLDS"), None)
        monotone = first is None or all(s == "HOLDS" for s in statuses[first:])
        summary[name] = {"firstHolds": None if first is None else rows[first].q,
                         "holdsThereafter": monotone,
                         "indeterminate": statuses.count("INDETERMINATE")}
    decisive = all(v["indeterminate"] == 0 for v in summary.values())
    return {"deltaPlus": delta_plus, "delta": DELTA, "rows": [bound_row(r) for r in rows],
            "chain": per_k, "summary": summary,
            "pass": decisive and all(v["holdsThereafter"] for v in summary.values())}


def fill_bound(g):
    """57 g / (sqrt(ln g) sqrt(lnlnln g)), defined for g >= 16."""
    if g < 16:
        raise CoxsysError("DOMAIN", f"g = {g} < 16")
    lg = math.log(g)
    return 57 * g / (math.sqrt(lg) * math.sqrt(math.log(math.log(lg))))


def systole_count_comparison(g, k, delta_plus=DELTA_PLUS):
    """6g/k against 6 delta+ g / (sqrt(lnlnln g) sqrt(ln g))."""
    if g < 16:
        raise CoxsysError("DOMAIN", f"g = {g} < 16")
    lg = math.log(g)
    rhs = 6 * delta_plus * g / (math.sqrt(math.log(math.log(lg))) * math.sqrt(lg))
    return Comparison("systoleCount", rhs, 6 * g / k)
