"""Hyperbolic plane kernel: the right-angled regular hexagon and ray tracing.

Upper half-plane model.  An isometry is a real 2x2 matrix (a, b, c, d) with
a flag; a reflecting isometry acts by z -> M(conj z).  Since the matrices are
real, composition is matrix product with the flags added mod 2.

A geodesic ray is stored as an orientation-preserving matrix B with the ray
equal to B(i e^t), t >= 0, in the frame of the base hexagon.  Crossing the
side with reflection S at time t* replaces B by S B D(t*) K, where
D(t) = diag(e^(t/2), e^(-t/2)) and K = diag(-1, 1) (z -> -z).

All routines take an arithmetic backend: FLOAT (doubles) or an mpmath
backend from ``mp_backend(dps)``.  Tracing is chaotic, so errors grow like
e^t; the mpmath backend is used where a long trace must be followed exactly.
"""

from __future__ import annotations

import cmath
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from types import SimpleNamespace

import mpmath

from .errors import CoxsysError

INF = math.inf
SIDE_LENGTH = math.acosh(2.0)
VERTEX_TOL = 1e-9
TANGENT_TOL = 1e-6

FLOAT = SimpleNamespace(
    name="float", real=float, cplx=complex, exp=math.exp, log=math.log, sqrt=math.sqrt,
    sin=math.sin, cos=math.cos, asin=math.asin, atanh=math.atanh, acosh=math.acosh,
    cexp=cmath.exp, arg=cmath.phase, pi=math.pi, eps=2.0 ** -52, dps=15)


def mp_backend(dps):
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return SimpleNamespace(
        name=f"mp{dps}", real=ctx.mpf, cplx=ctx.mpc, exp=ctx.exp, log=ctx.log, sqrt=ctx.sqrt,
        sin=ctx.sin, cos=ctx.cos, asin=ctx.asin, atanh=ctx.atanh, acosh=ctx.acosh,
        cexp=ctx.exp, arg=ctx.arg, pi=+ctx.pi, eps=ctx.mpf(2) ** (-ctx.prec), dps=dps)


# -- 2x2 matrices and isometries ------------------------------------------------

def mat_mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_inv(m):
    a, b, c, d = m
    det = a * d - b * c
    return (d / det, -b / det, -c / det, a / det)


def mat_normalize(m, num=FLOAT):
    a, b, c, d = m
    det = a * d - b * c
    if det == 0:
        raise CoxsysError("DEGENERATE_ISOMETRY", "zero determinant")
    s = num.sqrt(abs(det))
    return (a / s, b / s, c / s, d / s)


def mobius(m, z):
    a, b, c, d = m
    if z == INF:
        return a / c if c != 0 else INF
    den = c * z + d
    if den == 0:
        return INF
    return (a * z + b) / den


def _real_image(m, x):
    """Image of a boundary point (real or INF) under a real Mobius matrix."""
    a, b, c, d = m
    if x == INF:
        return a / c if c != 0 else INF
    den = c * x + d
    if den == 0:
        return INF
    return (a * x + b) / den


@dataclass(frozen=True)
class Isometry:
    matrix: tuple
    reflecting: bool = False

    def __matmul__(self, other):
        return Isometry(mat_mul(self.matrix, other.matrix), self.reflecting != other.reflecting)

    def __call__(self, z):
        if self.reflecting and z != INF:
            z = z.conjugate()
        return mobius(self.matrix, z)

    def inverse(self):
        return Isometry(mat_inv(self.matrix), self.reflecting)

    def distance_to_identity(self):
        """Max-entry distance to +-1 after normalizing (matrices are defined up to sign)."""
        if self.reflecting:
            return INF
        m = mat_normalize(self.matrix)
        eye = (1, 0, 0, 1)
        return float(min(max(abs(x - e) for x, e in zip(m, eye)),
                         max(abs(x + e) for x, e in zip(m, eye))))


# -- distances ------------------------------------------------------------------

def geodesic_distance(p, q, num=FLOAT):
    if p.imag <= 0 or q.imag <= 0:
        raise CoxsysError("OUTSIDE_PLANE", "points must lie in the upper half-plane")
    return num.acosh(1 + abs(p - q) ** 2 / (2 * p.imag * q.imag))


@dataclass(frozen=True)
class Geodesic:
    """Geodesic with ideal endpoints a, b; b may be INF."""
    a: object
    b: object

    def __post_init__(self):
        if self.a == self.b:
            raise CoxsysError("DEGENERATE_GEODESIC", f"equal endpoints {self.a}")
        if self.a == INF:
            object.__setattr__(self, "a", self.b)
            object.__setattr__(self, "b", INF)

    @classmethod
    def through(cls, p, q):
        """The geodesic through two points of the half-plane."""
        if p == q:
            raise CoxsysError("DEGENERATE_GEODESIC", "coincident points")
        if p.real == q.real:
            return cls(p.real, INF)
        x0 = (abs(p) ** 2 - abs(q) ** 2) / (2 * (p.real - q.real))
        rho = abs(p - x0)
        return cls(x0 - rho, x0 + rho)

    def reflection(self, num=FLOAT):
        if self.b == INF:
            return Isometry((-1, 2 * self.a, 0, 1), True)
        x0 = (self.a + self.b) / 2
        rho = abs(self.b - self.a) / 2
        return Isometry(mat_normalize((x0, rho * rho - x0 * x0, 1, -x0), num), True)

    def side_of(self, z):
        """Signed quantity telling which side of the geodesic contains z."""
        if self.b == INF:
            return z.real - self.a
        x0 = (self.a + self.b) / 2
        rho = abs(self.b - self.a) / 2
        return abs(z - x0) ** 2 - rho * rho


def cross_ratio(a, b, c, d):
    """(a - c)(b - d) / ((a - d)(b - c)) with INF entries cancelled."""
    num = [a - c if INF not in (a, c) else 1, b - d if INF not in (b, d) else 1]
    den = [a - d if INF not in (a, d) else 1, b - c if INF not in (b, c) else 1]
    return (num[0] * num[1]) / (den[0] * den[1])


def line_distance(g1, g2, num=FLOAT):
    """Length of the common perpendicular, 0 if the geodesics meet or are asymptotic."""
    if {g1.a, g1.b} & {g2.a, g2.b}:
        return 0 * num.real(0)
    chi = cross_ratio(g1.a, g1.b, g2.a, g2.b)
    if chi <= 0:
        return 0 * num.real(0)
    return 2 * num.atanh(num.sqrt(min(chi, 1 / chi)))


# -- the hexagon ----------------------------------------------------------------

def disk_to_plane(w):
    return 1j * (1 + w) / (1 - w)


def plane_to_disk(z):
    return (z - 1j) / (z + 1j)


def _disk_vertices(r, num=FLOAT):
    return [r * num.cexp(1j * (2 * num.pi * j / 6 - num.pi / 2)) for j in range(6)]


def _disk_vertex_angle(r, num=FLOAT):
    """Interior angle of the regular hexagon with Euclidean disk radius r,
    measured after moving a vertex to the centre of the disk."""
    v = _disk_vertices(r, num)
    v0 = v[0]

    def move(w):
        return (w - v0) / (1 - v0.conjugate() * w)

    return abs(num.arg(move(v[-1]) / move(v[1])))


def solve_vertex_radius(num=FLOAT):
    """Bisection on the Euclidean disk radius giving right angles."""
    lo, hi = num.real(1e-6), 1 - num.real(1e-9)
    half_pi = num.pi / 2
    if not (_disk_vertex_angle(lo, num) > half_pi > _disk_vertex_angle(hi, num)):
        raise CoxsysError("CONVERGENCE_FAILED", "angle condition not bracketed")
    for _ in range(20 * num.dps):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi or hi - lo < 4 * num.eps:
            return mid
        if _disk_vertex_angle(mid, num) > half_pi:
            lo = mid
        else:
            hi = mid
    raise CoxsysError("CONVERGENCE_FAILED", "bisection did not converge")


def _tangent_toward(g, v, w):
    """Unit tangent at v of the geodesic g, pointing toward w."""
    if g.b == INF:
        return 1j if w.imag > v.imag else -1j
    x0 = (g.a + g.b) / 2
    radial = v - x0
    t = 1j * radial / abs(radial)
    if ((w - v) * t.conjugate()).real < 0:
        t = -t
    return t


@dataclass
class HexagonModel:
    """V_j is the corner where side j meets side j + 1 (0-based, anticlockwise)."""
    vertices: list
    sides: list
    reflections: list
    center: complex
    circumradius: float
    num: SimpleNamespace = field(default=FLOAT, repr=False)

    def side_length(self, j):
        return geodesic_distance(self.vertices[(j - 1) % 6], self.vertices[j], self.num)

    def angle(self, j):
        """Interior angle at V_j, from Euclidean tangents in the half-plane."""
        v = self.vertices[j]
        t1 = _tangent_toward(self.sides[j], v, self.vertices[(j - 1) % 6])
        t2 = _tangent_toward(self.sides[(j + 1) % 6], v, self.vertices[(j + 1) % 6])
        return abs(self.num.arg(t1 / t2))

    def contains(self, z, tol=VERTEX_TOL):
        for g in self.sides:
            ref = g.side_of(self.center)
            val = g.side_of(z)
            sign = 1 if ref > 0 else -1
            if val * sign < -tol * max(1, abs(ref)):
                return False
        return True


def build_hexagon(num=FLOAT):
    r = solve_vertex_radius(num)
    verts = [disk_to_plane(w) for w in _disk_vertices(r, num)]
    sides = [Geodesic.through(verts[(j - 1) % 6], verts[j]) for j in range(6)]
    refl = [g.reflection(num) for g in sides]
    return HexagonModel(verts, sides, refl, num.cplx(1j), 2 * num.atanh(r), num)


def translation_length(iso, num=FLOAT):
    """Translation length of an orientation-preserving hyperbolic isometry."""
    if iso.reflecting:
        raise CoxsysError("NOT_ORIENTATION_PRESERVING", "reflection has no translation length")
    a, b, c, d = mat_normalize(iso.matrix, num)
    tr = abs(a + d)
    if tr <= 2:
        raise CoxsysError("NOT_HYPERBOLIC", f"|trace| = {tr}")
    return 2 * num.acosh(tr / 2)


def hexagon_report(tol=1e-9):
    """Side lengths, angles, relations and the translations s_(i-1) s_(i+1)."""
    h = build_hexagon()
    lengths = [h.side_length(j) for j in range(6)]
    angles = [h.angle(j) for j in range(6)]
    refl = h.reflections
    inv_err = max((refl[j] @ refl[j]).distance_to_identity() for j in range(6))
    comm_err = max(((refl[j] @ refl[(j + 1) % 6]) @ (refl[j] @ refl[(j + 1) % 6]))
                   .distance_to_identity() for j in range(6))
    trans = []
    axis_err = 0.0
    for j in range(6):
        t = refl[(j - 1) % 6] @ refl[(j + 1) % 6]
        trans.append(translation_length(t))
        g = h.sides[j]
        for x in (g.a, g.b):
            y = _real_image(t.matrix, x)
            err = 0.0 if x == y == INF else abs(y - x) / max(1.0, abs(x))
            axis_err = max(axis_err, err)
    report = {"sideLengths": lengths, "angles": angles,
              "coshSide": math.cosh(lengths[0]), "coshCircumradius": math.cosh(h.circumradius),
              "involutionError": inv_err, "commutationError": comm_err,
              "translationLengths": trans, "axisError": axis_err,
              "sideOk": all(abs(x - SIDE_LENGTH) < tol for x in lengths),
              "angleOk": all(abs(a - math.pi / 2) < tol for a in angles),
              "relationsOk": inv_err < tol and comm_err < tol,
              "translationOk": all(abs(x - 2 * SIDE_LENGTH) < tol for x in trans)
              and axis_err < tol}
    report["pass"] = report["sideOk"] and report["angleOk"] and report["relationsOk"] \
        and report["translationOk"]
    return report


# -- ray tracing ------------------------------------------------------------------

def ray_frame(start, angle, num=FLOAT):
    """Matrix B with B(i e^t) the unit-speed ray from ``start`` whose initial
    direction is turned by ``angle`` from the upward vertical."""
    x, y = start.real, start.imag
    sy = num.sqrt(y)
    translate = (sy, x / sy, 0 * sy, 1 / sy)
    c, s = num.cos(angle / 2), num.sin(angle / 2)
    return mat_mul(translate, (c, s, -s, c))


def _scale(t, num):
    e = num.exp(t / 2)
    return (e, 0 * e, 0 * e, 1 / e)


_FLIP = (-1, 0, 0, 1)


@dataclass
class Crossing:
    index: int        # 0-based side index
    time: float       # arclength from the start
    angle: float      # angle between the ray and the side, radians
    vertex: bool = False


@dataclass
class ArcTrace:
    crossings: list
    length: float
    tile: Isometry        # maps the base hexagon onto the tile holding the endpoint
    end_local: complex    # endpoint in the base hexagon frame
    end_global: complex
    rejected: bool = False

    @property
    def word(self):
        return tuple(c.index for c in self.crossings)


def _hits(hexagon, B, last, num):
    inv = mat_inv(B)
    out = []
    for j, g in enumerate(hexagon.sides):
        p, q = _real_image(inv, g.a), _real_image(inv, g.b)
        if p == INF or q == INF or p * q >= 0:
            continue
        y = num.sqrt(-p * q)
        t = num.log(y)
        if t <= 1e-12 or (j == last and t < 1e-7):
            continue
        rho = abs(p - q) / 2
        out.append((t, j, num.asin(min(1, y / rho))))
    out.sort(key=lambda h: h[0])
    return out


def trace_arc(start, angle, length, hexagon=None):
    """Crossings of the geodesic ray from ``start`` (inside the base hexagon)
    up to arclength ``length``, in the arithmetic of the hexagon."""
    h = hexagon or build_hexagon()
    num = h.num
    if not h.contains(start, tol=0):
        raise CoxsysError("OUTSIDE_TILE", "start must lie inside the base hexagon")
    B0 = ray_frame(start, angle, num)
    B = B0
    tile = Isometry((1, 0, 0, 1))
    elapsed = 0 * num.real(0)
    last = None
    crossings = []
    rejected = False
    while True:
        hits = _hits(h, B, last, num)
        if not hits or elapsed + hits[0][0] > length:
            break
        t, j, ang = hits[0]
        if ang < TANGENT_TOL:
            rejected = True
        elapsed += t
        if len(hits) > 1 and hits[1][0] - t < VERTEX_TOL:
            j2 = hits[1][1]
            if (j2 - j) % 6 == 1:
                first, second = j, j2
            elif (j - j2) % 6 == 1:
                first, second = j2, j
            else:
                raise CoxsysError("VERTEX_AMBIGUITY", f"sides {j + 1},{j2 + 1} are not adjacent")
            crossings.append(Crossing(first, elapsed, ang, True))
            crossings.append(Crossing(second, elapsed, ang, True))
            S = mat_mul(h.reflections[first].matrix, h.reflections[second].matrix)
            B = mat_mul(mat_mul(S, B), _scale(t, num))
            tile = tile @ h.reflections[first] @ h.reflections[second]
            last = None
        else:
            crossings.append(Crossing(j, elapsed, ang))
            B = mat_mul(mat_mul(mat_mul(h.reflections[j].matrix, B), _scale(t, num)), _FLIP)
            tile = tile @ h.reflections[j]
            last = j
        B = mat_normalize(B, num)
    end_local = mobius(B, 1j * num.exp(length - elapsed))
    end_global = mobius(B0, 1j * num.exp(num.real(length)))
    return ArcTrace(crossings, length, tile, end_local, end_global, rejected)


def unfolding_consistent(trace, hexagon, tol=VERTEX_TOL):
    """The tile reached by reflecting across the crossed sides contains the
    true endpoint of the ray, and the local trace lands on it."""
    num = hexagon.num
    pulled = trace.tile.inverse()(trace.end_global)
    drift = max(1e-9, 64 * num.eps * num.exp(num.real(trace.length)))
    return hexagon.contains(pulled, tol=tol) and \
        geodesic_distance(pulled, trace.end_local, num) < drift


def precise_backend(length, digits=20):
    """An mpmath backend with enough digits to follow a ray of this length."""
    return mp_backend(digits + int(length / math.log(10)) + 1)


def random_interior_point(hexagon, rng):
    r = float(abs(plane_to_disk(complex(hexagon.vertices[0]))))
    while True:
        w = complex(rng.uniform(-r, r), rng.uniform(-r, r))
        if abs(w) >= r:
            continue
        z = disk_to_plane(w)
        if hexagon.contains(z, tol=0):
            return z


# -- length experiments -------------------------------------------------------------

RED = frozenset({0, 2, 4})
BLUE = frozenset({1, 3, 5})


def arc_violations(crossings, k, L=SIDE_LENGTH):
    """Counterexamples to the subarc length bounds along one traced arc.

    a1: a single tile traversed between non-consecutive sides, length > L.
    a2: a subarc with two crossings after its start, length > L.
    b1: consecutive crossings of the same colour are more than L apart.
    b2: N >= 2k same-colour crossings after a same-colour start span > N L.
    """
    cr = crossings
    bad = []
    for n in range(len(cr) - 1):
        a, b = cr[n], cr[n + 1]
        if (b.index - a.index) % 6 in (2, 3, 4) and not b.time - a.time > L:
            bad.append(("a1", n, float(b.time - a.time)))
    for n in range(len(cr) - 2):
        if not cr[n + 2].time - cr[n].time > L:
            bad.append(("a2", n, float(cr[n + 2].time - cr[n].time)))
    for colour in (RED, BLUE):
        times = [c.time for c in cr if c.index in colour]
        for n in range(len(times) - 1):
            if not times[n + 1] - times[n] > L:
                bad.append(("b1", n, float(times[n + 1] - times[n])))
        for n in range(len(times)):
            for m in range(n + 2 * k, len(times)):
                if not times[m] - times[n] > (m - n) * L:
                    bad.append(("b2", n, float(times[m] - times[n])))
    return bad


def short_loop_windows(word, k, max_len=None):
    """Windows of a crossing word that close up in W(k) while having fewer than
    2k red and fewer than 2k blue letters.

    A geodesic never re-enters a tile of the plane, so such a window would be
    an essential loop that the loop reducer claims is null-homotopic; none
    should exist.  Any found are returned with the reducer's verdict.
    """
    from .coxeter import reduce_loop, wk_matrix, wk_partition
    from .tits import tits_rep

    rep = tits_rep(k)
    M, P = wk_matrix(k), wk_partition()
    max_len = max_len or 4 * k
    found = []
    for n in range(len(word)):
        for m in range(n + 2, min(len(word), n + max_len) + 1, 2):
            w = word[n:m]
            l_red = sum(1 for s in w if s in RED)
            if l_red >= 2 * k or len(w) - l_red >= 2 * k:
                continue
            if rep.is_identity_word(w):
                try:
                    reduce_loop(w, M, P, is_identity=rep.is_identity_word)
                    verdict = "reduced"
                except CoxsysError as exc:
                    verdict = exc.code
                found.append((w, verdict))
    return found


@lru_cache(maxsize=None)
def _hexagon_cached(dps):
    return build_hexagon(FLOAT if dps is None else mp_backend(dps))


def run_trial(index, seed, k, arc_len, precise_dps=None, loop_check=False):
    """One random arc, seeded by (seed, index) so trials are order-independent.
    Near-tangent crossings are resampled with a fresh attempt seed."""
    h = _hexagon_cached(None)
    attempt = 0
    while True:
        rng = random.Random(f"{seed}:{index}:{attempt}")
        start = random_interior_point(h, rng)
        angle = rng.uniform(0, 2 * math.pi)
        trace = trace_arc(start, angle, arc_len, h)
        if not trace.rejected:
            break
        attempt += 1
    cr, word = trace.crossings, trace.word
    red = sum(1 for s in word if s in RED)
    blue = len(word) - red
    out = {"index": index, "rejected": attempt, "red": red, "blue": blue,
           "a1": sum(1 for a, b in zip(cr, cr[1:]) if (b.index - a.index) % 6 in (2, 3, 4)),
           "a2": max(0, len(cr) - 2),
           "b1": max(0, red - 1) + max(0, blue - 1),
           "b2": sum(max(0, c - 2 * k) * (c - 2 * k + 1) // 2 for c in (red, blue)),
           "failures": arc_violations(cr, k), "start": [start.real, start.imag],
           "angle": angle}
    if precise_dps is not None:
        hp = _hexagon_cached(precise_dps)
        num = hp.num
        exact = trace_arc(num.cplx(start), num.real(angle), num.real(arc_len), hp)
        out["unfolded"] = unfolding_consistent(exact, hp)
        out["wordMatch"] = exact.word == word
        out["failures"] += [("precise",) + f for f in arc_violations(exact.crossings, k)]
    if loop_check:
        out["loops"] = [[s + 1 for s in w] for w, _ in short_loop_windows(word, k)]
    return out


def _run_chunk(args):
    indices, seed, k, arc_len, precise, loop_trials = args
    dps, precise_trials = precise
    return [run_trial(i, seed, k, arc_len, dps if i < precise_trials else None,
                      i < loop_trials) for i in indices]


def length_experiments(trials, k, seed=0, length=None, precise_trials=20, loop_trials=100,
                       threads=1):
    """Random geodesic arcs in the hexagon tiling checked against the subarc
    length bounds.  The first ``precise_trials`` arcs are retraced in mpmath
    to confirm the unfolding and the float crossing words.  Results do not
    depend on ``threads``."""
    if trials < 1:
        raise CoxsysError("BAD_ARGUMENT", "trials must be >= 1")
    arc_len = length if length is not None else (4 * k + 2) * SIDE_LENGTH
    dps = precise_backend(arc_len).dps
    chunks = [list(range(i, min(trials, i + 250))) for i in range(0, trials, 250)]
    jobs = [(c, seed, k, arc_len, (dps, precise_trials), loop_trials) for c in chunks]
    if threads > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = [r for part in pool.map(_run_chunk, jobs) for r in part]
    else:
        results = [r for job in jobs for r in _run_chunk(job)]
    stats = {key: sum(r[key] for r in results) for key in ("a1", "a2", "b1", "b2")}
    bad = [{"trial": r["index"], "start": r["start"], "angle": r["angle"],
            "failures": r["failures"][:5]} for r in results if r["failures"]]
    precise = [r for r in results if "unfolded" in r]
    loops = [w for r in results for w in r.get("loops", [])]
    unfold_fail = sum(1 for r in precise if not r["unfolded"])
    return {"k": k, "trials": trials, "seed": seed, "arcLength": arc_len,
            "rejected": sum(r["rejected"] for r in results), "subarcsChecked": stats,
            "maxSameColour": max(max(r["red"], r["blue"]) for r in results),
            "counterexamples": len(bad), "examples": bad[:5],
            "preciseRetraces": len(precise), "precisionDigits": dps,
            "unfoldingFailures": unfold_fail,
            "floatWordMismatches": sum(1 for r in precise if not r["wordMatch"]),
            "loopWindowArcs": min(trials, loop_trials), "shortLoopWindows": len(loops),
            "loopExamples": loops[:5],
            "pass": not bad and unfold_fail == 0 and not loops}
