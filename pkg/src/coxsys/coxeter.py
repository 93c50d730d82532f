"""Coxeter matrices, word reduction, girth, partitions and loop reduction.

Generators are 0-based integers internally.  Serialized words use 1-based
comma separated indices ("1,3,1,3").  ``INFINITY`` marks m(s, t) = oo.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import CoxsysError, VerificationError

INFINITY = math.inf
DEFAULT_SEARCH_CAP = 10 ** 5


# -- matrices -----------------------------------------------------------------

@dataclass(frozen=True)
class CoxeterMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise CoxsysError("MALFORMED_MATRIX", f"row {i} has length {len(row)}")
            for j, m in enumerate(row):
                if m != rows[j][i]:
                    raise CoxsysError("MALFORMED_MATRIX", f"asymmetric at ({i},{j})")
                if i == j and m != 1:
                    raise CoxsysError("MALFORMED_MATRIX", f"diagonal entry {m} at {i}")
                if i != j and not (m == INFINITY or (isinstance(m, int) and m >= 2)):
                    raise CoxsysError("MALFORMED_MATRIX", f"entry {m} at ({i},{j})")

    @property
    def size(self):
        return len(self.entries)

    def m(self, s, t):
        return self.entries[s][t]


def wk_matrix(k):
    """The matrix of W(k): m = 2 at distance 1, k at distance 2, oo at distance 3."""
    if k < 2:
        raise CoxsysError("K_TOO_SMALL", f"k={k}")
    by_dist = {0: 1, 1: 2, 2: k, 3: INFINITY}
    return CoxeterMatrix(tuple(tuple(by_dist[min((i - j) % 6, (j - i) % 6)]
                                     for j in range(6)) for i in range(6)))


def validate_and_girth(M, subset=None):
    """2 * min m(s, t) over distinct s, t in ``subset``; INFINITY if none is finite."""
    subset = sorted(range(M.size) if subset is None else set(subset))
    if not subset:
        raise CoxsysError("EMPTY_SUBSET", "generator subset must be nonempty")
    best = INFINITY
    for a, s in enumerate(subset):
        for t in subset[a + 1:]:
            best = min(best, M.m(s, t))
    return 2 * best


# -- words --------------------------------------------------------------------

def parse_word(text):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(tok) - 1 for tok in text.replace(" ", ",").split(",") if tok)
    except ValueError as err:
        raise CoxsysError("MALFORMED_WORD", f"not a comma-separated letter list: {text!r}") from err


def format_word(w):
    return ",".join(str(s + 1) for s in w)


def _check_word(w, M):
    for s in w:
        if not 0 <= s < M.size:
            raise CoxsysError("BAD_LETTER", f"letter {s + 1} outside alphabet of size {M.size}")


def least_rotation(w):
    w = tuple(w)
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


@dataclass(frozen=True)
class CyclicWord:
    """A word modulo rotation, stored as its lexicographically least rotation."""
    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", least_rotation(self.letters))

    def __len__(self):
        return len(self.letters)


# -- Tits reduction -----------------------------------------------------------

@dataclass(frozen=True)
class ReductionStep:
    kind: str        # "BRAID" (type 2) or "DELETE" (type 1)
    position: int
    length: int      # letters touched: m for a braid move, 2 for a deletion


@dataclass
class ReductionResult:
    word: tuple
    trace: list
    canonical: bool = True

    @property
    def flags(self):
        return [] if self.canonical else ["NONCANONICAL"]


def _braid_neighbors(w, M):
    n = len(w)
    for p in range(n - 1):
        s, t = w[p], w[p + 1]
        if s == t:
            continue
        m = M.m(s, t)
        if m == INFINITY or p + m > n:
            continue
        if all(w[p + j] == (s if j % 2 == 0 else t) for j in range(m)):
            swapped = tuple(t if j % 2 == 0 else s for j in range(m))
            yield p, m, w[:p] + swapped + w[p + m:]


def _adjacent_pair(w):
    for p in range(len(w) - 1):
        if w[p] == w[p + 1]:
            return p
    return None


def _orbit_search(w, M, cap):
    """BFS over the braid orbit of ``w``.

    Returns (found, parents, complete): ``found`` is a word with an adjacent
    equal pair, or None if the explored orbit has none.
    """
    parents = {w: None}
    queue = deque([w])
    while queue:
        cur = queue.popleft()
        if _adjacent_pair(cur) is not None:
            return cur, parents, True
        for p, m, nxt in _braid_neighbors(cur, M):
            if nxt not in parents:
                if len(parents) >= cap:
                    return None, parents, False
                parents[nxt] = (cur, p, m)
                queue.append(nxt)
    return None, parents, True


def _path_to(word, parents):
    steps = []
    while parents[word] is not None:
        prev, p, m = parents[word]
        steps.append(ReductionStep("BRAID", p, m))
        word = prev
    return steps[::-1]


def _geometric_deletion(w, M):
    """Positions (i, j) such that deleting letters i and j keeps the element.

    Used only when the braid orbit is too large to search.  Follows the
    deletion condition with roots of the float geometric representation.
    Returns None if ``w`` is reduced.
    """
    n = M.size

    def bil(s, t):
        m = M.m(s, t)
        return -1.0 if m == INFINITY else -math.cos(math.pi / m)

    def reflect(s, vec):
        c = sum(2 * bil(s, t) * vec[t] for t in range(n))
        out = list(vec)
        out[s] -= c
        return out

    for j in range(1, len(w)):
        root = [0.0] * n
        root[w[j]] = 1.0
        for i in range(j - 1, -1, -1):
            unit = [0.0] * n
            unit[w[i]] = 1.0
            if max(abs(a - b) for a, b in zip(root, unit)) < 1e-9:
                return i, j
            root = reflect(w[i], root)
    return None


def reduce(w, M, search_cap=DEFAULT_SEARCH_CAP):
    """Reduce ``w`` by elementary reductions and return its canonical form.

    The canonical form is the lexicographically least word in the braid orbit
    of the reduced word.
    """
    w = tuple(w)
    _check_word(w, M)
    trace = []
    while True:
        found, parents, complete = _orbit_search(w, M, search_cap)
        if found is not None:
            trace.extend(_path_to(found, parents))
            p = _adjacent_pair(found)
            trace.append(ReductionStep("DELETE", p, 2))
            w = found[:p] + found[p + 2:]
            continue
        if complete:
            return ReductionResult(min(parents), trace, True)
        pair = _geometric_deletion(w, M)
        if pair is None:
            return ReductionResult(w, trace, False)
        i, j = pair
        trace.append(ReductionStep("DELETE_PAIR", i, j - i + 1))
        w = w[:i] + w[i + 1:j] + w[j + 1:]


def is_identity_by_reduction(w, M, search_cap=DEFAULT_SEARCH_CAP):
    return len(reduce(w, M, search_cap).word) == 0


# -- partitions and supports --------------------------------------------------

@dataclass(frozen=True)
class Partition:
    red: frozenset
    blue: frozenset

    def __post_init__(self):
        object.__setattr__(self, "red", frozenset(self.red))
        object.__setattr__(self, "blue", frozenset(self.blue))
        if self.red & self.blue:
            raise CoxsysError("MALFORMED_PARTITION", "red and blue overlap")

    def validate_for(self, M):
        if self.red | self.blue != frozenset(range(M.size)):
            raise CoxsysError("MALFORMED_PARTITION", "partition does not cover the alphabet")


def wk_partition():
    """R = {s1, s3, s5}, B = {s2, s4, s6} (0-based {0, 2, 4} and {1, 3, 5})."""
    return Partition(frozenset({0, 2, 4}), frozenset({1, 3, 5}))


@dataclass(frozen=True)
class PartitionReport:
    right_angled: bool
    gal: bool
    red_girth: float
    blue_girth: float


def _girth_or_inf(M, subset):
    return validate_and_girth(M, subset) if subset else INFINITY


def check_partition(M, P):
    P.validate_for(M)
    cross = [M.m(r, b) for r in P.red for b in P.blue]
    right = all(m == 2 or m == INFINITY for m in cross)
    gal = all(m == INFINITY or m % 2 == 0 for m in cross)
    return PartitionReport(right, gal, _girth_or_inf(M, P.red), _girth_or_inf(M, P.blue))


def commuting_subset(M, subset, t):
    """{s in subset : m(s, t) = 2}."""
    return frozenset(s for s in subset if s != t and M.m(s, t) == 2)


@dataclass(frozen=True)
class SignSupport:
    sign: int
    support: frozenset
    commuting_sets: dict = field(hash=False)


def sign_support(w, M, search_cap=DEFAULT_SEARCH_CAP):
    w = tuple(w)
    _check_word(w, M)
    support = frozenset(reduce(w, M, search_cap).word)
    comm = {t: commuting_subset(M, support, t) for t in range(M.size)}
    return SignSupport(-1 if len(w) % 2 else 1, support, comm)


# -- loop reduction -----------------------------------------------------------

@dataclass(frozen=True)
class HomotopyMove:
    kind: str                # "DELETE_TT" or "SQUARE_SUS"
    position: int
    s: int | None = None
    u: tuple = ()

    def to_json(self):
        return {"kind": self.kind, "position": self.position,
                "s": None if self.s is None else self.s + 1,
                "u": [x + 1 for x in self.u]}


def apply_move(letters, move):
    """Apply ``move`` to a cyclic word given in its canonical rotation."""
    w = least_rotation(letters)
    n = len(w)
    p = move.position
    if move.kind == "DELETE_TT":
        if n < 2 or w[p] != w[(p + 1) % n]:
            raise VerificationError("BAD_MOVE", f"no repeated letter at {p}")
        rot = w[p:] + w[:p]
        return least_rotation(rot[2:])
    if move.kind == "SQUARE_SUS":
        span = len(move.u) + 2
        rot = w[p:] + w[:p]
        if span > n or rot[:span] != (move.s,) + tuple(move.u) + (move.s,):
            raise VerificationError("BAD_MOVE", f"no s u s substring at {p}")
        return least_rotation(tuple(move.u) + rot[span:])
    raise VerificationError("BAD_MOVE", f"unknown move kind {move.kind}")


def _cyclic_repeat(w):
    n = len(w)
    for p in range(n):
        if w[p] == w[(p + 1) % n]:
            return p
    return None


def _inverse(w):
    return tuple(reversed(w))


def _loop_step(w, M, P, is_identity):
    n = len(w)
    p = _cyclic_repeat(w)
    if p is not None:
        return HomotopyMove("DELETE_TT", p)
    blue_pos = [i for i, s in enumerate(w) if s in P.blue]
    if not blue_pos:
        raise VerificationError("NO_SITE", "red-only loop without a repeated letter")
    candidates = []
    nb = len(blue_pos)
    for j in range(nb):
        a, b = blue_pos[j], blue_pos[(j + 1) % nb]
        if nb == 1:
            continue
        gap = (b - a - 1) % n
        u = tuple(w[(a + 1 + x) % n] for x in range(gap))
        s, s2 = w[a], w[b]
        # conjugates agree iff s * u * s2 * u^-1 = 1
        if s == s2 and is_identity((s,) + u + (s2,) + _inverse(u)):
            candidates.append((len(u), a, s, u))
    if not candidates:
        raise VerificationError("NO_SITE", "no adjacent equal conjugate letters")
    _, a, s, u = min(candidates)
    allowed = commuting_subset(M, P.red, s)
    if not set(u) <= allowed:
        raise VerificationError("NO_SITE", f"segment {format_word(u)} leaves R(s)")
    return HomotopyMove("SQUARE_SUS", a, s, u)


def reduce_loop(w, M, P, is_identity=None):
    """Sequence of homotopy moves taking the cyclic loop ``w`` to the empty word.

    ``is_identity`` decides whether a word is trivial in the group; by
    default it uses Tits reduction.  Each step first deletes a repeated
    letter if the cyclic word has one, otherwise it cancels the pair of
    equal blue letters whose red segment is shortest.
    """
    if is_identity is None:
        def is_identity(word):
            return is_identity_by_reduction(word, M)
    P.validate_for(M)
    report = check_partition(M, P)
    if not report.right_angled:
        raise CoxsysError("NOT_RIGHT_ANGLED", "partition is not right-angled")
    cw = CyclicWord(tuple(w.letters if isinstance(w, CyclicWord) else w))
    letters = cw.letters
    _check_word(letters, M)
    l_red = sum(1 for s in letters if s in P.red)
    l_blue = len(letters) - l_red
    if l_red >= report.red_girth or l_blue >= report.blue_girth:
        raise CoxsysError("PRECONDITION_LENGTH",
                          f"l_R={l_red} (girth {report.red_girth}), "
                          f"l_B={l_blue} (girth {report.blue_girth})")
    if letters and not is_identity(letters):
        raise CoxsysError("NOT_A_LOOP", format_word(letters))
    moves = []
    while letters:
        move = _loop_step(letters, M, P, is_identity)
        moves.append(move)
        letters = apply_move(letters, move)
    return moves


def replay(w, moves, is_identity=None):
    """Apply ``moves`` in order, checking each intermediate word is a loop."""
    letters = least_rotation(w.letters if isinstance(w, CyclicWord) else w)
    for move in moves:
        before = len(letters)
        letters = apply_move(letters, move)
        if len(letters) != before - 2:
            raise VerificationError("BAD_MOVE", "move did not remove two letters")
        if is_identity is not None and letters and not is_identity(letters):
            raise VerificationError("NOT_A_LOOP", "intermediate word is not a loop")
    return letters
