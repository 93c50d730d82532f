"""Command-line entry point: ``coxsys <subcommand> [flags]``.

Every run prints one report with a ``config`` header (the fully resolved
flags) and a ``result`` body.  Exit codes: 0 success, 1 usage error,
2 verification failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys

from . import __version__
from .errors import CoxsysError, VerificationError

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

# domain errors that mean a mathematical check failed rather than a bad invocation
VERIFY_CODES = frozenset({"CONDITION_11_1_VIOLATED", "CONDITION_11_2_VIOLATED", "NONORIENTABLE",
                          "EARLY_CURVE_CLOSURE", "INVALID_DATUM", "VERTEX_AMBIGUITY",
                          "CONVERGENCE_FAILED"})


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "INFINITY"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in items]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return x.item()
    return x


def _word(text):
    from .coxeter import parse_word
    try:
        return parse_word(text)
    except CoxsysError as err:
        raise UsageError(f"--word: {err}") from err


# -- subcommands ------------------------------------------------------------------

def cmd_reduce(a):
    from .coxeter import format_word, reduce, wk_matrix
    res = reduce(_word(a.word), wk_matrix(a.k), a.search_cap)
    return {"input": a.word, "reduced": format_word(res.word), "length": len(res.word),
            "trace": [{"kind": s.kind, "position": s.position, "length": s.length}
                      for s in res.trace], "flags": res.flags}


def cmd_loop_reduce(a):
    from .coxeter import format_word, reduce_loop, replay, wk_matrix, wk_partition
    from .tits import tits_rep
    w = _word(a.word)
    oracle = tits_rep(a.k).is_identity_word
    moves = reduce_loop(w, wk_matrix(a.k), wk_partition(), is_identity=oracle)
    final = replay(w, moves, is_identity=oracle)
    return {"input": a.word, "moves": [m.to_json() for m in moves], "moveCount": len(moves),
            "final": format_word(final), "pass": len(final) == 0 and 2 * len(moves) == len(w)}


def cmd_partition(a):
    from .coxeter import check_partition, wk_matrix, wk_partition
    r = check_partition(wk_matrix(a.k), wk_partition())
    return {"red": [1, 3, 5], "blue": [2, 4, 6], "rightAngled": r.right_angled, "gal": r.gal,
            "redGirth": r.red_girth, "blueGirth": r.blue_girth}


def cmd_minpoly(a):
    from .numberfield import make_context
    ctx = make_context(a.k)
    return {"psi": list(ctx.psi), "degree": ctx.degree}


def cmd_gram(a):
    from .tits import gram
    g = gram(a.k).to_json()
    g["pass"] = g["agree"] and g["nonzero"]
    return g


def cmd_relations(a):
    from .tits import verify_relations
    return verify_relations(a.k)


def cmd_order(a):
    from .tits import element_order
    n = element_order(_word(a.word), a.k, a.cap)
    if n is None:
        return {"word": a.word, "order": None, "error": "CAP_EXCEEDED", "cap": a.cap}
    return {"word": a.word, "order": n}


def cmd_norms(a):
    from .tits import norm_checks
    return norm_checks(a.k, a.radius, trials=a.trials, seed=a.seed)


def cmd_ball(a):
    from .ball import ball_enumerate, check_ball_closure
    b = ball_enumerate(a.k, a.radius, use_cache=a.cache)
    return {"k": a.k, "radius": a.radius, "sizes": list(b.sizes),
            "sphereSizes": [b.sizes[0]] + [y - x for x, y in zip(b.sizes, b.sizes[1:])],
            "closed": check_ball_closure(b)}


def cmd_avoid(a):
    from .congruence import ball_avoidance_certificate, default_m
    m = a.m if a.m is not None else default_m(a.k)
    return ball_avoidance_certificate(a.k, m, a.radius).to_json()


def _datum(a):
    from .quotient import PrimeDatum
    from .surface import pauli_square_datum
    if a.pauli:
        if a.k != 4:
            raise UsageError("--pauli: the Pauli datum is defined for --k 4 only")
        return pauli_square_datum()
    if a.prime is None:
        raise UsageError("--prime: required unless --pauli is given")
    return PrimeDatum(a.k, a.prime)


def cmd_quotient_order(a):
    from .quotient import quotient_order
    seeds = [a.seed + i for i in range(a.seeds)]
    d = _datum(a)
    d.validate()
    out = quotient_order(d, seeds=seeds, closure_cap=a.closure_cap).to_json()
    out.update({"k": a.k, "datum": d.label})
    return out


def cmd_surface(a):
    from .surface import build_surface, export_surface, import_surface, systole_report
    d = _datum(a)
    s = build_surface(d, tile_cap=a.tile_cap)
    out = {"datum": d.label, "k": s.k, "f0": s.f0, "f1": s.f1, "f2": s.f2, "genus": s.genus,
           "curves": s.f1 // (2 * s.k), "countsOnly": s.counts_only,
           "systole": systole_report(s)}
    if a.export:
        export_surface(s, a.export)
        out["exported"] = a.export
        out["roundTrip"] = import_surface(a.export) == s
        out["pass"] = out["roundTrip"]
    return out


def cmd_hexagon(a):
    from .hypgeom import hexagon_report
    return hexagon_report(tol=a.tolerance)


def cmd_arcs(a):
    from .hypgeom import length_experiments
    return length_experiments(a.trials, a.k, seed=a.seed, threads=a.threads)


def cmd_bounds(a):
    from .asymptotics import DELTA, bound_chain, landau_table
    chain = bound_chain(a.primorials, a.delta_plus)
    return {"delta": DELTA, "sixDelta": 6 * DELTA, "deltaPlus": a.delta_plus,
            "landau": landau_table(a.primorials), "rows": chain["rows"],
            "chain": chain["chain"], "summary": chain["summary"], "pass": chain["pass"]}


# -- parser -------------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--deterministic", action="store_true",
                        help="omit the timestamp so identical runs give identical bytes")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes (default: available cores)")
    common.add_argument("--format", choices=("json", "tsv"), default="json")
    common.add_argument("--tolerance", type=float, default=1e-9)

    p = _Parser(prog="coxsys", description="Coxeter group W(k) toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_text, *, k=True, k_default=4):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if k:
            sp.add_argument("--k", type=int, default=k_default, help=f"default {k_default}")
        sp.set_defaults(func=func)
        return sp

    sp = add("reduce", cmd_reduce, "reduce a word to canonical reduced form")
    sp.add_argument("--word", required=True, help="comma-separated 1-based letters, e.g. 2,1,2")
    sp.add_argument("--search-cap", type=int, default=10 ** 5)
    sp = add("loop-reduce", cmd_loop_reduce, "reduce a null-homotopic cyclic loop")
    sp.add_argument("--word", required=True)
    add("partition", cmd_partition, "check the red/blue partition of W(k)")
    add("minpoly", cmd_minpoly, "minimal polynomial of 2cos(pi/k)")
    add("gram", cmd_gram, "Gram matrix and its determinant, three ways")
    add("relations", cmd_relations, "verify the defining relations of the Tits representation")
    sp = add("order", cmd_order, "order of rho(word)")
    sp.add_argument("--word", required=True)
    sp.add_argument("--cap", type=int, default=1000)
    sp = add("norms", cmd_norms, "norm bounds on a ball and on random index words")
    sp.add_argument("--radius", type=int, default=4)
    sp.add_argument("--trials", type=int, default=1000)
    sp = add("ball", cmd_ball, "enumerate the word-metric ball")
    sp.add_argument("--radius", type=int, default=4)
    sp.add_argument("--cache", action="store_true", help="use COXSYS_CACHE_DIR")
    sp = add("avoid", cmd_avoid, "ball-avoidance certificate for the level-3^m subgroup")
    sp.add_argument("--m", type=int, default=None, help="modulus exponent (default 4k)")
    sp.add_argument("--radius", type=int, default=4)
    for name, func, text in (("quotient-order", cmd_quotient_order, "order of a finite quotient"),
                             ("surface", cmd_surface, "build the tessellated surface")):
        sp = add(name, func, text)
        sp.add_argument("--prime", type=int, default=None)
        sp.add_argument("--pauli", action="store_true", help="use the order-256 datum at k=4")
        if name == "quotient-order":
            sp.add_argument("--seeds", type=int, default=5, help="number of seeds")
            sp.add_argument("--closure-cap", type=int, default=10 ** 6)
        else:
            sp.add_argument("--tile-cap", type=int, default=10 ** 6)
            sp.add_argument("--export", default=None, help="write the surface as JSON")
    add("hexagon", cmd_hexagon, "build and check the right-angled hexagon", k=False)
    sp = add("arcs", cmd_arcs, "Monte-Carlo subarc length checks")
    sp.add_argument("--trials", type=int, default=10 ** 4)
    sp = add("bounds", cmd_bounds, "Landau table and the systole-count bound chain", k=False)
    sp.add_argument("--primorials", type=int, default=10)
    sp.add_argument("--delta-plus", type=float, default=9.5)
    return p


def _validate(a):
    if getattr(a, "k", 3) < 3:
        raise UsageError("--k: must be >= 3")
    if a.threads < 1:
        raise UsageError("--threads: must be >= 1")
    for flag in ("radius", "trials", "primorials", "seeds", "cap"):
        v = getattr(a, flag, None)
        if v is not None and v < (0 if flag == "radius" else 1):
            raise UsageError(f"--{flag}: out of range ({v})")
    if getattr(a, "m", None) is not None and a.m < 1:
        raise UsageError("--m: must be >= 1")


def _emit(report, fmt, out):
    if fmt == "json":
        out.write(json.dumps(report, indent=2) + "\n")
        return
    for section in ("config", "result"):
        for key, value in report[section].items():
            if not isinstance(value, str):
                value = json.dumps(value)
            out.write(f"{section}.{key}\t{value}\n")


def run(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
    except UsageError as err:
        sys.stderr.write(f"usage error: {err}\n")
        return EXIT_USAGE
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    if not args.deterministic:
        config["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    code = EXIT_OK
    try:
        result = args.func(args)
        if isinstance(result, dict) and result.get("pass") is False:
            code = EXIT_VERIFY
    except UsageError as err:
        sys.stderr.write(f"usage error: {err}\n")
        return EXIT_USAGE
    except CoxsysError as err:
        result = {"error": err.code, "message": str(err)}
        verify = isinstance(err, VerificationError) or err.code in VERIFY_CODES
        code = EXIT_VERIFY if verify else EXIT_USAGE
    _emit({"config": _jsonable(config), "result": _jsonable(result)}, args.format, out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
