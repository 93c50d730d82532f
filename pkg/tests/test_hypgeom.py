import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coxsys.errors import CoxsysError
from coxsys.hypgeom import (
    SIDE_LENGTH,
    Crossing,
    Geodesic,
    Isometry,
    arc_violations,
    build_hexagon,
    geodesic_distance,
    hexagon_report,
    length_experiments,
    line_distance,
    mp_backend,
    short_loop_windows,
    trace_arc,
    translation_length,
    unfolding_consistent,
)

points = st.builds(complex, st.floats(-20, 20), st.floats(0.05, 20))


@pytest.fixture(scope="module")
def hexagon():
    return build_hexagon()


def _toward_side(j):
    # direction from the centre i to the midpoint of side j, turned from the upward vertical
    return 2 * math.pi * (j - 0.5) / 6 - math.pi / 2


def test_distance_examples():
    assert geodesic_distance(1j, 2j) == pytest.approx(math.log(2))
    assert geodesic_distance(1j, 1j) == 0
    assert geodesic_distance(1j, 1 + 1j) == pytest.approx(math.acosh(1.5))
    with pytest.raises(CoxsysError) as err:
        geodesic_distance(1j, 1 + 0j)
    assert err.value.code == "OUTSIDE_PLANE"


@settings(max_examples=200, deadline=None)
@given(points, points, points)
def test_distance_metric_axioms(p, q, r):
    d = geodesic_distance
    assert d(p, q) == pytest.approx(d(q, p), rel=1e-9, abs=1e-9)
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-7


@settings(max_examples=100, deadline=None)
@given(points, points)
def test_reflection_is_an_isometry(p, q):
    g = Geodesic(-1.0, 2.0).reflection()
    assert geodesic_distance(g(p), g(q)) == pytest.approx(geodesic_distance(p, q), rel=1e-7, abs=1e-7)


def test_line_distance():
    assert line_distance(Geodesic(-1, 1), Geodesic(-3, 3)) == pytest.approx(math.log(3))
    assert line_distance(Geodesic(-1, 1), Geodesic(0, 2)) == 0
    assert line_distance(Geodesic(0, 1), Geodesic(1, 2)) == 0


def test_line_distance_vertical_pair():
    # the lines x=0 and the unit circle about 3 are at distance acosh(3)
    assert line_distance(Geodesic(0, math.inf), Geodesic(2, 4)) == pytest.approx(math.acosh(3))


def test_degenerate_geodesic():
    with pytest.raises(CoxsysError) as err:
        Geodesic(1.0, 1.0)
    assert err.value.code == "DEGENERATE_GEODESIC"
    with pytest.raises(CoxsysError):
        Geodesic.through(1j, 1j)


def test_translation_errors():
    with pytest.raises(CoxsysError) as err:
        translation_length(Geodesic(0, 1).reflection())
    assert err.value.code == "NOT_ORIENTATION_PRESERVING"
    with pytest.raises(CoxsysError) as err:
        translation_length(Isometry((0, -1, 1, 0)))
    assert err.value.code == "NOT_HYPERBOLIC"
    assert translation_length(Isometry((2, 0, 0, 0.5))) == pytest.approx(2 * math.log(2))


def test_hexagon_report():
    rep = hexagon_report()
    assert rep["pass"]
    assert rep["coshSide"] == pytest.approx(2, abs=1e-12)
    for x in rep["sideLengths"]:
        assert abs(x - math.acosh(2)) < 1e-9
    for a in rep["angles"]:
        assert abs(a - math.pi / 2) < 1e-9
    for t in rep["translationLengths"]:
        assert abs(t - 2 * math.acosh(2)) < 1e-8


def test_hexagon_in_high_precision():
    num = mp_backend(40)
    h = build_hexagon(num)
    for j in range(6):
        assert abs(h.side_length(j) - num.acosh(2)) < num.real(10) ** -30
        assert abs(h.angle(j) - num.pi / 2) < num.real(10) ** -30


def test_perpendicular_ray_hits_the_aimed_side(hexagon):
    for j in range(6):
        tr = trace_arc(1j, _toward_side(j), 1.0, hexagon)
        assert tr.word == (j,)
        # asin is flat near pi/2, so the crossing angle carries about 8 digits
        assert tr.crossings[0].angle == pytest.approx(math.pi / 2, abs=1e-7)


def test_perpendicular_ray_alternates_opposite_sides(hexagon):
    first = trace_arc(1j, _toward_side(1), 1.0, hexagon).crossings[0].time
    tr = trace_arc(1j, _toward_side(1), 9 * first, hexagon)
    assert tr.word == (1, 4, 1, 4, 1)
    gaps = [b.time - a.time for a, b in zip(tr.crossings, tr.crossings[1:])]
    assert all(g == pytest.approx(2 * first, rel=1e-9) for g in gaps)
    assert all(g > SIDE_LENGTH for g in gaps)
    assert arc_violations(tr.crossings, 4) == []


def test_ray_from_outside_rejected(hexagon):
    with pytest.raises(CoxsysError) as err:
        trace_arc(50j, 0.0, 1.0, hexagon)
    assert err.value.code == "OUTSIDE_TILE"


def test_unfolding_short_arc(hexagon):
    tr = trace_arc(1.1j + 0.05, 0.7, 6.0, hexagon)
    assert len(tr.word) >= 2
    assert unfolding_consistent(tr, hexagon)


def test_arc_violations_detects_short_gaps():
    cr = [Crossing(0, 0.0, 1.0), Crossing(2, 0.1, 1.0)]
    kinds = {v[0] for v in arc_violations(cr, 4)}
    assert {"a1", "b1"} <= kinds
    cr = [Crossing(0, 0.0, 1.0), Crossing(1, 0.5, 1.0), Crossing(0, 0.9, 1.0)]
    kinds = {v[0] for v in arc_violations(cr, 4)}
    assert "a2" in kinds and "b1" in kinds


def test_short_loop_windows_finds_planted_loop():
    found = short_loop_windows((0, 1, 0, 1, 3), 4)
    assert ((0, 1, 0, 1), "reduced") in found
    assert short_loop_windows((0, 2, 4, 0, 2), 4) == []


def test_length_experiments_small():
    rep = length_experiments(300, 4, seed=1, precise_trials=5, loop_trials=20)
    assert rep["counterexamples"] == 0 and rep["unfoldingFailures"] == 0
    assert rep["shortLoopWindows"] == 0 and rep["pass"]
    assert rep["preciseRetraces"] == 5 and rep["precisionDigits"] >= 30
    assert all(v > 0 for v in rep["subarcsChecked"].values())


def test_length_experiments_thread_independent():
    one = length_experiments(520, 5, seed=3, precise_trials=2, loop_trials=5, threads=1)
    two = length_experiments(520, 5, seed=3, precise_trials=2, loop_trials=5, threads=2)
    assert one == two


def test_length_experiments_bad_trials():
    with pytest.raises(CoxsysError):
        length_experiments(0, 4)
