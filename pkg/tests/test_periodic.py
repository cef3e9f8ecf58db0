import json
import math
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone.actions import catalog, lyapunov_list, parse_action_file
from rankone.entropy_geometry import directional_entropy
from rankone.errors import InfiniteCount, InfiniteHull, ZeroExponent
from rankone.periodic import (
    INFINITE,
    FixCount,
    convex_hull_2d,
    convex_hull_3d,
    extreme_vertices_3d,
    count_at_most,
    fix_count,
    fix_grid,
    g_factor,
    grid_csv,
    growth_rate_window,
    hull_experiment,
    hull_points,
    hull_volume,
    inner_bracket_exceptions,
    lattice_ball,
    polygon_area,
    polyhedron_volume,
    restrict_expansive,
)

from oracles import LOG2, ledrappier_count, ledrappier_row_count, toral_embedding_product, x2x3_count, z5_count

GOLDEN = Path(__file__).parent / "golden"
X2X3 = catalog("times2_times3")
LED = catalog("ledrappier")
Z5 = catalog("z5_times2_times3")
TORAL = catalog("toral_sqrt2_sqrt5")


def _non_ergodic():
    # the first generator acts trivially, so alpha^(k, 0) fixes everything
    doc = {"name": "trivial_x2", "d": 2, "components": [
        {"kind": "rational-s-integer", "generators": ["1", "2"], "places": ["2", "inf"]}]}
    return parse_action_file(json.dumps(doc))


def test_infinite_counts():
    spec = _non_ergodic()
    assert fix_count(spec, (3, 0)) is INFINITE or fix_count(spec, (3, 0)).is_infinite
    assert fix_count(spec, (3, 1)) == 1


def test_fixcount_value_type():
    assert str(INFINITE) == "∞" and INFINITE.is_infinite
    assert FixCount(5) == 5 and int(FixCount(5)) == 5
    assert FixCount(5) < INFINITE and FixCount(3) < FixCount(4)
    with pytest.raises(InfiniteCount):
        int(INFINITE)


def test_x2x3_examples():
    assert fix_count(X2X3, (1, 1)) == 5
    assert fix_count(X2X3, (5, 5)) == 7775
    assert fix_count(X2X3, (-5, 5)) == 211
    assert fix_count(X2X3, (-3, 2)) == 1
    assert fix_count(X2X3, (-5, 0)) == 31


def test_zero_exponent():
    with pytest.raises(ZeroExponent):
        fix_count(X2X3, (0, 0))


def test_x2x3_fix_grid_golden():
    grid = fix_grid(X2X3, range(-5, 6), range(0, 6))
    assert grid_csv(grid) == (GOLDEN / "x2x3_fix_grid.csv").read_text(encoding="utf-8")


def test_axis_counts_golden():
    rows = (GOLDEN / "x2x3_axis_counts.csv").read_text().splitlines()[1:]
    for row in rows:
        axis, k, count = row.split(",")
        k = int(k)
        for sign in (1, -1):
            n = (sign * k, 0) if axis == "x" else (0, sign * k)
            assert fix_count(X2X3, n) == int(count)


@given(st.integers(-30, 30), st.integers(-30, 30))
def test_x2x3_against_s_free_part(a, b):
    expected = x2x3_count(a, b)
    if (a, b) == (0, 0):
        return
    c = fix_count(X2X3, (a, b))
    assert (c.is_infinite and expected is None) or c == expected


def test_integrality_on_grid():
    # fix_count asserts integrality internally; sweep the whole square
    for a in range(-30, 31):
        for b in range(-30, 31):
            if (a, b) != (0, 0):
                c = fix_count(X2X3, (a, b))
                assert c.is_infinite or c.value >= 1


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_symmetry(a, b):
    if (a, b) == (0, 0):
        return
    for spec in (X2X3, LED, Z5):
        assert fix_count(spec, (a, b)) == fix_count(spec, (-a, -b))


def test_ledrappier_powers_of_two():
    for k in range(1, 6):
        assert fix_count(LED, (2**k, 0)) == 1


def test_ledrappier_first_row():
    row = fix_grid(LED, range(1, 5), range(0, 1))[0]
    assert [int(c) for c in row] == [1, 1, 4, 1]
    assert [ledrappier_row_count(k) for k in range(1, 5)] == [1, 1, 4, 1]


@given(st.integers(-25, 25), st.integers(-25, 25))
def test_ledrappier_against_gf2_oracle(a, b):
    if (a, b) == (0, 0):
        return
    c = fix_count(LED, (a, b))
    expected = ledrappier_count(a, b)
    assert (c.is_infinite and expected is None) or c == expected


def test_ledrappier_expansive_identity():
    L = lyapunov_list(LED)
    pts = restrict_expansive(LED, lattice_ball(2, 12 * math.sqrt(2)))
    pts = [p for p in pts if max(map(abs, p)) <= 12]
    assert pts
    for p in pts:
        bits = round(directional_entropy(L, p) / LOG2)
        assert fix_count(LED, p) == 2**bits


def test_z5_examples():
    assert fix_count(Z5, (1, 1)) == 5
    assert fix_count(Z5, (1, 0)) == 1


@given(st.integers(-12, 12), st.integers(-12, 12))
def test_z5_against_trial_division(a, b):
    if (a, b) != (0, 0):
        assert fix_count(Z5, (a, b)) == z5_count(a, b)


def test_toral_examples():
    assert fix_count(TORAL, (1, 0, 0)) == 4
    assert fix_count(TORAL, (1, 1, 1)) == 16


def test_toral_cross_representation():
    for n in [(a, b, c) for a in range(-5, 6) for b in range(-5, 6) for c in range(-5, 6) if (a, b, c) != (0, 0, 0)][::7]:
        exact = fix_count(TORAL, n).value
        approx = toral_embedding_product(n)
        assert abs(exact - approx) / exact < 1e-6


def test_g_factor_examples():
    assert g_factor(X2X3, (1, 1)) == pytest.approx(5 / 6, rel=1e-14)
    assert g_factor(X2X3, (-3, 2)) == pytest.approx(1 / 9, rel=1e-14)
    with pytest.raises(InfiniteCount):
        g_factor(_non_ergodic(), (1, 0))


@pytest.mark.parametrize("spec", [X2X3, LED, Z5], ids=lambda s: s.name)
def test_g_bound_with_D(spec):
    L = lyapunov_list(spec)
    bound = 2**spec.D
    for n in lattice_ball(2, 15):
        if spec is LED and not restrict_expansive(L, [n]):
            continue
        if spec is Z5:
            continue
        g = g_factor(spec, n, L)
        assert 0 < g < bound
        assert math.exp(directional_entropy(L, n)) * g == pytest.approx(fix_count(spec, n).value, rel=1e-9)


def test_g_bound_toral_uses_archimedean_weight():
    L = lyapunov_list(TORAL)
    worst = 0.0
    for n in lattice_ball(3, 4):
        g = g_factor(TORAL, n, L)
        worst = max(worst, g)
        assert 0 < g < 2**TORAL.archimedean_weight
    # the archimedean weight is needed: some g exceed 2^D
    assert worst > 2**TORAL.D


# --- hulls -------------------------------------------------------------------


def test_hull_points_small():
    pts = set(hull_points(X2X3, math.log(6)))
    assert (1, 1) in pts
    for i, n2 in enumerate(range(5, -1, -1)):
        for j, n1 in enumerate(range(-5, 6)):
            c = fix_count(X2X3, (n1, n2)) if (n1, n2) != (0, 0) else INFINITE
            assert ((n1, n2) in pts) == (not c.is_infinite and c.value <= 6)


@pytest.mark.parametrize("logN", [10, 20, 40])
def test_inner_bracket(logN):
    assert inner_bracket_exceptions(X2X3, logN) == []


@pytest.mark.parametrize("logN", [1, 5, 10, 20])
def test_ledrappier_hull_is_infinite(logN):
    with pytest.raises(InfiniteHull):
        hull_points(LED, logN)


def test_z5_hull_is_infinite():
    with pytest.raises(InfiniteHull):
        hull_points(Z5, 5)


def test_restrict_expansive():
    L = lyapunov_list(LED)
    pts = [(1, 0), (0, 3), (2, -2), (1, 2), (-3, 1)]
    assert restrict_expansive(L, pts) == [(1, 2), (-3, 1)]
    pts = lattice_ball(2, 6)
    kept = set(restrict_expansive(X2X3, pts))
    assert kept == {p for p in pts if p[0] and p[1]}
    assert restrict_expansive(X2X3, []) == []


def test_count_threshold_guard():
    from rankone.actions import mp

    assert count_at_most(FixCount(6), math.log(6))
    assert not count_at_most(FixCount(7), math.log(6))
    assert not count_at_most(INFINITE, 100.0)
    # a float logN carries its own rounding error, so the guard widens to match
    assert count_at_most(FixCount(10**30), math.log(10**30))
    assert not count_at_most(FixCount(10**30 + 10**18), math.log(10**30))
    # high-precision input keeps the 1e-20 band
    exact = mp.log(10**30)
    assert count_at_most(FixCount(10**30), exact)
    assert not count_at_most(FixCount(10**30 + 10**11), exact)
    assert count_at_most(FixCount(10**30 + 10**9), exact)
    assert count_at_most(FixCount(6), "1.7917594692280550008124773583807022727")


def test_hull_experiment_x2x3():
    records = hull_experiment(X2X3, [10, 20, 40])
    vol_u = 3 / (math.log(2) * math.log(3))
    errs = [abs(r.ratio - vol_u) for r in records]
    assert errs[0] >= errs[1] >= errs[2]
    assert abs(records[-1].ratio - vol_u) / vol_u < 0.25
    for r in records:
        assert r.ratio > 0 and r.inner_exceptions == 0
        doc = json.loads(r.to_json())
        assert doc["schema"] == 1 and Fraction(doc["volume"]) == r.volume


def test_hull_vertices_are_qualifying_points():
    pts = hull_points(X2X3, 15.0)
    verts, _ = hull_volume(pts, 2)
    assert set(verts) <= set(pts)


def test_expansive_restricted_ledrappier():
    (rec,) = hull_experiment(LED, [20], expansive_only=True)
    assert abs(rec.ratio_over_unit_ball - 1) < 0.1


def test_toral_hull_runs():
    (rec,) = hull_experiment(TORAL, [8.0])
    assert rec.n_points > 0 and rec.volume > 0 and rec.inner_exceptions == 0


# --- exact hull primitives ----------------------------------------------------


@given(st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30)), min_size=3, max_size=60))
def test_hull2d_against_scipy(points):
    from scipy.spatial import ConvexHull, QhullError

    verts = convex_hull_2d(points)
    area = polygon_area(verts)
    try:
        ref = ConvexHull(points).volume
    except (QhullError, ValueError):
        assert area == 0
        return
    assert float(area) == pytest.approx(ref, rel=1e-9, abs=1e-9)


@given(st.lists(st.tuples(st.integers(-12, 12), st.integers(-12, 12), st.integers(-12, 12)), min_size=4, max_size=50))
def test_hull3d_against_scipy(points):
    from scipy.spatial import ConvexHull, QhullError

    verts, faces = convex_hull_3d(points)
    vol = polyhedron_volume(verts, faces)
    try:
        ref = ConvexHull(points).volume
    except (QhullError, ValueError):
        assert vol == 0
        return
    assert float(vol) == pytest.approx(ref, rel=1e-9, abs=1e-9)


def test_hull3d_cube():
    pts = [(x, y, z) for x in range(3) for y in range(3) for z in range(3)]
    verts, faces = convex_hull_3d(pts)
    assert polyhedron_volume(verts, faces) == 8
    assert extreme_vertices_3d(verts, faces) == sorted((x, y, z) for x in (0, 2) for y in (0, 2) for z in (0, 2))
    corners, vol = hull_volume(pts, 3)
    assert len(corners) == 8 and vol == 8


# --- growth rates --------------------------------------------------------------


def test_growth_window_x2x3():
    lo, hi = growth_rate_window(X2X3, 20, 40)
    assert lo > 0.05 and hi < 1.31


def test_growth_window_z5_reaches_zero():
    lo, _ = growth_rate_window(Z5, 20, 40)
    assert lo == 0.0


def test_growth_window_toral():
    from rankone.entropy_geometry import entropy_bounds

    c1, _ = entropy_bounds(TORAL)
    lo, hi = growth_rate_window(TORAL, 5, 10)
    assert lo > 0
    # n = (-5, 3, 0): (1+sqrt2)^5 and (2+sqrt5)^3 nearly agree, so the count is only 36
    assert fix_count(TORAL, (-5, 3, 0)) == 36
    assert lo == pytest.approx(math.log(36) / math.hypot(5, 3), rel=1e-12)
    assert hi <= entropy_bounds(TORAL)[1] + math.log(2**TORAL.archimedean_weight) / 5


def test_growth_window_needs_finite_counts():
    with pytest.raises(InfiniteCount):
        growth_rate_window(_non_ergodic(), 1, 3)
