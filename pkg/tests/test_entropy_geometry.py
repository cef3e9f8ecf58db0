import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankone.actions import catalog, lyapunov_list
from rankone.entropy_geometry import (
    Polytope,
    ball_svg,
    cone_decomposition,
    directional_entropy,
    directional_entropy_many,
    entropy_bounds,
    fried_average_entropy,
    polytope_csv,
    polytope_volume,
    relational_entropy,
    unit_ball,
)
from rankone.errors import DimensionUnsupported, NotANorm

from oracles import LOG2, LOG3, h_numpy, monte_carlo_volume, relational_brute, sphere_sample, x2x3_entropy

MIXING = ("times2_times3", "ledrappier", "toral_sqrt2_sqrt5")
X2X3_VOL = 3 / (LOG2 * LOG3)
LED_VOL = 3 / LOG2**2


@pytest.fixture(scope="module", params=MIXING)
def L(request):
    return lyapunov_list(catalog(request.param))


def test_entropy_examples():
    L = lyapunov_list(catalog("times2_times3"))
    assert directional_entropy(L, (1, 1)) == pytest.approx(math.log(6), rel=1e-14)
    assert directional_entropy(L, (-3, 2)) == pytest.approx(2 * LOG3, rel=1e-14)
    assert directional_entropy(L, (-1, 0)) == pytest.approx(LOG2, rel=1e-14)
    led = lyapunov_list(catalog("ledrappier"))
    assert directional_entropy(led, (1, -1)) == pytest.approx(LOG2, rel=1e-14)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_x2x3_matches_closed_form(a, b):
    L = lyapunov_list(catalog("times2_times3"))
    assert directional_entropy(L, (a, b)) == pytest.approx(x2x3_entropy(a, b), rel=1e-12, abs=1e-12)


def test_precise_mode_agrees():
    L = lyapunov_list(catalog("toral_sqrt2_sqrt5"))
    for t in [(1, 2, 3), (-4, 1, 0), (7, -7, 2)]:
        assert float(directional_entropy(L, t, precise=True)) == pytest.approx(directional_entropy(L, t), rel=1e-13)


# --- norm axioms -------------------------------------------------------------


def test_symmetry(L):
    T = np.random.default_rng(1).normal(size=(10**4, L.d))
    assert np.allclose(directional_entropy_many(L, T), directional_entropy_many(L, -T), rtol=1e-12, atol=1e-12)


def test_homogeneity(L):
    rng = np.random.default_rng(2)
    T = rng.normal(size=(10**4, L.d))
    lam = rng.uniform(-20, 20, size=10**4)
    lhs = directional_entropy_many(L, lam[:, None] * T)
    rhs = np.abs(lam) * directional_entropy_many(L, T)
    assert np.allclose(lhs, rhs, rtol=1e-11, atol=1e-11)


def test_triangle_inequality(L):
    rng = np.random.default_rng(3)
    S, T = rng.normal(size=(2, 10**4, L.d))
    hs, ht, hst = (directional_entropy_many(L, X) for X in (S, T, S + T))
    assert np.all(hst <= hs + ht + 1e-12)


def test_lipschitz(L):
    rng = np.random.default_rng(4)
    S, T = rng.normal(size=(2, 10**4, L.d))
    K = np.linalg.norm(L.array, axis=1).sum()
    diff = np.abs(directional_entropy_many(L, S) - directional_entropy_many(L, T))
    assert np.all(diff <= K * np.linalg.norm(S - T, axis=1) + 1e-12)


def test_cone_agreement(L):
    cones = cone_decomposition(L)
    T = np.random.default_rng(5).normal(size=(2000, L.d))
    A = L.array
    for t in T:
        signs = tuple(int(np.sign(x)) for x in A @ t)
        matches = [c for c in cones if all(s == 0 or s == cs for s, cs in zip(signs, c.signs))]
        assert matches
        assert abs(matches[0].gradient @ t - directional_entropy(L, t)) < 1e-12


def test_cone_counts():
    assert len(cone_decomposition(lyapunov_list(catalog("times2_times3")))) == 6
    assert len(cone_decomposition(lyapunov_list(catalog("ledrappier")))) == 6
    assert len(cone_decomposition(lyapunov_list(catalog("toral_sqrt2_sqrt5")))) == 14


def test_single_vector_is_only_a_seminorm():
    assert len(cone_decomposition([[1.0, 0.0]])) == 2
    with pytest.raises(NotANorm):
        unit_ball([[1.0, 0.0]])


def test_non_mixing_list_rejected():
    # an action with a zero-entropy direction
    with pytest.raises(NotANorm):
        unit_ball([[1.0, 1.0], [-1.0, -1.0]])


def test_high_dimension_limits():
    L4 = np.vstack([np.eye(4), -np.ones((1, 4))])
    assert directional_entropy(L4, (1, 1, 1, 1)) == pytest.approx(4.0)
    with pytest.raises(DimensionUnsupported):
        unit_ball(L4)


# --- unit balls --------------------------------------------------------------


def test_vertices_lie_on_sphere(L):
    P = unit_ball(L)
    for v in P.vertices:
        assert abs(directional_entropy(L, v) - 1) < 1e-9


def test_x2x3_ball():
    P = unit_ball(catalog("times2_times3"))
    assert P.n_facets == 6 and len(P.vertices) == 6
    assert polytope_volume(P) == pytest.approx(X2X3_VOL, rel=1e-12)
    expected = {(1 / LOG2, 0), (-1 / LOG2, 0), (0, 1 / LOG3), (0, -1 / LOG3), (1 / LOG2, -1 / LOG3), (-1 / LOG2, 1 / LOG3)}
    got = {tuple(v) for v in P.vertices}
    for e in expected:
        assert min(max(abs(a - b) for a, b in zip(e, g)) for g in got) < 1e-12


def test_ledrappier_ball():
    P = unit_ball(catalog("ledrappier"))
    assert polytope_volume(P) == pytest.approx(LED_VOL, rel=1e-12)
    bits = sorted(tuple(int(round(x * LOG2)) for x in v) for v in P.vertices)
    assert bits == sorted([(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)])


def test_toral_ball_and_printed_value():
    P = unit_ball(catalog("toral_sqrt2_sqrt5"))
    assert P.n_facets == 14
    logs = [math.log(x) for x in (1 + math.sqrt(2), 2 + math.sqrt(5), 3 + math.sqrt(10))]
    vol = polytope_volume(P)
    assert vol == pytest.approx(5 / (6 * logs[0] * logs[1] * logs[2]), rel=1e-10)
    # the printed variant repeats the third unit and does not match
    assert abs(vol - 5 / (6 * logs[0] * logs[2] * logs[2])) / vol > 0.2


def test_cube():
    P = Polytope.from_halfspaces([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]])
    assert len(P.vertices) == 8
    assert polytope_volume(P) == pytest.approx(8.0, rel=1e-14)


@pytest.mark.slow
def test_volume_against_monte_carlo():
    L = lyapunov_list(catalog("times2_times3"))
    mc = monte_carlo_volume(L.array, box=1.6)
    assert abs(polytope_volume(unit_ball(L)) - mc) / mc < 0.005


def test_volume_against_scipy_hull(L):
    from scipy.spatial import ConvexHull

    P = unit_ball(L)
    assert polytope_volume(P) == pytest.approx(ConvexHull(P.vertices).volume, rel=1e-10)


def test_fried_average_entropy_definition():
    for name, vol in (("times2_times3", X2X3_VOL), ("ledrappier", LED_VOL)):
        assert fried_average_entropy(catalog(name)) == pytest.approx(4 / (2 * vol), rel=1e-12)


def test_fried_entropy_of_rank_one_action_is_entropy():
    # d = 1: h* is the entropy of the generator, log 2 for x2 on the 2-adic solenoid
    assert fried_average_entropy([[math.log(2)], [-math.log(2)]]) == pytest.approx(math.log(2))


# --- bounds ------------------------------------------------------------------


def test_bounds_bracket_sphere(L):
    c1, c2 = entropy_bounds(L)
    T = sphere_sample(L.d, 10**5)
    h = h_numpy(L.array, T)
    assert c1 - 1e-9 <= h.min() and h.max() <= c2 + 1e-9
    # and the sampled extremes come close to the bounds
    assert h.min() - c1 < 1e-2 and c2 - h.max() < 1e-2


def test_bounds_examples():
    c1, c2 = entropy_bounds(catalog("times2_times3"))
    assert c1 == pytest.approx(1 / math.hypot(1 / LOG2, 1 / LOG3), rel=1e-12)
    assert c2 == pytest.approx(math.hypot(LOG2, LOG3), rel=1e-12)
    assert entropy_bounds(catalog("ledrappier"))[1] == pytest.approx(math.sqrt(2) * LOG2, rel=1e-12)


def test_bounds_scale(L):
    c1, c2 = entropy_bounds(L)
    d1, d2 = entropy_bounds(L.scaled(2.0))
    assert d1 == pytest.approx(2 * c1) and d2 == pytest.approx(2 * c2)


# --- relational entropy ------------------------------------------------------


def test_relational_examples():
    assert relational_entropy([(LOG2, LOG3)]) == pytest.approx(math.log(5), rel=1e-14)
    assert relational_entropy([]) == pytest.approx(LOG2)
    assert relational_entropy([(0, 0), (0, 0)]) == pytest.approx(LOG2)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), max_size=10))
def test_relational_matches_exhaustive(pairs):
    assert relational_entropy(pairs) == pytest.approx(relational_brute(pairs), rel=1e-12, abs=1e-12)


# --- outputs -----------------------------------------------------------------


def test_csv_and_svg():
    P = unit_ball(catalog("ledrappier"))
    csv = polytope_csv(P)
    assert csv.splitlines()[0] == "kind,index,x,y,incident"
    assert sum(line.startswith("vertex") for line in csv.splitlines()) == 6
    svg = ball_svg(P)
    assert svg.startswith("<svg") and 'width="800"' in svg and "1.4427" in svg
    with pytest.raises(DimensionUnsupported):
        ball_svg(unit_ball(catalog("toral_sqrt2_sqrt5")))
