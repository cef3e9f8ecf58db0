"""Exact periodic point counts and the convex hull growth experiment.

For n != 0 the number of points fixed by alpha^n is the product over
components p and unbounded places v of ``|u^n - 1|_v ** m(p)``.  Each factor
is the size of the kernel of multiplication by ``y = u^n - 1`` on the
component, which is what :func:`kernel_size` computes exactly:

* rational components: an integer assembled from ``|y|_inf`` and the p-adic
  absolute values (integrality is asserted, never rounded);
* F_2 components: ``2**e`` with ``e`` the sum of the place exponents;
* matrix components: ``|det(A - I)|``.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import algebra
from .actions import F2, MATRICES, RATIONAL, ActionSpec, LyapunovList, PrimeComponent, lyapunov_list, mp
from .algebra import F2Laurent, IntMatrix
from .entropy_geometry import directional_entropy, entropy_bounds, polytope_volume, unit_ball
from .errors import InfiniteCount, InfiniteHull, ZeroExponent

SCAN_MARGIN = 5.0  # nats beyond the outer bracket
PROBE_FACTOR = 4  # probe rational non-expansive lines out to this multiple of the scan radius
BOUNDARY_RTOL = 1e-20  # guard band for counts at the threshold


@dataclass(frozen=True, order=False)
class FixCount:
    """Number of fixed points; ``value is None`` encodes infinity."""

    value: int | None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "∞" if self.value is None else str(self.value)

    def __int__(self) -> int:
        if self.value is None:
            raise InfiniteCount("infinite fixed point count")
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, FixCount):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        if isinstance(other, float) and math.isinf(other):
            return self.value is None
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __lt__(self, other) -> bool:
        if self.value is None:
            return False
        o = other.value if isinstance(other, FixCount) else other
        return o is None or self.value < o

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __gt__(self, other) -> bool:
        return not self <= other

    def __ge__(self, other) -> bool:
        return not self < other


INFINITE = FixCount(None)


# ---------------------------------------------------------------------------
# Kernel sizes


@lru_cache(maxsize=65536)
def _ipow(base: int, k: int) -> int:
    return base**k


@lru_cache(maxsize=65536)
def _mpow(m: IntMatrix, k: int) -> IntMatrix:
    return algebra.int_matrix_pow(m, k)


def _rational_monomial(gens: Sequence[Fraction], n: Sequence[int]) -> tuple[int, int]:
    num, den = 1, 1
    for g, k in zip(gens, n):
        if k > 0:
            num *= _ipow(g.numerator, k)
            den *= _ipow(g.denominator, k)
        elif k < 0:
            num *= _ipow(g.denominator, -k)
            den *= _ipow(g.numerator, -k)
    if den < 0:
        num, den = -num, -den
    g = math.gcd(num, den)
    return num // g, den // g


def _rational_kernel(comp: PrimeComponent, top: int, bottom: int) -> int:
    """``prod_{v in S} |top/bottom|_v`` for nonzero ``top``, as an exact integer."""
    num, den = 1, 1
    for place in comp.places:
        if place.kind == "prime":
            p = place.prime
            e = algebra._int_valuation(bottom, p) - algebra._int_valuation(top, p)
            if e > 0:
                num *= p**e
            elif e < 0:
                den *= p ** (-e)
        else:
            num *= abs(top)
            den *= abs(bottom)
    if comp.cofinite:
        # Product over the complement of the listed places = inverse product (product formula).
        num, den = den, num
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"place product {Fraction(num, den)} is not an integer; check the place set")
    return q


def _f2_monomial(gens: Sequence[F2Laurent], n: Sequence[int]) -> tuple[F2Laurent, F2Laurent]:
    num, den = F2Laurent(1), F2Laurent(1)
    for g, k in zip(gens, n):
        if k > 0:
            num = num * g**k
        elif k < 0:
            den = den * g ** (-k)
    return num, den


def _f2_kernel(comp: PrimeComponent, top: F2Laurent, bottom: F2Laurent) -> int:
    e = 0
    for place in comp.places:
        e += algebra.f2_place_exponent(top, place.variant) - algebra.f2_place_exponent(bottom, place.variant)
    if e < 0:
        raise ArithmeticError(f"place product 2^{e} is not an integer; check the place set")
    return 1 << e


def _matrix_monomial(mats: Sequence[IntMatrix], n: Sequence[int]) -> IntMatrix:
    out = IntMatrix.identity(mats[0].dim)
    for m, k in zip(mats, n):
        if k:
            out = out @ _mpow(m, k)
    return out


def component_fix_count(comp: PrimeComponent, n: Sequence[int]) -> int | None:
    """``prod_v |u^n - 1|_v`` for one component (without multiplicity); None if u^n = 1."""
    if comp.kind == RATIONAL:
        num, den = _rational_monomial(comp.generators, n)
        if num == den:
            return None
        return _rational_kernel(comp, num - den, den)
    if comp.kind == F2:
        num, den = _f2_monomial(comp.generators, n)
        if num == den:
            return None
        return _f2_kernel(comp, num + den, den)
    A = _matrix_monomial(comp.generators, n)
    det = abs((A - IntMatrix.identity(A.dim)).det())
    return det if det else None


def fix_count(spec: ActionSpec, n: Sequence[int]) -> FixCount:
    n = tuple(int(x) for x in n)
    if len(n) != spec.d:
        raise ValueError(f"expected a vector of length {spec.d}")
    if not any(n):
        raise ZeroExponent("alpha^0 is the identity")
    total = 1
    for comp in spec.components:
        c = component_fix_count(comp, n)
        if c is None:
            return INFINITE
        total *= c**comp.multiplicity
    return FixCount(total)


def fix_grid(spec: ActionSpec, n1: Iterable[int], n2: Iterable[int]) -> list[list[FixCount]]:
    """Counts with rows ordered by decreasing ``n2`` and columns by increasing ``n1``.

    This is the layout of the usual printed array (the origin, where every
    point is fixed, shows as ∞).
    """
    if spec.d != 2:
        raise ValueError("fix_grid needs a Z^2-action")
    cols = sorted(n1)
    rows = sorted(n2, reverse=True)
    return [[INFINITE if (x, y) == (0, 0) else fix_count(spec, (x, y)) for x in cols] for y in rows]


def grid_csv(grid: list[list[FixCount]]) -> str:
    return "".join(",".join(str(c) for c in row) + "\n" for row in grid)


# ---------------------------------------------------------------------------
# Entropy split


def g_factor(spec: ActionSpec, n: Sequence[int], L: LyapunovList | None = None) -> float:
    """``|Fix(alpha^n)| * exp(-h(n))``, evaluated at 128-bit precision."""
    c = fix_count(spec, n)
    if c.is_infinite:
        raise InfiniteCount(f"alpha^{tuple(n)} has infinitely many fixed points")
    L = L or lyapunov_list(spec)
    h = directional_entropy(L, [int(x) for x in n], precise=True)
    return float(mp.mpf(c.value) * mp.exp(-h))


def _on_hyperplane(entry, n: Sequence[int]) -> bool:
    if entry.log_form is not None:
        coeff: dict[int, int] = {}
        for k, form in zip(n, entry.log_form):
            for p, c in form:
                coeff[p] = coeff.get(p, 0) + k * c
        return all(v == 0 for v in coeff.values())
    s = mp.fsum(a * k for a, k in zip(entry.hp, n))
    scale = mp.fsum(abs(a) for a in entry.hp) * max(1, max(abs(k) for k in n))
    return abs(s) <= mp.mpf(10) ** -25 * scale


def is_expansive(L: LyapunovList, n: Sequence[int]) -> bool:
    """False when n lies on some ``l^perp`` (exact for rational and F_2 data)."""
    return not any(any(e.vector) and _on_hyperplane(e, n) for e in L.entries)


def restrict_expansive(spec: ActionSpec | LyapunovList, points: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    L = spec if isinstance(spec, LyapunovList) else lyapunov_list(spec)
    distinct = []
    for e in L.entries:
        if any(e.vector) and not any(e.vector == f.vector for f in distinct):
            distinct.append(e)
    sub = LyapunovList(tuple(distinct), L.d)
    return [tuple(p) for p in points if is_expansive(sub, p)]


# ---------------------------------------------------------------------------
# Lattice scans


def lattice_ball(d: int, radius: float, inner: float = 0.0) -> list[tuple[int, ...]]:
    """Nonzero integer points with ``inner <= ||n|| <= radius``, lexicographic order."""
    R = int(math.floor(radius))
    r2, i2 = radius * radius, inner * inner
    out = []
    for n in itertools.product(range(-R, R + 1), repeat=d):
        s = sum(x * x for x in n)
        if 0 < s <= r2 and s >= i2:
            out.append(n)
    return out


def count_at_most(count: FixCount, logN) -> bool:
    """``count <= N`` for ``N = exp(logN)``.

    Clear cases are settled in double precision and the rest at 128 bits.
    Counts within a relative guard band of the threshold qualify: 1e-20 for
    high-precision input (mpf or decimal string), widened for a float
    ``logN`` to its own rounding error, so ``math.log(6)`` admits 6.
    """
    if count.is_infinite:
        return False
    if isinstance(logN, (str, type(mp.mpf(0)))):
        lg, band = mp.mpf(logN), mp.mpf(BOUNDARY_RTOL)
    else:
        lg = mp.mpf(float(logN))
        band = mp.mpf(max(BOUNDARY_RTOL, 4 * sys.float_info.epsilon * max(1.0, abs(float(logN)))))
    c = count.value
    f = float(lg)
    if c.bit_length() - 1 > f / algebra.LOG2 + 2:
        return False
    x = math.log(c)
    if x < f - 1e-9:
        return True
    if x > f + 1e-9:
        return False
    return mp.mpf(c) <= mp.exp(lg) * (1 + band)


def _count_chunk(args):
    spec, pts = args
    return [fix_count(spec, p) for p in pts]


def scan_counts(spec: ActionSpec, points: Sequence[tuple[int, ...]], workers: int = 1) -> list[FixCount]:
    """Fix counts for many points; block-parallel when ``workers > 1``."""
    if workers <= 1 or len(points) < 2000:
        return [fix_count(spec, p) for p in points]
    size = math.ceil(len(points) / workers)
    chunks = [(spec, points[i : i + size]) for i in range(0, len(points), size)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_count_chunk, chunks))
    return [c for part in parts for c in part]


def _rational_lines(L: LyapunovList) -> list[tuple[int, ...]]:
    """Primitive lattice vectors spanning the lattice lines inside some ``l^perp`` (d = 2)."""
    if L.d != 2:
        return [tuple(int(i == j) for j in range(L.d)) for i in range(L.d)]
    out = []
    for e in L.entries:
        a, b = e.vector
        if a == 0 and b == 0:
            continue
        v = (-b, a)
        if abs(v[0]) >= abs(v[1]):
            q = Fraction(v[1] / v[0]).limit_denominator(1000)
            cand = (q.denominator, q.numerator)
        else:
            q = Fraction(v[0] / v[1]).limit_denominator(1000)
            cand = (q.numerator, q.denominator)
        if _on_hyperplane(e, cand) and cand not in out and (-cand[0], -cand[1]) not in out:
            out.append(cand)
    return out


def hull_points(
    spec: ActionSpec,
    logN: float,
    delta: float = 0.9,
    expansive_only: bool = False,
    workers: int = 1,
    _cache: dict | None = None,
) -> list[tuple[int, ...]]:
    """All n with ``|Fix(alpha^n)| <= N``.

    The scan covers the Euclidean ball of radius ``(logN + logN**delta + 5)/C1``,
    which contains the entropy ball ``B(logN + logN**delta + 5)``.  A qualifying
    point in the boundary shell, the outer half of that margin
    (``h(n) > logN + logN**delta + 2.5``), raises :class:`InfiniteHull`;
    lattice lines inside non-expansive hyperplanes are additionally probed
    out to four times the scan radius.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if logN <= 0:
        raise ValueError("logN must be positive")
    L = lyapunov_list(spec)
    c1, _ = entropy_bounds(L)
    outer = logN + logN**delta
    radius = (outer + SCAN_MARGIN) / c1
    cache = _cache if _cache is not None else {}
    pts = lattice_ball(spec.d, radius)
    if expansive_only:
        pts = restrict_expansive(L, pts)
    todo = [p for p in pts if p not in cache]
    for p, c in zip(todo, scan_counts(spec, todo, workers)):
        cache[p] = c
    good = [p for p in pts if count_at_most(cache[p], logN)]
    shell = outer + SCAN_MARGIN / 2
    escaped = [p for p in good if directional_entropy(L, p) > shell]
    if not expansive_only:
        for v in _rational_lines(L):
            norm = math.sqrt(sum(x * x for x in v))
            for k in range(int(radius / norm) + 1, int(PROBE_FACTOR * radius / norm) + 1):
                p = tuple(k * x for x in v)
                if count_at_most(fix_count(spec, p), logN):
                    escaped.append(p)
                    break
    if escaped:
        raise InfiniteHull(
            f"{len(escaped)} point(s) with |Fix| <= e^{logN:g} lie in the boundary shell or beyond, e.g. {escaped[0]}"
        )
    return good


# ---------------------------------------------------------------------------
# Exact convex hulls


def _cross2(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Iterable[Sequence[int]]) -> list[tuple[int, int]]:
    """Monotone chain; counter-clockwise vertices without collinear points."""
    pts = sorted({(int(p[0]), int(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def polygon_area(vertices: Sequence[tuple[int, int]]) -> Fraction:
    if len(vertices) < 3:
        return Fraction(0)
    s = 0
    for (x0, y0), (x1, y1) in zip(vertices, list(vertices[1:]) + [vertices[0]]):
        s += x0 * y1 - x1 * y0
    return Fraction(abs(s), 2)


def _orient3(a, b, c, p) -> int:
    u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    v = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
    w = (p[0] - a[0], p[1] - a[1], p[2] - a[2])
    return (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )


def _column_extremes(pts: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    # A hull vertex is extreme in its vertical column.
    lo: dict[tuple[int, int], int] = {}
    hi: dict[tuple[int, int], int] = {}
    for x, y, z in pts:
        k = (x, y)
        if k not in lo or z < lo[k]:
            lo[k] = z
        if k not in hi or z > hi[k]:
            hi[k] = z
    return sorted({(x, y, lo[(x, y)]) for x, y in lo} | {(x, y, hi[(x, y)]) for x, y in hi})


def convex_hull_3d(points: Iterable[Sequence[int]], seed: int = 0):
    """Incremental hull with exact integer orientation tests.

    Returns ``(vertices, faces)`` where faces are outward-oriented index
    triples into ``vertices``; a coplanar input gives ``([], [])``.
    """
    pts = _column_extremes(sorted({(int(p[0]), int(p[1]), int(p[2])) for p in points}))
    if len(pts) < 4:
        return [], []
    p0 = pts[0]
    i1 = next((i for i, p in enumerate(pts) if p != p0), None)
    if i1 is None:
        return [], []
    p1 = pts[i1]

    def collinear(p):
        u = tuple(a - b for a, b in zip(p1, p0))
        w = tuple(a - b for a, b in zip(p, p0))
        return u[1] * w[2] - u[2] * w[1] == 0 and u[2] * w[0] - u[0] * w[2] == 0 and u[0] * w[1] - u[1] * w[0] == 0

    i2 = next((i for i, p in enumerate(pts) if not collinear(p)), None)
    if i2 is None:
        return [], []
    p2 = pts[i2]
    i3 = next((i for i, p in enumerate(pts) if _orient3(p0, p1, p2, p) != 0), None)
    if i3 is None:
        return [], []
    p3 = pts[i3]
    base = [0, i1, i2, i3]
    inside4 = tuple(sum(c) for c in zip(p0, p1, p2, p3))  # 4 * interior point

    def outward(f):
        a, b, c = (pts[i] for i in f)
        # orient against the interior point, scaled by 4 to stay integral
        s = _orient3(tuple(4 * x for x in a), tuple(4 * x for x in b), tuple(4 * x for x in c), inside4)
        return f if s < 0 else (f[0], f[2], f[1])

    faces = {outward(f) for f in itertools.combinations(base, 3)}
    order = [i for i in range(len(pts)) if i not in base]
    random.Random(seed).shuffle(order)
    for i in order:
        p = pts[i]
        visible = [f for f in faces if _orient3(pts[f[0]], pts[f[1]], pts[f[2]], p) > 0]
        if not visible:
            continue
        edges = set()
        for a, b, c in visible:
            edges.update(((a, b), (b, c), (c, a)))
        for f in visible:
            faces.discard(f)
        for a, b in edges:
            if (b, a) not in edges:
                faces.add((a, b, i))
    used = sorted({i for f in faces for i in f})
    remap = {old: new for new, old in enumerate(used)}
    verts = [pts[i] for i in used]
    return verts, sorted(tuple(remap[i] for i in f) for f in faces)


def _face_normal(a, b, c) -> tuple[int, int, int]:
    u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    v = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
    n = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
    g = math.gcd(*n)
    return tuple(x // g for x in n)


def extreme_vertices_3d(vertices, faces) -> list[tuple[int, int, int]]:
    """Hull vertices that are corners, not interior to an edge or facet.

    A corner lies on at least three facet planes with independent normals.
    """
    planes: dict[int, set] = {}
    for f in faces:
        n = _face_normal(*(vertices[i] for i in f))
        for i in f:
            planes.setdefault(i, set()).add(n)
    out = []
    for i, normals in planes.items():
        ns = list(normals)
        if any(
            _orient3((0, 0, 0), a, b, c) != 0 for a, b, c in itertools.combinations(ns, 3)
        ):
            out.append(vertices[i])
    return sorted(out)


def polyhedron_volume(vertices, faces) -> Fraction:
    if not faces:
        return Fraction(0)
    ref = vertices[0]
    s = 0
    for a, b, c in faces:
        s -= _orient3(vertices[a], vertices[b], vertices[c], ref)
    return Fraction(s, 6)


def hull_volume(points: Sequence[Sequence[int]], d: int) -> tuple[list, Fraction]:
    """Exact hull vertices and volume for d in {1, 2, 3}."""
    if not points:
        return [], Fraction(0)
    if d == 1:
        xs = [p[0] for p in points]
        return [(min(xs),), (max(xs),)], Fraction(max(xs) - min(xs))
    if d == 2:
        v = convex_hull_2d(points)
        return v, polygon_area(v)
    if d == 3:
        v, f = convex_hull_3d(points)
        return extreme_vertices_3d(v, f), polyhedron_volume(v, f)
    raise ValueError("hulls are implemented for d <= 3")


@dataclass
class HullRecord:
    logN: float
    delta: float
    n_points: int
    vertices: list = field(repr=False)
    volume: Fraction
    ratio: float
    unit_ball_volume: float
    inner_exceptions: int = 0

    @property
    def ratio_over_unit_ball(self) -> float:
        return self.ratio / self.unit_ball_volume

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": 1,
                "logN": self.logN,
                "delta": self.delta,
                "points": self.n_points,
                "hull_vertices": [list(v) for v in self.vertices],
                "volume": str(self.volume),
                "ratio": self.ratio,
                "unit_ball_volume": self.unit_ball_volume,
                "ratio_over_unit_ball": self.ratio_over_unit_ball,
                "inner_exceptions": self.inner_exceptions,
            }
        )


def inner_bracket_exceptions(spec: ActionSpec, logN: float, L: LyapunovList | None = None, cache=None) -> list:
    """Lattice n with ``h(n) <= logN - W log 2`` but ``|Fix| > N``.

    ``W`` is :attr:`ActionSpec.archimedean_weight`, the exponent in the bound
    ``g(n) < 2**W``; the list is empty whenever the bound holds.
    """
    L = L or lyapunov_list(spec)
    c1, _ = entropy_bounds(L)
    r = logN - spec.archimedean_weight * algebra.LOG2
    if r <= 0:
        return []
    bad = []
    for p in lattice_ball(spec.d, r / c1):
        if directional_entropy(L, p) <= r:
            c = cache[p] if cache is not None and p in cache else fix_count(spec, p)
            if not count_at_most(c, logN):
                bad.append(p)
    return bad


def hull_experiment(
    spec: ActionSpec,
    logNs: Sequence[float],
    delta: float = 0.9,
    expansive_only: bool = False,
    workers: int = 1,
) -> list[HullRecord]:
    """``vol(H(N)) / (log N)^d`` for each threshold; counts are shared across thresholds."""
    L = lyapunov_list(spec)
    vol_u = polytope_volume(unit_ball(L))
    cache: dict = {}
    out = []
    for logN in sorted(logNs, reverse=True):
        pts = hull_points(spec, logN, delta, expansive_only, workers, _cache=cache)
        verts, vol = hull_volume(pts, spec.d)
        exc = 0 if expansive_only else len(inner_bracket_exceptions(spec, logN, L, cache))
        out.append(HullRecord(logN, delta, len(pts), verts, vol, float(vol) / logN**spec.d, vol_u, exc))
    order = {v: i for i, v in enumerate(logNs)}
    return sorted(out, key=lambda r: order[r.logN])


def growth_rate_window(spec: ActionSpec, rmin: float, rmax: float) -> tuple[float, float]:
    """Extremes of ``log|Fix(alpha^n)| / ||n||`` over the lattice annulus ``rmin <= ||n|| <= rmax``."""
    lo, hi = math.inf, -math.inf
    for p in lattice_ball(spec.d, rmax, rmin):
        c = fix_count(spec, p)
        if c.is_infinite:
            raise InfiniteCount(f"alpha^{p} has infinitely many fixed points")
        rate = math.log(c.value) / math.sqrt(sum(x * x for x in p))
        lo, hi = min(lo, rate), max(hi, rate)
    return lo, hi
