"""Directional entropy and the geometry of its unit ball.

For a Lyapunov list L the directional entropy is

    h(t) = sum over l in L of max(l . t, 0),

a piecewise linear seminorm.  On each full-dimensional cell of the
hyperplane arrangement {l . t = 0} it is linear with gradient equal to the
sum of the vectors that are positive on the cell, so h is the maximum of
these finitely many linear forms and its unit ball U is the polytope cut out
by {c . t <= 1}.  Everything polyhedral here is restricted to d <= 3.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .actions import ActionSpec, LyapunovList, lyapunov_list, mp
from .errors import DimensionUnsupported, NotANorm

VERTEX_TOL = 1e-9
FACET_TOL = 1e-12
ZERO_TOL = 1e-12

ListLike = Union[ActionSpec, LyapunovList, Sequence[Sequence[float]], np.ndarray]


def as_lyapunov(L: ListLike) -> LyapunovList:
    if isinstance(L, LyapunovList):
        return L
    if isinstance(L, ActionSpec):
        return lyapunov_list(L)
    return LyapunovList.from_vectors(np.asarray(L, dtype=float).tolist())


def directional_entropy(L: ListLike, t: Sequence[float], precise: bool = False):
    """Sum of positive parts of ``l . t``; 128-bit mpf when ``precise``."""
    L = as_lyapunov(L)
    if precise:
        tt = [mp.mpf(x) if not isinstance(x, int) else mp.mpf(x) for x in t]
        total = mp.mpf(0)
        for v in L.hp_vectors:
            s = mp.fsum(a * b for a, b in zip(v, tt))
            if s > 0:
                total += s
        return total
    dots = L.array @ np.asarray(t, dtype=float)
    return float(np.sum(np.maximum(dots, 0.0)))


def directional_entropy_many(L: ListLike, T: np.ndarray) -> np.ndarray:
    """Vectorised ``h`` over the rows of ``T``."""
    L = as_lyapunov(L)
    return np.maximum(np.asarray(T, dtype=float) @ L.array.T, 0.0).sum(axis=1)


# ---------------------------------------------------------------------------
# Cone decomposition


@dataclass(frozen=True)
class Cone:
    """A full-dimensional cell of the arrangement.

    ``signs[i]`` is the sign of ``l_i . t`` inside the cell (0 for zero
    vectors); ``point`` is a unit vector in the interior.
    """

    signs: tuple[int, ...]
    gradient: tuple[float, ...]
    point: tuple[float, ...] = field(compare=False)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _distinct_normals(A: np.ndarray) -> list[np.ndarray]:
    """Unit normals of the distinct hyperplanes l^perp (up to sign)."""
    out: list[np.ndarray] = []
    for row in A:
        n = np.linalg.norm(row)
        if n < ZERO_TOL:
            continue
        u = row / n
        if not any(abs(abs(u @ w) - 1.0) < 1e-12 for w in out):
            out.append(u)
    return out


def _sector_midpoints(dirs: list[np.ndarray], basis: tuple[np.ndarray, np.ndarray]) -> list[np.ndarray]:
    """Directions bisecting consecutive members of ``dirs`` in the plane of ``basis``."""
    e1, e2 = basis
    if not dirs:
        return [e1]
    angles = sorted({round(math.atan2(d @ e2, d @ e1) % (2 * math.pi), 13) for d in dirs})
    mids = []
    for a, b in zip(angles, angles[1:] + [angles[0] + 2 * math.pi]):
        m = 0.5 * (a + b)
        mids.append(math.cos(m) * e1 + math.sin(m) * e2)
    return mids


def _sample_points(A: np.ndarray, d: int) -> list[np.ndarray]:
    """At least one interior point of every full-dimensional cell."""
    normals = _distinct_normals(A)
    if d == 1:
        return [np.array([1.0]), np.array([-1.0])]
    if d == 2:
        rays = []
        for n in normals:
            u = np.array([-n[1], n[0]])
            rays += [u, -u]
        return _sector_midpoints(rays, (np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    if d != 3:
        raise DimensionUnsupported(f"cone decomposition needs d <= 3, got {d}")
    if not normals:
        return [np.array([1.0, 0.0, 0.0])]
    if len(normals) == 1:
        return [normals[0], -normals[0]]
    eps = 1e-5
    points = []
    for r in _arrangement_vertices(normals):
        # Cells around the vertex r: split its tangent plane by the planes through r.
        e1 = _unit(np.cross(r, normals[0] if abs(r @ normals[0]) < 0.9 else normals[1]))
        e2 = np.cross(r, e1)
        through = [n for n in normals if abs(n @ r) < 1e-9]
        dirs = []
        for n in through:
            w = _unit(np.cross(r, n))
            dirs += [w, -w]
        for m in _sector_midpoints(dirs, (e1, e2)):
            points.append(_unit(r + eps * m))
    return points


def _arrangement_vertices(normals: list[np.ndarray]) -> list[np.ndarray]:
    verts: list[np.ndarray] = []
    for a, b in itertools.combinations(normals, 2):
        c = np.cross(a, b)
        if np.linalg.norm(c) < 1e-12:
            continue
        c = _unit(c)
        for r in (c, -c):
            if not any(np.allclose(r, v, atol=1e-12) for v in verts):
                verts.append(r)
    return verts


def cone_decomposition(L: ListLike) -> list[Cone]:
    """Every full-dimensional cell of {l . t = 0} once, with the gradient of h there."""
    L = as_lyapunov(L)
    if L.d > 3:
        raise DimensionUnsupported(f"cone decomposition needs d <= 3, got {L.d}")
    A = L.array
    seen: dict[tuple[int, ...], Cone] = {}
    for p in _sample_points(A, L.d):
        dots = A @ p
        signs = tuple(int(np.sign(x)) if abs(x) > 1e-14 else 0 for x in dots)
        if signs in seen:
            continue
        grad = A[np.array(signs) > 0].sum(axis=0) if any(s > 0 for s in signs) else np.zeros(L.d)
        seen[signs] = Cone(signs, tuple(float(x) for x in grad), tuple(float(x) for x in p))
    return list(seen.values())


class EntropyFunction:
    """``h`` together with its linear pieces."""

    def __init__(self, L: ListLike):
        self.L = as_lyapunov(L)

    @cached_property
    def cones(self) -> list[Cone]:
        return cone_decomposition(self.L)

    def __call__(self, t) -> float:
        return directional_entropy(self.L, t)

    def gradient_at(self, t) -> np.ndarray:
        """Gradient of the linear piece containing ``t`` (read off its sign pattern)."""
        dots = self.L.array @ np.asarray(t, dtype=float)
        return self.L.array[dots > 0].sum(axis=0) if np.any(dots > 0) else np.zeros(self.L.d)


# ---------------------------------------------------------------------------
# Polytopes


@dataclass(frozen=True, eq=False)
class Polytope:
    """Polytope ``{t : normals @ t <= 1}`` with its vertices and incidences."""

    normals: np.ndarray
    vertices: np.ndarray
    incidence: tuple[tuple[int, ...], ...]

    @property
    def d(self) -> int:
        return self.normals.shape[1]

    @property
    def n_facets(self) -> int:
        return len(self.normals)

    @classmethod
    def from_halfspaces(cls, normals: Sequence[Sequence[float]]) -> "Polytope":
        N = _dedupe_rows(np.asarray(normals, dtype=float), FACET_TOL)
        d = N.shape[1]
        if d > 3:
            raise DimensionUnsupported(f"polytopes are limited to d <= 3, got {d}")
        verts: list[np.ndarray] = []
        for idx in itertools.combinations(range(len(N)), d):
            sub = N[list(idx)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            v = np.linalg.solve(sub, np.ones(d))
            v[np.abs(v) < 1e-15] = 0.0
            if np.max(N @ v) <= 1 + VERTEX_TOL and not any(np.max(np.abs(v - w)) < VERTEX_TOL for w in verts):
                verts.append(v)
        if not verts:
            raise NotANorm("half-spaces do not bound a polytope")
        V = np.array(verts)
        inc = tuple(tuple(int(j) for j in np.nonzero(np.abs(V @ n - 1) < VERTEX_TOL)[0]) for n in N)
        return cls(N, V, inc)


def _dedupe_rows(A: np.ndarray, tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for row in A:
        scale = max(1.0, float(np.max(np.abs(row))))
        if not any(np.max(np.abs(row - r)) <= tol * scale for r in out):
            out.append(row)
    return np.array(out)


def unit_ball(L: ListLike) -> Polytope:
    """The polytope ``U = {t : h(t) <= 1}``."""
    L = as_lyapunov(L)
    if L.d > 3:
        raise DimensionUnsupported(f"unit ball needs d <= 3, got {L.d}")
    A = L.array
    if len(A) == 0 or np.linalg.matrix_rank(A, tol=1e-10) < L.d:
        raise NotANorm("Lyapunov vectors do not span R^d, so h vanishes on a subspace")
    cones = cone_decomposition(L)
    grads = np.array([c.gradient for c in cones])
    if np.any(np.linalg.norm(grads, axis=1) < ZERO_TOL):
        raise NotANorm("h vanishes on a full-dimensional cone")
    if L.d >= 2:
        normals = _distinct_normals(A)
        rays = []
        if L.d == 2:
            for n in normals:
                rays += [np.array([-n[1], n[0]]), np.array([n[1], -n[0]])]
        else:
            rays = _arrangement_vertices(normals)
        for r in rays:
            if directional_entropy(L, r) < ZERO_TOL:
                raise NotANorm(f"h vanishes in direction {tuple(np.round(r, 6))}")
    return Polytope.from_halfspaces(grads)


def _order_in_plane(points: np.ndarray, normal: np.ndarray) -> np.ndarray:
    c = points.mean(axis=0)
    e1 = _unit(points[0] - c) if np.linalg.norm(points[0] - c) > 0 else _unit(np.cross(normal, [1, 0, 0]))
    e2 = np.cross(_unit(normal), e1)
    ang = np.arctan2((points - c) @ e2, (points - c) @ e1)
    return points[np.argsort(ang)]


def polytope_volume(P: Polytope) -> float:
    """Shoelace in 2D, origin-fan of triangulated facets in 3D."""
    V = P.vertices
    if P.d == 1:
        return float(V.max() - V.min())
    if P.d == 2:
        ang = np.arctan2(V[:, 1], V[:, 0])
        W = V[np.argsort(ang)]
        x, y = W[:, 0], W[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    total = 0.0
    for n, idx in zip(P.normals, P.incidence):
        if len(idx) < 3:
            continue
        F = _order_in_plane(V[list(idx)], n)
        for i in range(1, len(F) - 1):
            total += abs(np.linalg.det(np.array([F[0], F[i], F[i + 1]]))) / 6.0
    return float(total)


def octahedron_volume(d: int) -> float:
    return 2.0**d / math.factorial(d)


def fried_average_entropy(spec: ListLike) -> float:
    """``2^d / (d! vol U)``."""
    P = unit_ball(spec)
    return octahedron_volume(P.d) / polytope_volume(P)


def entropy_bounds(L: ListLike) -> tuple[float, float]:
    """Exact ``(min, max)`` of h on the Euclidean unit sphere."""
    L = as_lyapunov(L)
    P = unit_ball(L)
    c1 = 1.0 / float(np.max(np.linalg.norm(P.vertices, axis=1)))
    c2 = float(np.max(np.linalg.norm(P.normals, axis=1)))
    return c1, c2


def nonexpansive_normals(L: ListLike) -> list[np.ndarray]:
    """Unit normals of the distinct hyperplanes ``l^perp``."""
    return _distinct_normals(as_lyapunov(L).array)


# ---------------------------------------------------------------------------
# Relational entropy


def relational_entropy(pairs: Sequence[tuple[float, float]]) -> float:
    """``max_E log(prod_E e^s + prod_E e^t)`` over subsets E of the pairs.

    The objective ``log(e^S + e^T)`` is convex and increasing in the subset
    sums (S, T), so the maximum sits at a vertex of the zonotope of subset
    sums exposed by a direction in the open positive quadrant.  Only the
    O(m) subsets cut out by such directions are evaluated.
    """
    V = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if len(V) == 0:
        return math.log(2.0)
    crit = {0.0, math.pi / 2}
    for s, t in V:
        if s == 0 and t == 0:
            continue
        a = math.atan2(-s, t) % math.pi  # w . (s, t) = 0
        if 0 < a < math.pi / 2:
            crit.add(a)
    crit_sorted = sorted(crit)
    best = -math.inf
    for a, b in zip(crit_sorted, crit_sorted[1:]):
        m = 0.5 * (a + b)
        w = np.array([math.cos(m), math.sin(m)])
        E = V[V @ w > 0]
        S, T = E.sum(axis=0) if len(E) else (0.0, 0.0)
        best = max(best, float(np.logaddexp(S, T)))
    return best


# ---------------------------------------------------------------------------
# Text output


def polytope_csv(P: Polytope, digits: int = 12) -> str:
    fmt = f"{{:.{digits}g}}"
    axes = "xyz"[: P.d]
    lines = ["kind,index," + ",".join(axes) + ",incident"]
    for i, v in enumerate(P.vertices):
        facets = [str(k) for k, idx in enumerate(P.incidence) if i in idx]
        lines.append(f"vertex,{i}," + ",".join(fmt.format(x + 0.0) for x in v) + "," + " ".join(facets))
    for k, (n, idx) in enumerate(zip(P.normals, P.incidence)):
        lines.append(f"facet,{k}," + ",".join(fmt.format(x + 0.0) for x in n) + "," + " ".join(map(str, idx)))
    return "\n".join(lines) + "\n"


def ball_svg(P: Polytope, size: int = 800) -> str:
    """A 2D unit ball drawn with axes and axis-intercept labels."""
    if P.d != 2:
        raise DimensionUnsupported("SVG output is only available for d = 2")
    V = P.vertices[np.argsort(np.arctan2(P.vertices[:, 1], P.vertices[:, 0]))]
    R = 1.25 * float(np.max(np.abs(V)))
    half = size / 2

    def sx(x: float) -> float:
        return half + x / R * (half - 20)

    def sy(y: float) -> float:
        return half - y / R * (half - 20)

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in V)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<line x1="10" y1="{half}" x2="{size - 10}" y2="{half}" stroke="black"/>',
        f'<line x1="{half}" y1="{size - 10}" x2="{half}" y2="10" stroke="black"/>',
        f'<text x="{size - 25}" y="{half - 8}" font-size="18">x</text>',
        f'<text x="{half + 8}" y="25" font-size="18">y</text>',
        f'<polygon points="{pts}" fill="black" fill-opacity="0.1" stroke="black" stroke-width="2"/>',
    ]
    for axis in (0, 1):
        for sign in (1, -1):
            # Intercept of the boundary with the axis: 1 / h(e).
            e = np.zeros(2)
            e[axis] = sign
            r = 1.0 / max(float(np.max(P.normals @ e)), 1e-300)
            x, y = (sign * r, 0.0) if axis == 0 else (0.0, sign * r)
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" fill="black"/>')
            out.append(f'<text x="{sx(x) + 6:.2f}" y="{sy(y) - 6:.2f}" font-size="14">{sign * r:.4f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
