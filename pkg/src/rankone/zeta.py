"""Directional zeta functions of the x2, x3 action and the Omega scatter.

For an expansive n the closed form depends on which of the six open cones
cut out by the axes and the line ``x log 2 + y log 3 = 0`` contains n.  The
sign of ``n1 log 2 + n2 log 3`` is decided exactly by comparing ``2**a`` with
``3**b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .actions import LyapunovList, ActionSpec, catalog, lyapunov_list
from .entropy_geometry import as_lyapunov, directional_entropy, nonexpansive_normals
from .errors import NotExpansive
from .periodic import fix_count


@dataclass(frozen=True)
class RationalZeta:
    """``prod (1 - a z) / prod (1 - b z)`` with integer coefficients a, b >= 1."""

    numerator: tuple[int, ...]
    denominator: tuple[int, ...]

    def __post_init__(self):
        if not self.numerator or not self.denominator:
            raise ValueError("factor lists must be nonempty")
        if any(c < 1 for c in self.numerator + self.denominator):
            raise ValueError("coefficients must be positive integers")

    def __str__(self) -> str:
        def side(cs):
            return "".join(f"(1-{c}z)" if c != 1 else "(1-z)" for c in cs)

        return f"{side(self.numerator)}/{side(self.denominator)}"

    def __call__(self, z: complex) -> complex:
        top = math.prod(1 - c * z for c in self.numerator)
        return top / math.prod(1 - c * z for c in self.denominator)

    def log_coefficient(self, k: int) -> int:
        """k times the coefficient of z^k in log zeta."""
        return sum(c**k for c in self.denominator) - sum(c**k for c in self.numerator)

    def zeros(self) -> list[Fraction]:
        return [Fraction(1, c) for c in self.numerator]

    def poles(self) -> list[Fraction]:
        return [Fraction(1, c) for c in self.denominator]


def sign_log23(n1: int, n2: int) -> int:
    """Exact sign of ``n1 log 2 + n2 log 3``."""
    pos = 2 ** max(n1, 0) * 3 ** max(n2, 0)
    neg = 2 ** max(-n1, 0) * 3 ** max(-n2, 0)
    return (pos > neg) - (pos < neg)


def x2x3_cone(n: Sequence[int]) -> int:
    """Index 1..6 of the open cone containing n, counter-clockwise from the first quadrant."""
    n1, n2 = int(n[0]), int(n[1])
    s = sign_log23(n1, n2)
    if n1 == 0 or n2 == 0 or s == 0:
        raise NotExpansive(f"{(n1, n2)} lies on a non-expansive line")
    if n1 > 0 and n2 > 0:
        return 1
    if n1 < 0 and n2 > 0:
        return 2 if s > 0 else 3
    if n1 < 0 and n2 < 0:
        return 4
    return 5 if s < 0 else 6


def directional_zeta_x2x3(n: Sequence[int]) -> RationalZeta:
    a, b = 2 ** abs(int(n[0])), 3 ** abs(int(n[1]))
    cone = x2x3_cone(n)
    if cone in (1, 4):
        return RationalZeta((1,), (a * b,))
    if cone in (2, 5):
        return RationalZeta((a,), (b,))
    return RationalZeta((b,), (a,))


def zeta_series_check(spec: ActionSpec, n: Sequence[int], zeta: RationalZeta, K: int) -> bool:
    """Compare the first K coefficients of log zeta with ``|Fix(alpha^{kn})|``."""
    for k in range(1, K + 1):
        c = fix_count(spec, tuple(k * x for x in n))
        if zeta.log_coefficient(k) != int(c):
            return False
    return True


def zeta_series(spec: ActionSpec, n: Sequence[int], K: int) -> list[Fraction]:
    """Taylor coefficients ``a_0..a_K`` of ``exp(sum |Fix(alpha^{kn})| z^k / k)``.

    Available for any action; this is the numeric report used where no
    closed form is known.
    """
    counts = [int(fix_count(spec, tuple(k * x for x in n))) for k in range(1, K + 1)]
    a = [Fraction(1)]
    for m in range(1, K + 1):
        a.append(sum(counts[k - 1] * a[m - k] for k in range(1, m + 1)) / m)
    return a


# ---------------------------------------------------------------------------
# Omega


@dataclass(frozen=True)
class OmegaPoint:
    theta: float
    y: float
    n: tuple[int, int]
    kind: str  # "zero" or "pole"


def direction_angle(n: Sequence[float]) -> float:
    """theta in [0, 2pi) with ``n / |n| = (sin theta, cos theta)``."""
    return math.atan2(n[0], n[1]) % (2 * math.pi)


def omega_set(radius: float, per_cone: int | None = None) -> list[OmegaPoint]:
    """Pole and zero data ``(theta, |z|^{1/|n|})`` for expansive n with ``|n| <= radius``.

    ``per_cone`` caps the number of lattice points taken from each cone (in
    order of increasing norm, ties broken lexicographically); 0 gives an
    empty set.
    """
    R = int(math.floor(radius))
    by_cone: dict[int, list[tuple[int, int]]] = {i: [] for i in range(1, 7)}
    for n1 in range(-R, R + 1):
        for n2 in range(-R, R + 1):
            if n1 * n2 == 0 or n1 * n1 + n2 * n2 > radius * radius:
                continue
            by_cone[x2x3_cone((n1, n2))].append((n1, n2))
    out = []
    for cone in range(1, 7):
        pts = sorted(by_cone[cone], key=lambda p: (p[0] ** 2 + p[1] ** 2, p))
        if per_cone is not None:
            pts = pts[:per_cone]
        for n in pts:
            zeta = directional_zeta_x2x3(n)
            norm = math.hypot(*n)
            th = direction_angle(n)
            for kind, cs in (("zero", zeta.numerator), ("pole", zeta.denominator)):
                for c in cs:
                    # |1/c|^{1/|n|} computed in logs to survive huge c
                    out.append(OmegaPoint(th, math.exp(-math.log(c) / norm), n, kind))
    return out


def omega_envelope(points: Sequence[OmegaPoint], bins: int = 360) -> list[tuple[float, float]]:
    """Lowest y per theta bin, as (bin centre, y)."""
    best: dict[int, float] = {}
    width = 2 * math.pi / bins
    for p in points:
        b = min(int(p.theta / width), bins - 1)
        best[b] = min(best.get(b, 1.0), p.y)
    return [((b + 0.5) * width, y) for b, y in sorted(best.items())]


def omega_csv(points: Sequence[OmegaPoint], digits: int = 10) -> str:
    return "".join(f"{p.theta:.{digits}f},{p.y:.{digits}f}\n" for p in points)


def omega_svg(points: Sequence[OmegaPoint], size: int = 800) -> str:
    """Scatter on axes ``[0, 2pi] x [0, 1]`` with the envelope ``exp(-h)`` drawn in."""
    pad = 50
    span = size - 2 * pad

    def sx(t: float) -> float:
        return pad + t / (2 * math.pi) * span

    def sy(y: float) -> float:
        return size - pad - y * span

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{size - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{pad}" y2="{pad}" stroke="black"/>',
        f'<text x="{size - pad}" y="{size - pad + 30}" font-size="16">2π</text>',
        f'<text x="{pad - 5}" y="{size - pad + 30}" font-size="16">0</text>',
        f'<text x="{pad - 30}" y="{pad + 5}" font-size="16">1</text>',
        f'<text x="{size / 2}" y="{size - 10}" font-size="16">θ</text>',
    ]
    for p in points:
        out.append(f'<circle cx="{sx(p.theta):.2f}" cy="{sy(p.y):.2f}" r="1.5" fill="black"/>')
    L = lyapunov_list(catalog("times2_times3"))
    curve = []
    for i in range(721):
        t = 2 * math.pi * i / 720
        curve.append(f"{sx(t):.2f},{sy(math.exp(-directional_entropy(L, (math.sin(t), math.cos(t))))):.2f}")
    out.append(f'<polyline points="{" ".join(curve)}" fill="none" stroke="gray"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Non-expansive directions


@dataclass(frozen=True)
class Hyperplane:
    """``{t : normal . t = 0}`` with a unit normal."""

    normal: tuple[float, ...]

    def describe(self, digits: int = 6) -> str:
        terms = []
        for i, c in enumerate(self.normal):
            if abs(c) > 1e-12:
                terms.append(f"{c:+.{digits}f}*t{i + 1}")
        return " ".join(terms) + " = 0"


def nonexpansive_directions(L: ActionSpec | LyapunovList | np.ndarray) -> list[Hyperplane]:
    """The distinct hyperplanes ``l^perp`` for nonzero l in the Lyapunov list."""
    L = as_lyapunov(L)
    out = []
    for v in nonexpansive_normals(L):
        # canonical orientation: first nonzero coordinate positive
        k = next(i for i, x in enumerate(v) if abs(x) > 1e-12)
        if v[k] < 0:
            v = -v
        out.append(Hyperplane(tuple(float(x) + 0.0 for x in v)))
    return sorted(out, key=lambda h: h.normal)
