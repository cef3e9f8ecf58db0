"""Synchronization points of commuting endomorphisms of a solenoid.

A weak synchronization point of times n for maps alpha, beta satisfies
``alpha^n x = beta^n x``.  On the solenoid dual to ``Z[1/S]`` their number is
the kernel size of multiplication by ``lambda_a^n - lambda_b^n``, i.e. the
same place product that counts fixed points (beta = identity recovers
``|Fix(alpha^n)|``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import algebra
from .actions import RATIONAL, ActionSpec, catalog
from .errors import DegenerateSync, UnsupportedFamily, ValidationError
from .periodic import _rational_kernel


@dataclass(frozen=True)
class SyncFamily:
    """Maps acting by multiplication on each rational component of ``spec``.

    ``maps[label]`` holds one nonzero rational per component.
    """

    spec: ActionSpec
    maps: tuple[tuple[str, tuple[Fraction, ...]], ...]

    def __post_init__(self):
        if any(c.kind != RATIONAL for c in self.spec.components):
            raise ValidationError("synchronization counts need rational components")
        if len(self.maps) < 2:
            raise ValidationError("a family needs at least two maps")
        values = [v for _, v in self.maps]
        if len(set(values)) != len(values):
            raise ValidationError("maps in a family must be pairwise distinct")
        for label, v in self.maps:
            if len(v) != len(self.spec.components) or any(x == 0 for x in v):
                raise ValidationError(f"map {label!r} needs one nonzero value per component")

    @classmethod
    def of(cls, spec: ActionSpec, maps: Mapping[str, object]) -> "SyncFamily":
        norm = []
        for label, v in maps.items():
            vals = v if isinstance(v, (tuple, list)) else (v,) * len(spec.components)
            norm.append((label, tuple(Fraction(x) for x in vals)))
        return cls(spec, tuple(norm))

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.maps]

    def value(self, label: str) -> tuple[Fraction, ...]:
        for k, v in self.maps:
            if k == label:
                return v
        raise KeyError(label)


def sync_family(labels: Sequence[str] = ("x1", "x2", "x3")) -> SyncFamily:
    """Sub-family of {x1, x2, x3} on the solenoid dual to ``Z[1/6]``."""
    known = {"x1": 1, "x2": 2, "x3": 3}
    unknown = [x for x in labels if x not in known]
    if unknown:
        raise ValidationError(f"unknown map label(s) {unknown}; expected a subset of {sorted(known)}")
    return SyncFamily.of(catalog("sync_1_2_3"), {x: known[x] for x in labels})


def _pow(q: Fraction, n: int) -> Fraction:
    return q**n


def weak_sync_count(family: SyncFamily, a: str, b: str, n: int) -> int:
    """``|{x : alpha^n x = beta^n x}|`` as an exact integer."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    total = 1
    for comp, la, lb in zip(family.spec.components, family.value(a), family.value(b)):
        y = _pow(la, n) - _pow(lb, n)
        if y == 0:
            raise DegenerateSync(f"{a}^{n} and {b}^{n} agree on component {comp.generators}")
        total *= _rational_kernel(comp, y.numerator, y.denominator) ** comp.multiplicity
    return total


def strong_sync_count_123(n: int) -> int:
    """Points where x1, x2 and x3 all agree at time n: ``gcd(3^n - 1, 2^n - 1)``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return math.gcd(3**n - 1, 2**n - 1)


def _entropy_factor(comp, q: Fraction) -> Fraction:
    """``prod_v max(|q|_v, 1)`` over the component's places."""
    out = Fraction(1)
    for place in comp.places:
        if place.kind == "prime":
            out *= max(algebra.padic_abs(q, place.prime), Fraction(1))
        else:
            out *= max(abs(q), Fraction(1))
    return out


def sync_growth_rate(family: SyncFamily) -> Fraction:
    """``max exp(h(beta^-1 alpha))`` over ordered pairs of distinct maps, exactly."""
    best = None
    for a in family.labels:
        for b in family.labels:
            if a == b:
                continue
            r = Fraction(1)
            for comp, la, lb in zip(family.spec.components, family.value(a), family.value(b)):
                if la == lb:
                    raise DegenerateSync(f"{a} and {b} agree on component {comp.generators}")
                r *= _entropy_factor(comp, la / lb) ** comp.multiplicity
            best = r if best is None else max(best, r)
    return best


@dataclass(frozen=True)
class TraceRow:
    n: int
    count: int
    root: float
    tail_max: float
    trivial: bool


def rstar_trace(family: SyncFamily, n_max: int) -> list[TraceRow]:
    """Strong counts for n = 1..n_max with n-th roots and the max of later roots."""
    values = sorted(v for _, v in family.maps)
    if values != [(Fraction(1),), (Fraction(2),), (Fraction(3),)]:
        raise UnsupportedFamily("strong counts are only available for {x1, x2, x3}")
    counts = [strong_sync_count_123(n) for n in range(1, n_max + 1)]
    roots = [c ** (1.0 / n) for n, c in enumerate(counts, start=1)]
    rows = []
    tail = 0.0
    for i in range(n_max - 1, -1, -1):
        tail = max(tail, roots[i])
        rows.append(TraceRow(i + 1, counts[i], roots[i], tail, counts[i] == 1))
    return rows[::-1]


def trace_csv(rows: Sequence[TraceRow], digits: int = 10) -> str:
    return "".join(f"{r.n},{r.count},{r.root:.{digits}f}\n" for r in rows)
