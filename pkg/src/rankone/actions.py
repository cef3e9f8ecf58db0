"""Algebraic data of entropy rank one Z^d-actions and their Lyapunov lists.

An action is described by its prime components.  Each component is a
domain R_d/p of Krull dimension one, given concretely by the images of the
d generators in a global field together with the set of unbounded places
and the multiplicity of the component.  Three kinds of global field are
supported:

``rational-s-integer``
    generators are nonzero rationals; places are rational primes and ``inf``.
``f2-function-field``
    generators are Laurent polynomials over F_2 built from ``t`` and ``1+t``;
    places are ``infinite``, ``t`` and ``t+1``.
``number-field-matrices``
    generators are commuting unimodular integer matrices (multiplication by
    units on an order); the archimedean places are recovered numerically
    from their simultaneous eigenvectors.

For rational and F_2 components the listed places are checked to be exactly
the unbounded ones.  For matrix components all embeddings are used and it
is up to the caller to make sure no non-archimedean place is unbounded.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

import mpmath
import numpy as np

from . import algebra
from .algebra import F2Laurent, IntMatrix
from .errors import (
    EigenSeparationFailure,
    ParseError,
    UnknownAction,
    ValidationError,
)

# 128-bit working precision for every logarithm in the package.
mp = mpmath.MPContext()
mp.prec = 128

RATIONAL = "rational-s-integer"
F2 = "f2-function-field"
MATRICES = "number-field-matrices"
KINDS = (RATIONAL, F2, MATRICES)

EIGEN_GAP = 1e-8
EIGEN_ATTEMPTS = 5


@dataclass(frozen=True)
class Place:
    """A normalised absolute value.

    ``kind`` is ``"prime"`` (a rational prime ``p``), ``"archimedean"``
    (the real place of Q when ``index`` is None, otherwise embedding number
    ``index`` of a matrix component) or ``"f2"`` (``variant`` is one of
    ``infinite``, ``t``, ``t+1``).
    """

    kind: str
    prime: int | None = None
    index: int | None = None
    variant: str | None = None
    images: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def rational_prime(cls, p: int) -> "Place":
        return cls("prime", prime=p)

    @classmethod
    def infinite(cls) -> "Place":
        return cls("archimedean")

    @classmethod
    def embedding(cls, index: int, images: Sequence = ()) -> "Place":
        return cls("archimedean", index=index, images=tuple(images))

    @classmethod
    def f2(cls, variant: str) -> "Place":
        if variant == "inf":
            variant = "infinite"
        if variant not in algebra.F2_PLACES:
            raise ValidationError(f"unknown F_2(t) place {variant!r}")
        return cls("f2", variant=variant)

    @property
    def label(self) -> str:
        if self.kind == "prime":
            return str(self.prime)
        if self.kind == "f2":
            return "inf" if self.variant == "infinite" else self.variant
        return "inf" if self.index is None else f"embedding{self.index}"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class PrimeComponent:
    """One associated prime of the module, with its generator images.

    ``cofinite`` components (only meaningful with ``allow_bounded_places``)
    use every place of Q *except* the listed ones; this models the solenoid
    dual to Z_(5), which does not satisfy the descending chain condition.
    """

    kind: str
    generators: tuple
    places: tuple[Place, ...]
    multiplicity: int = 1
    allow_bounded_places: bool = False
    cofinite: bool = False

    @property
    def d(self) -> int:
        return len(self.generators)

    @cached_property
    def active_places(self) -> tuple[Place, ...]:
        """Places entering the Lyapunov list (resolves ``cofinite``)."""
        if not self.cofinite:
            return self.places
        excluded = {p.prime for p in self.places if p.kind == "prime"}
        support: set[int] = set()
        for g in self.generators:
            support |= algebra.prime_support(g)
        out = [] if any(p.kind == "archimedean" for p in self.places) else [Place.infinite()]
        out += [Place.rational_prime(q) for q in sorted(support - excluded)]
        return tuple(out)


@dataclass(frozen=True)
class ActionSpec:
    name: str
    d: int
    components: tuple[PrimeComponent, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("d must be positive")
        if not self.components:
            raise ValidationError("an action needs at least one component")
        for i, comp in enumerate(self.components):
            try:
                _validate_component(comp, self.d)
            except ValidationError as exc:
                raise ValidationError(f"component {i}: {exc}") from None

    @property
    def D(self) -> int:
        """Number of components times the product of multiplicities."""
        prod = 1
        for c in self.components:
            prod *= c.multiplicity
        return len(self.components) * prod

    @property
    def archimedean_weight(self) -> int:
        """Sum over components of multiplicity times archimedean places.

        ``|1 - phi|_v <= 2`` only at archimedean places, so the periodic
        point correction factor is below ``2 ** archimedean_weight``.
        """
        return sum(
            c.multiplicity * sum(p.kind == "archimedean" for p in c.active_places)
            for c in self.components
        )


def _unbounded_rational_places(gens) -> set[str]:
    labels = {"inf"}
    for g in gens:
        labels |= {str(p) for p in algebra.prime_support(g)}
    return labels


def _unbounded_f2_places(gens: Sequence[F2Laurent]) -> set[str]:
    out = set()
    for g in gens:
        if g.high != 0:
            out.add("inf")
        if g.ord_t() != 0:
            out.add("t")
        if g.ord_t_plus_1() != 0:
            out.add("t+1")
    return out


def _validate_component(comp: PrimeComponent, d: int) -> None:
    if comp.kind not in KINDS:
        raise ValidationError(f"unknown component kind {comp.kind!r}")
    if comp.d != d:
        raise ValidationError(f"expected {d} generators, got {comp.d}")
    if comp.multiplicity < 1:
        raise ValidationError("multiplicity must be positive")
    if not comp.places:
        raise ValidationError("no places given")
    if comp.cofinite and (comp.kind != RATIONAL or not comp.allow_bounded_places):
        raise ValidationError("cofinite place sets need a rational component with allow_bounded_places")
    labels = [p.label for p in comp.places]
    if len(set(labels)) != len(labels):
        raise ValidationError(f"repeated place in {labels}")

    if comp.kind == RATIONAL:
        for g in comp.generators:
            if not isinstance(g, Fraction) or g == 0:
                raise ValidationError(f"generator {g!r} must be a nonzero rational")
        for p in comp.places:
            if p.kind == "prime":
                if not algebra.is_prime(p.prime):
                    raise ValidationError(f"place {p.prime} is not prime")
            elif not (p.kind == "archimedean" and p.index is None):
                raise ValidationError(f"place {p.label} does not belong to Q")
        if not comp.allow_bounded_places:
            required = _unbounded_rational_places(comp.generators)
            if set(labels) != required:
                raise ValidationError(
                    f"places {sorted(labels)} differ from the unbounded places {sorted(required)}"
                )
    elif comp.kind == F2:
        for g in comp.generators:
            if not isinstance(g, F2Laurent) or not g:
                raise ValidationError(f"generator {g!r} must be a nonzero F_2 Laurent polynomial")
            if g.strip_t_and_t_plus_1() != F2Laurent(1):
                raise ValidationError(f"generator {g} has irreducible factors other than t and t+1")
        if any(p.kind != "f2" for p in comp.places):
            raise ValidationError("F_2 components take places inf, t, t+1")
        if not comp.allow_bounded_places:
            required = _unbounded_f2_places(comp.generators)
            if set(labels) != required:
                raise ValidationError(
                    f"places {sorted(labels)} differ from the unbounded places {sorted(required)}"
                )
    else:
        mats = comp.generators
        if not all(isinstance(m, IntMatrix) for m in mats):
            raise ValidationError("matrix generators must be IntMatrix")
        if len({m.dim for m in mats}) != 1:
            raise ValidationError("matrices have different sizes")
        for m in mats:
            if m.det() not in (1, -1):
                raise ValidationError(f"matrix {m.tolist()} is not unimodular")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if not mats[i].commutes_with(mats[j]):
                    raise ValidationError(f"generators {i} and {j} do not commute")
        if any(p.kind != "archimedean" or p.index is None for p in comp.places):
            raise ValidationError("matrix components take the places 'embedding'")


# ---------------------------------------------------------------------------
# Simultaneous eigenvectors


def simultaneous_eigenvalues(matrices: Sequence[IntMatrix], seed: int = 0) -> list[tuple]:
    """Images of each generator under every embedding (signed, possibly complex).

    A random positive integer combination of the matrices is diagonalised at
    128-bit precision; its eigenvectors are shared by all the matrices.
    """
    rng = random.Random(seed)
    n = matrices[0].dim
    mats = [mp.matrix(m.tolist()) for m in matrices]
    tol = mp.mpf(10) ** -25
    for _ in range(EIGEN_ATTEMPTS):
        coeffs = [rng.randint(1, 10) for _ in matrices]
        combo = mp.matrix(n, n)
        for c, m in zip(coeffs, mats):
            combo += c * m
        evals, evecs = mp.eig(combo)
        out = []
        for k in range(n):
            v = evecs[:, k]
            j = max(range(n), key=lambda r: abs(v[r]))
            images = []
            for m in mats:
                mv = m * v
                lam = mv[j] / v[j]
                if abs(mp.im(lam)) <= mp.mpf(10) ** -30 * max(1, abs(lam)):
                    lam = mp.re(lam)
                images.append((lam, mp.norm(mv - lam * v) / mp.norm(v)))
            out.append(images)
        scale = max(abs(e) for e in evals)
        # A repeated eigenvalue of the combination is harmless when every
        # generator is scalar on that eigenspace (so v is a true common
        # eigenvector); otherwise try another combination.
        clustered = any(
            abs(evals[i] - evals[k]) <= EIGEN_GAP * scale for i in range(n) for k in range(i + 1, n)
        )
        if clustered:
            if any(res > tol * max(1, abs(lam)) for imgs in out for lam, res in imgs):
                continue
            cols = mp.fprod(mp.norm(evecs[:, k]) for k in range(n))
            if abs(mp.det(evecs)) <= mp.mpf(10) ** -12 * cols:
                raise EigenSeparationFailure("matrices are not simultaneously diagonalisable")
        result = [tuple(lam for lam, _ in imgs) for imgs in out]
        # Deterministic order: by the images of the generators.
        result.sort(key=lambda t: tuple((float(mp.re(x)), float(mp.im(x))) for x in t))
        return result
    raise EigenSeparationFailure(
        f"no combination of {len(matrices)} matrices separated the eigenvalues in {EIGEN_ATTEMPTS} tries"
    )


def simultaneous_eigendata(matrices: Sequence[IntMatrix], seed: int = 0) -> list[tuple]:
    """Absolute values ``(|lambda_1|, ..., |lambda_d|)`` per shared eigenvector."""
    return [tuple(abs(x) for x in t) for t in simultaneous_eigenvalues(matrices, seed)]


def embedding_places(matrices: Sequence[IntMatrix]) -> tuple[Place, ...]:
    return tuple(Place.embedding(i, imgs) for i, imgs in enumerate(simultaneous_eigenvalues(matrices)))


# ---------------------------------------------------------------------------
# Lyapunov lists


@dataclass(frozen=True)
class LyapunovEntry:
    """A Lyapunov vector with provenance.

    ``log_form`` is an exact description of each coordinate as an integer
    combination of logarithms of primes, ``((p, k), ...)`` meaning
    ``sum k log p``.  It is ``None`` for number-field components.
    """

    vector: tuple[float, ...]
    hp: tuple = field(repr=False, compare=False)
    log_form: tuple | None = field(default=None, compare=False)
    component: int = 0
    place: str = ""


@dataclass(frozen=True)
class LyapunovList:
    entries: tuple[LyapunovEntry, ...]
    d: int

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]], d: int | None = None) -> "LyapunovList":
        vecs = [tuple(float(x) for x in v) for v in vectors]
        if d is None:
            if not vecs:
                raise ValueError("cannot infer d from an empty list")
            d = len(vecs[0])
        entries = tuple(
            LyapunovEntry(v, tuple(mp.mpf(x) for x in v), None, 0, f"v{i}") for i, v in enumerate(vecs)
        )
        return cls(entries, d)

    @cached_property
    def array(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, self.d))
        return np.array([e.vector for e in self.entries], dtype=float)

    @property
    def hp_vectors(self) -> list[tuple]:
        return [e.hp for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def scaled(self, k: float) -> "LyapunovList":
        return LyapunovList.from_vectors([tuple(k * x for x in e.vector) for e in self.entries], self.d)

    def multiset(self, digits: int = 12) -> list[tuple[float, ...]]:
        return sorted(tuple(round(x, digits) + 0.0 for x in e.vector) for e in self.entries)


def _log_form_rational(x: Fraction, place: Place) -> tuple:
    if place.kind == "prime":
        v = algebra.padic_valuation(x, place.prime)
        return ((place.prime, -v),) if v else ()
    return tuple((q, algebra.padic_valuation(x, q)) for q in sorted(algebra.prime_support(x)))


def _eval_log_form(form: tuple):
    return mp.fsum(k * mp.log(p) for p, k in form) if form else mp.mpf(0)


def component_lyapunov(comp: PrimeComponent, index: int = 0) -> list[LyapunovEntry]:
    out = []
    for place in comp.active_places:
        if comp.kind == RATIONAL:
            forms = tuple(_log_form_rational(g, place) for g in comp.generators)
            hp = tuple(_eval_log_form(f) for f in forms)
        elif comp.kind == F2:
            exps = tuple(algebra.f2_place_exponent(g, place.variant) for g in comp.generators)
            forms = tuple(((2, e),) if e else () for e in exps)
            hp = tuple(e * mp.log(2) for e in exps)
        else:
            forms = None
            hp = tuple(mp.log(abs(x)) for x in place.images)
        entry = LyapunovEntry(tuple(float(x) for x in hp), hp, forms, index, place.label)
        out.extend([entry] * comp.multiplicity)
    return out


def lyapunov_list(spec: ActionSpec) -> LyapunovList:
    entries: list[LyapunovEntry] = []
    for i, comp in enumerate(spec.components):
        entries.extend(component_lyapunov(comp, i))
    return LyapunovList(tuple(entries), spec.d)


# ---------------------------------------------------------------------------
# Catalog


def _quad_mult_matrix(coeffs: Sequence[int]) -> IntMatrix:
    """Multiplication by ``a + b*sqrt2 + c*sqrt5 + e*sqrt10`` on the basis 1, sqrt2, sqrt5, sqrt10."""
    basis = [frozenset(), frozenset({2}), frozenset({5}), frozenset({2, 5})]
    cols = []
    for bj in basis:
        col = [0] * 4
        for c, bi in zip(coeffs, basis):
            if not c:
                continue
            factor = 1
            for p in bi & bj:
                factor *= p
            col[basis.index(bi ^ bj)] += c * factor
        cols.append(col)
    return IntMatrix.of([[cols[j][i] for j in range(4)] for i in range(4)])


XI1 = _quad_mult_matrix((1, 1, 0, 0))
XI2 = _quad_mult_matrix((2, 0, 1, 0))
XI3 = _quad_mult_matrix((3, 0, 0, 1))


def _rational(gens, places, **kw) -> PrimeComponent:
    return PrimeComponent(
        RATIONAL,
        tuple(Fraction(g) for g in gens),
        tuple(Place.infinite() if p == "inf" else Place.rational_prime(int(p)) for p in places),
        **kw,
    )


def _build(name: str) -> ActionSpec:
    if name in ("times2_times3", "sync_1_2_3"):
        return ActionSpec(name, 2, (_rational((2, 3), ("2", "3", "inf")),))
    if name == "ledrappier":
        gens = (F2Laurent.parse("t"), F2Laurent.parse("1+t"))
        places = tuple(Place.f2(v) for v in ("infinite", "t", "t+1"))
        return ActionSpec(name, 2, (PrimeComponent(F2, gens, places),))
    if name == "toral_sqrt2_sqrt5":
        mats = (XI1, XI2, XI3)
        return ActionSpec(name, 3, (PrimeComponent(MATRICES, mats, embedding_places(mats)),))
    if name == "z5_times2_times3":
        comp = _rational((2, 3), ("5",), allow_bounded_places=True, cofinite=True)
        return ActionSpec(name, 2, (comp,))
    raise UnknownAction(f"unknown action {name!r}; known: {', '.join(CATALOG)}")


CATALOG = ("times2_times3", "ledrappier", "toral_sqrt2_sqrt5", "z5_times2_times3", "sync_1_2_3")
_cache: dict[str, ActionSpec] = {}


def catalog(name: str) -> ActionSpec:
    if name not in _cache:
        _cache[name] = _build(name)
    return _cache[name]


# ---------------------------------------------------------------------------
# Action files (JSON)


def _parse_matrix(obj: Any) -> IntMatrix:
    if isinstance(obj, str):
        rows = [r.replace(",", " ").split() for r in obj.split(";") if r.strip()]
    else:
        rows = obj
    try:
        return IntMatrix.of([[int(str(x)) for x in r] for r in rows])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix {obj!r}: {exc}") from exc


def _parse_component(obj: dict, d: int) -> PrimeComponent:
    if not isinstance(obj, dict):
        raise ParseError("component must be an object")
    kind = obj.get("kind")
    gens = obj.get("generators")
    places = obj.get("places")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}")
    if not isinstance(gens, list) or not isinstance(places, list):
        raise ParseError("generators and places must be lists")
    mult = obj.get("multiplicity", 1)
    if not isinstance(mult, int):
        raise ParseError("multiplicity must be an integer")
    flags = dict(
        multiplicity=mult,
        allow_bounded_places=bool(obj.get("allow_bounded_places", False)),
        cofinite=bool(obj.get("cofinite", False)),
    )
    places = [str(p) for p in places]
    if kind == RATIONAL:
        g = tuple(algebra.parse_rational(str(x)) for x in gens)
        pl = []
        for p in places:
            if p == "inf":
                pl.append(Place.infinite())
            else:
                try:
                    pl.append(Place.rational_prime(int(p)))
                except ValueError:
                    raise ParseError(f"bad rational place {p!r}") from None
        return PrimeComponent(kind, g, tuple(pl), **flags)
    if kind == F2:
        g = tuple(F2Laurent.parse(str(x)) for x in gens)
        return PrimeComponent(kind, g, tuple(Place.f2(p) for p in places), **flags)
    mats = tuple(_parse_matrix(x) for x in gens)
    if places != ["embedding"]:
        raise ValidationError("matrix components take places [\"embedding\"]")
    if len({m.dim for m in mats}) != 1:
        raise ValidationError("matrices have different sizes")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not mats[i].commutes_with(mats[j]):
                raise ValidationError(f"generators {i} and {j} do not commute")
    return PrimeComponent(kind, mats, embedding_places(mats), **flags)


def parse_action_file(text: str) -> ActionSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("action file must hold one JSON object")
    try:
        name, d, comps = doc["name"], doc["d"], doc["components"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    if not isinstance(d, int) or not isinstance(comps, list) or not comps:
        raise ParseError("d must be an int and components a nonempty list")
    return ActionSpec(str(name), d, tuple(_parse_component(c, d) for c in comps))


def component_to_dict(comp: PrimeComponent) -> dict:
    if comp.kind == RATIONAL:
        gens = [algebra.format_rational(g) for g in comp.generators]
        places = [p.label for p in comp.places]
    elif comp.kind == F2:
        gens = [str(g) for g in comp.generators]
        places = [p.label for p in comp.places]
    else:
        gens = [[[str(x) for x in r] for r in m.rows] for m in comp.generators]
        places = ["embedding"]
    out = {"kind": comp.kind, "generators": gens, "places": places, "multiplicity": comp.multiplicity}
    if comp.allow_bounded_places:
        out["allow_bounded_places"] = True
    if comp.cofinite:
        out["cofinite"] = True
    return out


def spec_to_dict(spec: ActionSpec) -> dict:
    return {"name": spec.name, "d": spec.d, "components": [component_to_dict(c) for c in spec.components]}


def dump_action_file(spec: ActionSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


def load_action(name_or_path: str) -> ActionSpec:
    """Catalog name, or a path to a JSON action file."""
    if name_or_path in CATALOG:
        return catalog(name_or_path)
    try:
        with open(name_or_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        raise UnknownAction(f"{name_or_path!r} is neither a catalog action nor a readable file") from None
    return parse_action_file(text)
