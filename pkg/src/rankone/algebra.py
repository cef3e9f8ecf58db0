"""Exact arithmetic substrate.

Three kinds of objects are needed to count periodic points exactly:

* rationals (``fractions.Fraction``) together with their p-adic valuations,
* Laurent polynomials over F_2, with the valuations at the places
  ``infinite``, ``t`` and ``t+1`` of F_2(t),
* square integer matrices with exact determinants and powers.

Absolute values follow the normalisation under which the product formula
holds: ``|x|_p = p**(-v_p(x))`` on Q and ``|f|_v = 2**(-ord_v(f))`` for the
degree-one places of F_2(t), with ``|f|_inf = 2**deg(f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import NotPrime, NotUnimodular, ParseError, ZeroInput

Rational = Union[int, Fraction]

LOG2 = math.log(2.0)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 prime bases (deterministic below 3.3e24)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _int_valuation(n: int, p: int) -> int:
    # n != 0
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(x: Rational, p: int) -> int:
    """Return ``v`` with ``x = p**v * (unit at p)``."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("the p-adic valuation of 0 is undefined")
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def padic_abs(x: Rational, p: int) -> Fraction:
    """Normalised p-adic absolute value ``p**(-v_p(x))``; ``|0|_p = 0``."""
    if Fraction(x) == 0:
        return Fraction(0)
    v = padic_valuation(x, p)
    return Fraction(1, p**v) if v >= 0 else Fraction(p ** (-v))


def prime_support(x: Rational) -> set[int]:
    """Primes dividing numerator or denominator, by trial division."""
    x = Fraction(x)
    out: set[int] = set()
    for n in (abs(x.numerator), x.denominator):
        q = 2
        while q * q <= n:
            while n % q == 0:
                out.add(q)
                n //= q
            q += 1
        if n > 1:
            out.add(n)
    return out


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational: {text!r}") from exc


def format_rational(x: Rational) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Laurent polynomials over F_2


def _clmul(a: int, b: int) -> int:
    if a.bit_count() < b.bit_count():
        a, b = b, a
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def _clsquare(a: int) -> int:
    # Frobenius: spread the bits apart.
    return int("0".join(bin(a)[2:]), 2) if a else 0


def _div_one_plus_t(bits: int) -> int:
    """Exact quotient by (1+t); the coefficients are prefix XORs."""
    n = bits.bit_length()
    g = bits
    shift = 1
    while shift < n:
        g ^= g << shift
        shift <<= 1
    return g & ((1 << (n - 1)) - 1)


class F2Laurent:
    """Element of F_2[t, t^-1], stored as a bitset shifted by ``low``.

    Bit ``i`` of ``bits`` is the coefficient of ``t**(low + i)``. The lowest
    stored bit is always set unless the polynomial is zero.
    """

    __slots__ = ("bits", "low")

    def __init__(self, bits: int = 0, low: int = 0):
        if bits < 0:
            raise ValueError("bitset must be nonnegative")
        if bits:
            tz = (bits & -bits).bit_length() - 1
            bits >>= tz
            low += tz
        else:
            low = 0
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "low", low)

    def __setattr__(self, name, value):
        raise AttributeError("F2Laurent is immutable")

    @classmethod
    def monomial(cls, k: int) -> "F2Laurent":
        return cls(1, k)

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> "F2Laurent":
        exps = list(exponents)
        if not exps:
            return cls()
        lo = min(exps)
        bits = 0
        for e in exps:
            bits ^= 1 << (e - lo)
        return cls(bits, lo)

    @classmethod
    def parse(cls, text: str) -> "F2Laurent":
        """Parse strings such as ``"t^-1+1+t"`` or ``"1 + t^3"``; ``"0"`` is zero."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            if s == "":
                raise ParseError("empty F_2 Laurent polynomial")
            return cls()
        exps = []
        for term in s.split("+"):
            if term == "1":
                exps.append(0)
            elif term == "t":
                exps.append(1)
            elif term.startswith("t^"):
                try:
                    exps.append(int(term[2:].strip("()")))
                except ValueError as exc:
                    raise ParseError(f"bad term {term!r} in {text!r}") from exc
            else:
                raise ParseError(f"bad term {term!r} in {text!r}")
        return cls.from_exponents(exps)

    def exponents(self) -> list[int]:
        out, b, i = [], self.bits, 0
        while b:
            if b & 1:
                out.append(self.low + i)
            b >>= 1
            i += 1
        return out

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        parts = []
        for e in self.exponents():
            parts.append("1" if e == 0 else "t" if e == 1 else f"t^{e}")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"F2Laurent({str(self)!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other in (0, 1):
            other = F2Laurent(other)
        if not isinstance(other, F2Laurent):
            return NotImplemented
        return self.bits == other.bits and self.low == other.low

    def __hash__(self) -> int:
        return hash((self.bits, self.low))

    def __bool__(self) -> bool:
        return self.bits != 0

    @property
    def high(self) -> int:
        """Exponent of the leading term (the degree as a rational function)."""
        return self.low + self.bits.bit_length() - 1

    def __add__(self, other: "F2Laurent") -> "F2Laurent":
        if not other.bits:
            return self
        if not self.bits:
            return other
        lo = min(self.low, other.low)
        return F2Laurent((self.bits << (self.low - lo)) ^ (other.bits << (other.low - lo)), lo)

    __sub__ = __add__

    def __mul__(self, other: "F2Laurent") -> "F2Laurent":
        return F2Laurent(_clmul(self.bits, other.bits), self.low + other.low)

    def __pow__(self, k: int) -> "F2Laurent":
        if k < 0:
            if self.bits != 1:
                raise ZeroDivisionError(f"{self} is not a unit of F_2[t, 1/t]")
            return F2Laurent(1, self.low * k)
        return _f2_pow(self, k)

    def ord_t(self) -> int:
        if not self.bits:
            raise ZeroInput("ord of 0")
        return self.low

    def ord_t_plus_1(self) -> int:
        if not self.bits:
            raise ZeroInput("ord of 0")
        b, v = self.bits, 0
        while b.bit_count() % 2 == 0:
            b = _div_one_plus_t(b)
            v += 1
        return v

    def strip_t_and_t_plus_1(self) -> "F2Laurent":
        """The part coprime to t and t+1 (a polynomial with constant term 1)."""
        b = self.bits
        while b.bit_count() % 2 == 0:
            b = _div_one_plus_t(b)
        return F2Laurent(b, 0)


@lru_cache(maxsize=4096)
def _f2_pow(f: F2Laurent, k: int) -> F2Laurent:
    result = 1
    base = f.bits
    e = k
    while e:
        if e & 1:
            result = _clmul(result, base)
        e >>= 1
        if e:
            base = _clsquare(base)
    return F2Laurent(result, f.low * k)


def f2_mul(a: F2Laurent, b: F2Laurent) -> F2Laurent:
    return a * b


F2_PLACES = ("infinite", "t", "t+1")


def f2_place_exponent(f: F2Laurent, place: str) -> int:
    """Integer ``e`` with ``|f|_place = 2**e``."""
    if not f:
        raise ZeroInput("absolute value of 0 requested")
    if place in ("infinite", "inf"):
        return f.high
    if place == "t":
        return -f.ord_t()
    if place == "t+1":
        return -f.ord_t_plus_1()
    raise ValueError(f"unknown F_2(t) place {place!r}")


def f2_place_value(f: F2Laurent, place: str) -> float:
    """``log |f|_place`` in nats (always an integer multiple of log 2)."""
    return f2_place_exponent(f, place) * LOG2


# ---------------------------------------------------------------------------
# Integer matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if n == 0 or any(len(r) != n for r in self.rows):
            raise ValueError("IntMatrix must be square and nonempty")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(x for r in self.rows for x in r)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(k * a for a in r) for r in self.rows))

    def det(self) -> int:
        return int_matrix_det(self)

    def __pow__(self, k: int) -> "IntMatrix":
        return int_matrix_pow(self, k)

    def commutes_with(self, other: "IntMatrix") -> bool:
        return self @ other == other @ self

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def int_matrix_det(m: IntMatrix) -> int:
    """Bareiss fraction-free elimination; every intermediate is an exact integer."""
    a = [list(r) for r in m.rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _adjugate(m: IntMatrix) -> IntMatrix:
    n = m.dim
    if n == 1:
        return IntMatrix(((1,),))
    rows = m.rows
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = tuple(tuple(rows[r][c] for c in range(n) if c != j) for r in range(n) if r != i)
            adj[j][i] = (-1) ** (i + j) * int_matrix_det(IntMatrix(minor))
    return IntMatrix.of(adj)


def int_matrix_inverse(m: IntMatrix) -> IntMatrix:
    d = int_matrix_det(m)
    if d not in (1, -1):
        raise NotUnimodular(f"determinant {d} is not a unit")
    return _adjugate(m).scale(d)


def int_matrix_pow(m: IntMatrix, k: int) -> IntMatrix:
    if k < 0:
        m = int_matrix_inverse(m)
        k = -k
    result = IntMatrix.identity(m.dim)
    base = m
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result
