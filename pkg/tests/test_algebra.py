import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankone import algebra
from rankone.algebra import F2Laurent, IntMatrix
from rankone.actions import XI1
from rankone.errors import NotPrime, NotUnimodular, ParseError, ZeroInput

from oracles import trial_factor


# --- valuations ------------------------------------------------------------


def test_padic_valuation_examples():
    assert algebra.padic_valuation(Fraction(8, 3), 2) == 3
    assert algebra.padic_valuation(Fraction(-1, 4), 2) == -2
    assert trial_factor(7775) == {5: 2, 311: 1}
    assert algebra.padic_valuation(2**5 * 3**5 - 1, 5) == 2


def test_padic_valuation_errors():
    with pytest.raises(ZeroInput):
        algebra.padic_valuation(0, 3)
    with pytest.raises(NotPrime):
        algebra.padic_valuation(12, 6)


@given(st.integers(-10**12, 10**12).filter(bool), st.sampled_from([2, 3, 5, 7, 11, 101]))
def test_valuation_matches_trial_division(n, p):
    assert algebra.padic_valuation(n, p) == trial_factor(n).get(p, 0)


@given(st.integers(-40, 40), st.integers(-40, 40), st.sampled_from([1, -1]))
def test_product_formula_on_s_units(a, b, sign):
    x = sign * Fraction(2) ** a * Fraction(3) ** b
    total = math.log(abs(x)) + sum(math.log(algebra.padic_abs(x, p)) for p in (2, 3))
    assert abs(total) < 1e-9


def test_is_prime():
    primes = [p for p in range(200) if algebra.is_prime(p)]
    assert primes[:10] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert all(len(trial_factor(p)) == 1 and trial_factor(p)[p] == 1 for p in primes)
    assert algebra.is_prime(2**61 - 1)
    assert not algebra.is_prime(2**61 + 1)


def test_parse_and_format_rational():
    assert algebra.parse_rational("-6/4") == Fraction(-3, 2)
    assert algebra.format_rational(Fraction(6, 3)) == "2"
    with pytest.raises(ParseError):
        algebra.parse_rational("two")


# --- F2 Laurent polynomials --------------------------------------------------


def test_f2_mul_examples():
    one_t = F2Laurent.parse("1+t")
    assert algebra.f2_mul(one_t, one_t) == F2Laurent.parse("1+t^2")
    assert F2Laurent.parse("t^8+1") == one_t**8
    assert algebra.f2_mul(F2Laurent.parse("t"), F2Laurent.parse("t^-1")) == F2Laurent.parse("1")


def test_f2_parse_roundtrip():
    f = F2Laurent.parse("t^-1+1+t")
    assert str(f) == "t^-1+1+t"
    assert F2Laurent.parse(str(f)) == f


def test_f2_place_values():
    L2 = math.log(2)
    f = F2Laurent.parse("t^2+t")
    assert algebra.f2_place_value(f, "t") == pytest.approx(-L2)
    g = F2Laurent.parse("t^2+1")
    vals = [algebra.f2_place_value(g, v) for v in algebra.F2_PLACES]
    assert vals == pytest.approx([2 * L2, 0.0, -2 * L2])
    assert sum(vals) == 0
    assert all(algebra.f2_place_value(F2Laurent.parse("1"), v) == 0 for v in algebra.F2_PLACES)
    with pytest.raises(ZeroInput):
        algebra.f2_place_value(F2Laurent(), "t")


def test_frobenius_identity():
    for k in range(1, 8):
        lhs = F2Laurent.monomial(2**k) + F2Laurent.parse("1")
        assert lhs == F2Laurent.parse("1+t") ** (2**k)


f2_polys = st.builds(
    lambda bits, low: F2Laurent(bits, low), st.integers(1, 2**24), st.integers(-8, 8)
)


@given(f2_polys, f2_polys)
def test_place_exponent_is_additive(f, g):
    for v in algebra.F2_PLACES:
        assert algebra.f2_place_exponent(f * g, v) == algebra.f2_place_exponent(f, v) + algebra.f2_place_exponent(g, v)


@given(f2_polys, f2_polys, f2_polys)
def test_f2_ring_axioms(f, g, h):
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f + f == F2Laurent()


# --- integer matrices --------------------------------------------------------


def test_det_examples():
    assert IntMatrix.identity(4).det() == 1
    companion = IntMatrix.of([[0, 1], [1, 2]])
    assert algebra.int_matrix_det(companion - IntMatrix.identity(2)) == -2
    # eigenvalues of XI1 are 1 +- sqrt2, each twice
    surd = math.prod(x - 1 for x in (1 + math.sqrt(2), 1 - math.sqrt(2)) * 2)
    assert abs((XI1 - IntMatrix.identity(4)).det() - surd) < 1e-6


matrices4 = st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=4, max_size=4).map(IntMatrix.of)


@given(matrices4, matrices4)
def test_det_multiplicative(a, b):
    assert (a @ b).det() == a.det() * b.det()


@settings(max_examples=50)
@given(matrices4)
def test_det_matches_fraction_elimination(a):
    # Leibniz expansion as the oracle
    import itertools

    def sign(p):
        s = 1
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    s = -s
        return s

    rows = a.rows
    expected = sum(sign(p) * math.prod(rows[i][p[i]] for i in range(4)) for p in itertools.permutations(range(4)))
    assert a.det() == expected


def test_pow_examples():
    assert XI1**0 == IntMatrix.identity(4)
    # (1 + sqrt2)^2 = 3 + 2 sqrt2
    assert XI1**2 == IntMatrix.of([[3, 4, 0, 0], [2, 3, 0, 0], [0, 0, 3, 4], [0, 0, 2, 3]])
    # (1 + sqrt2)^-1 = -1 + sqrt2
    assert XI1 ** -1 == IntMatrix.of([[-1, 2, 0, 0], [1, -1, 0, 0], [0, 0, -1, 2], [0, 0, 1, -1]])


def test_negative_power_needs_unimodular():
    with pytest.raises(NotUnimodular):
        IntMatrix.of([[2, 0], [0, 1]]) ** -1


unimodular = st.sampled_from(
    [XI1, IntMatrix.of([[2, 1], [1, 1]]), IntMatrix.of([[0, 1], [1, 1]]), IntMatrix.of([[1, 1, 0], [0, 1, 1], [0, 0, 1]])]
)


@given(unimodular, st.integers(-3, 3), st.integers(-3, 3))
def test_pow_additive(m, a, b):
    assert m ** (a + b) == (m**a) @ (m**b)
