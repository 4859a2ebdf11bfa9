"""Tests for divided differences, terminating hypergeometric sums and Gegenbauer polynomials."""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from errors import DomainError
from specialfn import (
    Polynomial,
    as_fraction,
    binomial,
    chu_vandermonde_rhs,
    dd_power,
    divided_difference,
    divided_difference_recursive,
    falling_factorial,
    gegenbauer_c32,
    gegenbauer_c32_polynomial,
    gegenbauer_c32_recurrence,
    gegenbauer_generating_coefficients,
    gegenbauer_norm,
    hyp2f1_terminating,
    hyp3f2_saalschutz,
    hypergeometric_terminating,
    identity_lemma_sum,
    reciprocal_factorial,
    rising_factorial,
    saalschutz_rhs,
)
from strategies import distinct_nodes, non_integers


class TestFactorials:
    def test_rising_and_falling(self):
        assert rising_factorial(3, 2) == 12
        assert falling_factorial(5, 2) == 20
        assert rising_factorial(Fraction(1, 2), 0) == 1

    def test_reciprocal_factorial(self):
        assert reciprocal_factorial(4) == Fraction(1, 24)
        assert reciprocal_factorial(-1) == 0

    def test_general_binomial(self):
        assert binomial(Fraction(-3, 2), 2) == Fraction(15, 8)
        assert binomial(5, 2) == 10

    @pytest.mark.parametrize("value", [True, "x/y", 1.5])
    def test_rejects_non_rationals(self, value):
        with pytest.raises(DomainError):
            as_fraction(value)


class TestPolynomial:
    def test_evaluate_and_degree(self):
        p = Polynomial.from_coefficients((1, 0, 2))
        assert p(3) == 19
        assert p.degree == 2
        assert Polynomial().degree == -1

    def test_trailing_zeros_dropped(self):
        assert Polynomial.from_coefficients((1, 2, 0, 0)) == Polynomial.from_coefficients((1, 2))

    def test_derivative(self):
        assert Polynomial.monomial(6).derivative(4) == Polynomial.monomial(2, 360)
        assert Polynomial.monomial(3).derivative(4) == Polynomial()

    def test_compose(self):
        square = Polynomial.monomial(2)
        shifted = square.compose(Polynomial.from_coefficients((1, 1)))
        assert shifted == Polynomial.from_coefficients((1, 2, 1))

    def test_integrate(self):
        assert Polynomial.from_coefficients((1, 0, -1)).integrate(-1, 1) == Fraction(4, 3)

    def test_arithmetic(self):
        p = Polynomial.from_coefficients((1, 1))
        assert (p * p - Polynomial.monomial(2)) == Polynomial.from_coefficients((1, 2))
        assert (2 * p).coefficient(1) == 2
        assert p.power(3).coefficient(2) == 3


class TestDividedDifferences:
    def test_square_leading_coefficient(self):
        assert divided_difference((1, 2, 3), (1, 4, 9)) == 1

    def test_single_node(self):
        assert divided_difference((5,), (7,)) == 7

    def test_cubic(self):
        assert divided_difference((1, 2), (4, 32)) == 28

    def test_repeated_node(self):
        with pytest.raises(DomainError, match="dd_power"):
            divided_difference((1, 1), (1, 1))

    @pytest.mark.parametrize("nodes, n, expected", [
        ((1, 1), 3, 3),
        ((1, 1, 1, 1, 1), 4, 1),
        ((0, 2), 2, 2),
        ((1, 2, 3), 1, 0),
    ])
    def test_dd_power(self, nodes, n, expected):
        assert dd_power(nodes, n) == expected

    @given(distinct_nodes, st.integers(min_value=0, max_value=8))
    def test_three_forms_agree(self, nodes, n):
        values = [x ** n for x in nodes]
        explicit = divided_difference(nodes, values)
        assert explicit == divided_difference_recursive(nodes, values)
        assert explicit == dd_power(nodes, n)


class TestHypergeometric:
    def test_empty_sum(self):
        assert hyp2f1_terminating(Fraction(7, 3), 0, Fraction(1, 2)) == 1
        assert hyp3f2_saalschutz(1, 2, 0, 5) == 1

    def test_chu_vandermonde_values(self):
        assert hyp2f1_terminating(1, 1, 2) == Fraction(1, 2)
        assert hyp2f1_terminating(2, 3, 5) == Fraction(2, 7)

    def test_saalschutz_values(self):
        assert hyp3f2_saalschutz(1, 2, 1, 5) == Fraction(6, 5)
        assert hyp3f2_saalschutz(1, 1, 2, 3) == Fraction(3, 2)
        assert saalschutz_rhs(1, 1, 2, 3) == Fraction(3, 2)

    @given(non_integers, non_integers.map(lambda q: q + Fraction(1, 11)), st.integers(min_value=0, max_value=8))
    def test_chu_vandermonde(self, a, c, n):
        assert hyp2f1_terminating(a, n, c) == chu_vandermonde_rhs(a, n, c)

    @settings(suppress_health_check=[HealthCheck.filter_too_much])
    @given(non_integers, non_integers, st.fractions(min_value=1, max_value=9, max_denominator=11).filter(
        lambda q: q.denominator == 11), st.integers(min_value=0, max_value=7))
    def test_saalschutz(self, a, b, c, n):
        assert hyp3f2_saalschutz(a, b, n, c) == saalschutz_rhs(a, b, n, c)

    def test_non_terminating(self):
        with pytest.raises(DomainError):
            hypergeometric_terminating((Fraction(1, 2),), (), 1)

    def test_zero_denominator(self):
        with pytest.raises(DomainError):
            hypergeometric_terminating((-3,), (-1,), 1)

    @pytest.mark.parametrize("n1, n2, expected", [(0, 0, 1), (0, 1, Fraction(1, 2)), (1, 1, Fraction(1, 6))])
    def test_alternating_sum_values(self, n1, n2, expected):
        assert identity_lemma_sum(n1, n2) == expected

    @given(st.integers(min_value=0, max_value=12), st.integers(min_value=0, max_value=12))
    def test_alternating_sum_collapses(self, n1, n2):
        assert identity_lemma_sum(n1, n2) == reciprocal_factorial(n1 + n2 + 1)


class TestGegenbauer:
    def test_normalized_at_one(self):
        assert all(gegenbauer_c32(k, 1) == 1 for k in range(8))

    def test_low_degrees(self):
        assert gegenbauer_c32_polynomial(1) == Polynomial.monomial(1)
        assert gegenbauer_c32_polynomial(2) == Polynomial.from_coefficients((Fraction(-1, 4), 0, Fraction(5, 4)))

    @given(st.integers(min_value=0, max_value=10), st.fractions(min_value=-1, max_value=1, max_denominator=9))
    def test_three_forms_agree(self, k, x):
        value = gegenbauer_c32(k, x)
        assert value == gegenbauer_c32_recurrence(k, x)
        assert value == gegenbauer_c32_polynomial(k)(x)

    def test_orthogonality(self):
        weight = Polynomial.from_coefficients((1, 0, -1))
        for k in range(6):
            for j in range(6):
                integral = (gegenbauer_c32_polynomial(k) * gegenbauer_c32_polynomial(j) * weight).integrate(-1, 1)
                assert integral == (gegenbauer_norm(k) if k == j else 0)

    def test_norm_values(self):
        assert gegenbauer_norm(0) == Fraction(4, 3)
        assert gegenbauer_norm(1) == Fraction(4, 15)

    @given(st.fractions(min_value=-1, max_value=1, max_denominator=5))
    def test_generating_function(self, x):
        coefficients = gegenbauer_generating_coefficients(x, 7)
        for k, c in enumerate(coefficients):
            assert c == Fraction((k + 1) * (k + 2), 2) * gegenbauer_c32(k, x)
