"""Tests for atomic measures, their moments and the measure JSON document."""

from fractions import Fraction

import pytest
from hypothesis import given

from errors import MeasureError
from measures import (
    classical_convolve,
    expectation_poly,
    load_measure,
    make_measure,
    mean,
    measure_from_json,
    measure_to_json,
    moment,
    moments,
    point_mass,
    scale,
    shift,
    support_interval,
    variance,
)
from specialfn import Polynomial
from strategies import atomic_measures, nonzero_scales


class TestMakeMeasure:
    def test_normalizes_weights(self):
        mu = make_measure([(-1, 1), (1, 1)])
        assert mu.atoms == ((Fraction(-1), Fraction(1, 2)), (Fraction(1), Fraction(1, 2)))

    def test_merges_duplicates(self):
        mu = make_measure([(0, Fraction(1, 2)), (0, Fraction(1, 2))])
        assert mu.atoms == ((Fraction(0), Fraction(1)),)

    def test_single_atom(self):
        assert make_measure([(1, 3)]).atoms == ((Fraction(1), Fraction(1)),)

    def test_empty_input(self):
        with pytest.raises(MeasureError):
            make_measure([])

    @pytest.mark.parametrize("weight", [0, -1])
    def test_non_positive_weight(self, weight):
        with pytest.raises(MeasureError):
            make_measure([(0, 1), (1, weight)])

    def test_string_rationals(self):
        mu = make_measure([("-1/2", "1/3"), ("3/2", "2/3")])
        assert mu.locations == (Fraction(-1, 2), Fraction(3, 2))
        assert str(mu) == "-1/2:1/3 3/2:2/3"


class TestMoments:
    def test_bernoulli_fourth(self, bernoulli):
        assert moment(bernoulli, 4) == 1

    @given(atomic_measures())
    def test_zeroth_moment_is_mass(self, mu):
        assert moment(mu, 0) == 1

    def test_skewed_third(self, skewed):
        assert moment(skewed, 3) == Fraction(1, 3)

    def test_moment_list(self, bernoulli):
        assert moments(bernoulli, 4) == (0, 1, 0, 1)

    def test_variance(self, bernoulli, skewed, dirac_two):
        assert variance(bernoulli) == 1
        assert variance(dirac_two) == 0
        assert variance(skewed) == Fraction(2, 9)

    def test_mean_and_hull(self, three_atoms):
        assert mean(three_atoms) == Fraction(1, 2)
        hull = support_interval(three_atoms)
        assert (hull.lo, hull.hi, hull.length) == (-1, 2, 3)


class TestTransforms:
    def test_scale_bernoulli(self, bernoulli):
        assert scale(bernoulli, 2) == make_measure([(-2, 1), (2, 1)])

    @given(atomic_measures())
    def test_scale_identity(self, mu):
        assert scale(mu, 1) == mu

    def test_reflection_resorts(self):
        mu = make_measure([(0, 1), (1, 1)])
        assert scale(mu, -1).atoms == ((Fraction(-1), Fraction(1, 2)), (Fraction(0), Fraction(1, 2)))

    def test_scale_by_zero(self, three_atoms):
        assert scale(three_atoms, 0) == point_mass(0)

    @given(atomic_measures(), nonzero_scales)
    def test_scaled_moments(self, mu, a):
        assert moment(scale(mu, a), 3) == a ** 3 * moment(mu, 3)

    def test_shift(self, bernoulli):
        assert shift(bernoulli, 1) == make_measure([(0, 1), (2, 1)])


class TestClassicalConvolution:
    def test_bernoulli_square(self, bernoulli):
        nu = classical_convolve(bernoulli, bernoulli)
        assert str(nu) == "-2:1/4 0:1/2 2:1/4"
        assert moment(nu, 4) == 8

    @given(atomic_measures())
    def test_dirac_zero_is_identity(self, mu):
        assert classical_convolve(mu, point_mass(0)) == mu

    @given(atomic_measures(), atomic_measures())
    def test_variances_add(self, mu, nu):
        assert variance(classical_convolve(mu, nu)) == variance(mu) + variance(nu)


class TestExpectation:
    def test_square(self, bernoulli):
        assert expectation_poly(bernoulli, Polynomial.monomial(2)) == 1

    @given(atomic_measures())
    def test_constant(self, mu):
        assert expectation_poly(mu, Polynomial.constant(1)) == 1

    def test_skewed(self, skewed):
        assert expectation_poly(skewed, Polynomial.from_coefficients((0, 1, 1))) == Fraction(2, 3)


class TestMeasureJson:
    def test_round_trip(self, three_atoms):
        assert measure_from_json(measure_to_json(three_atoms)) == three_atoms

    def test_compact_document(self, bernoulli):
        assert measure_to_json(bernoulli) == '{"atoms":[{"x":"-1","p":"1/2"},{"x":"1","p":"1/2"}]}'

    def test_integer_fields(self):
        mu = measure_from_json('{"atoms":[{"x":2,"p":1}]}')
        assert mu == point_mass(2)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(MeasureError, match="sum"):
            measure_from_json('{"atoms":[{"x":"0","p":"1/2"}]}')

    @pytest.mark.parametrize("text", [
        "not json",
        '{"atoms":[{"x":"zero","p":"1"}]}',
        '{"atoms":[{"x":"0"}]}',
        '{"atoms":[]}',
    ])
    def test_malformed(self, text):
        with pytest.raises(MeasureError):
            measure_from_json(text)

    def test_load_measure(self, write_measure, skewed):
        assert load_measure(write_measure(skewed)) == skewed

    def test_missing_file(self, tmp_path):
        with pytest.raises(MeasureError):
            load_measure(tmp_path / "absent.json")
