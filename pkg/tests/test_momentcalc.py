"""Tests for formal series, moment-cumulant transforms and free convolution."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import SeriesError
from measures import classical_convolve, moment, moments, point_mass, shift
from momentcalc import (
    NC_ORACLE_MAX_ORDER,
    CumulantVector,
    FormalSeries,
    MomentVector,
    classical_convolve_moments,
    compositions,
    cumulants_from_moments,
    free_convolve_many,
    free_convolve_moments,
    km_linear,
    km_transform,
    lagrange_inversion_check,
    mixed_free_symmetric_moments,
    mk_linear,
    mk_transform,
    moments_from_cumulants,
    nc_moments_oracle,
    non_crossing_partitions,
    partial_sum_K,
    partial_sum_M,
    psi_series,
    revert_series,
)
from strategies import atomic_measures, non_degenerate_measures, small_rationals

CATALAN = (1, 2, 5, 14)


class TestFormalSeries:
    def test_psi_series(self):
        assert psi_series(MomentVector((0, 1))).coeffs == (0, 1, 0, 1)
        assert psi_series(MomentVector(())).coeffs == (0, 1)
        assert psi_series(MomentVector((Fraction(1, 2), Fraction(1, 2)))).coeffs == (0, 1, Fraction(1, 2), Fraction(1, 2))

    def test_revert_identity_and_linear(self):
        assert revert_series(FormalSeries((0, 1))).coeffs == (0, 1)
        assert revert_series(FormalSeries((0, 2))).coeffs == (0, Fraction(1, 2))

    def test_revert_quadratic(self):
        g = revert_series(FormalSeries((0, 1, 1, 0)))
        assert g.coeffs == (0, 1, -1, 2)

    @pytest.mark.parametrize("coeffs", [(1, 1), (0, 0, 1)])
    def test_not_invertible(self, coeffs):
        with pytest.raises(SeriesError, match="not invertible"):
            revert_series(FormalSeries(coeffs))

    @given(st.lists(small_rationals, min_size=2, max_size=6))
    def test_reversion_composes_to_identity(self, tail):
        f = FormalSeries((0, 1) + tuple(tail))
        g = revert_series(f)
        assert f.compose(g).truncate(f.order).coeffs == (0, 1) + (0,) * (f.order - 1)

    def test_series_arithmetic(self):
        f = FormalSeries((1, 1, 0, 0))
        assert (f * f).coeffs == (1, 2, 1, 0)
        assert f.reciprocal().coeffs == (1, -1, 1, -1)
        assert f.power(-1) == f.reciprocal()
        assert (f + f).coeffs == (2, 2, 0, 0)
        assert (f - f).coeffs == (0, 0, 0, 0)

    @given(st.lists(small_rationals, min_size=3, max_size=6), st.data())
    def test_lagrange_inversion(self, tail, data):
        f = FormalSeries((0, 1) + tuple(tail))
        k = data.draw(st.integers(min_value=1, max_value=f.order))
        n = data.draw(st.integers(min_value=1, max_value=k))
        lhs, rhs = lagrange_inversion_check(f, n, k)
        assert lhs == rhs

    def test_lagrange_bounds(self):
        with pytest.raises(SeriesError):
            lagrange_inversion_check(FormalSeries((0, 1, 1)), 3, 2)


class TestCumulants:
    def test_bernoulli(self, bernoulli):
        kappa = cumulants_from_moments(MomentVector.of_measure(bernoulli, 8))
        assert kappa == CumulantVector((0, 1, 0, -1, 0, 2, 0, -5))

    def test_point_mass(self):
        kappa = cumulants_from_moments(MomentVector.of_measure(point_mass(3), 5))
        assert kappa == CumulantVector((3, 0, 0, 0, 0))

    def test_semicircle_catalan(self):
        m = moments_from_cumulants(CumulantVector((0, 1, 0, 0, 0, 0, 0, 0)))
        assert m.m == (0, 1, 0, 2, 0, 5, 0, 14)

    def test_constant_cumulants(self):
        m = moments_from_cumulants(CumulantVector((Fraction(2, 3), 0, 0, 0)))
        assert m.m == tuple(Fraction(2, 3) ** k for k in range(1, 5))

    def test_bernoulli_round_trip(self, bernoulli):
        m = MomentVector.of_measure(bernoulli, 10)
        assert moments_from_cumulants(cumulants_from_moments(m)) == m

    @given(atomic_measures())
    def test_round_trip(self, mu):
        m = MomentVector.of_measure(mu, 8)
        assert moments_from_cumulants(cumulants_from_moments(m)) == m

    def test_moment_index_bounds(self):
        m = MomentVector((1, 2))
        assert m[0] == 1
        with pytest.raises(SeriesError):
            m[3]

    def test_dilation(self):
        kappa = CumulantVector((1, 1, 1))
        assert kappa.dilate(2) == CumulantVector((2, 4, 8))


class TestCompositionTables:
    def test_compositions(self):
        assert sorted(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
        assert list(compositions(2, 3)) == []

    def test_partial_sum_direct(self, skewed):
        m = MomentVector.of_measure(skewed, 6)
        direct = sum(
            (Fraction(1) * m[i] * m[j] * m[k] for i, j, k in compositions(6, 3)), Fraction(0)
        )
        assert partial_sum_M(m, 6, 3) == direct

    def test_diagonal_and_first(self, skewed):
        m = MomentVector.of_measure(skewed, 5)
        assert partial_sum_M(m, 5, 1) == m[5]
        assert partial_sum_M(m, 5, 5) == m[1] ** 5

    def test_index_errors(self, bernoulli):
        m = MomentVector.of_measure(bernoulli, 4)
        with pytest.raises(SeriesError):
            partial_sum_M(m, 3, 4)
        with pytest.raises(SeriesError):
            partial_sum_M(m, 5, 1)

    @given(atomic_measures(), st.data())
    def test_transforms_match_tables(self, mu, data):
        m = MomentVector.of_measure(mu, 8)
        kappa = cumulants_from_moments(m)
        n = data.draw(st.integers(min_value=1, max_value=8))
        k = data.draw(st.integers(min_value=1, max_value=n))
        assert isinstance(km_transform(m, n, k), Fraction)
        assert km_transform(m, n, k) == partial_sum_K(kappa, n, k)
        assert mk_transform(kappa, n, k) == partial_sum_M(m, n, k)

    @given(st.integers(min_value=1, max_value=10), st.data())
    def test_linear_maps_are_inverse(self, n, data):
        row = {r: data.draw(small_rationals) for r in range(1, n + 1)}
        image = {k: mk_linear(n, k, row) for k in range(1, n + 1)}
        assert {k: km_linear(n, k, image) for k in range(1, n + 1)} == row

    def test_inverse_map_stays_exact(self, three_atoms):
        m = MomentVector.of_measure(three_atoms, 6)
        kappa = cumulants_from_moments(m)
        for k in range(1, 7):
            value = km_transform(m, 6, k)
            assert isinstance(value, Fraction)
            assert value == partial_sum_K(kappa, 6, k)
        assert km_transform(m, 6, 1) == Fraction(-729, 512)


class TestNonCrossingOracle:
    def test_partition_counts_are_catalan(self):
        assert [sum(1 for _ in non_crossing_partitions(n)) for n in range(1, 5)] == list(CATALAN)

    @pytest.mark.parametrize("order", [1, 4, 8])
    def test_oracle_matches_series(self, bernoulli, three_atoms, order):
        for mu in (bernoulli, three_atoms):
            m = MomentVector.of_measure(mu, order)
            assert nc_moments_oracle(cumulants_from_moments(m)) == m

    def test_refuses_large_orders(self):
        with pytest.raises(SeriesError):
            nc_moments_oracle(CumulantVector((0,) * (NC_ORACLE_MAX_ORDER + 1)))


class TestFreeConvolution:
    def test_bernoulli_arcsine(self, bernoulli):
        assert free_convolve_moments(bernoulli, bernoulli, 6).m == (0, 2, 0, 6, 0, 20)

    @given(atomic_measures(), small_rationals)
    def test_point_mass_translates(self, mu, c):
        assert free_convolve_moments(mu, point_mass(c), 6).m == moments(shift(mu, c), 6)

    @given(atomic_measures(), atomic_measures())
    def test_first_three_moments_match_classical(self, mu, nu):
        assert free_convolve_moments(mu, nu, 3).m == moments(classical_convolve(mu, nu), 3)

    @settings(max_examples=30, deadline=None)
    @given(non_degenerate_measures, non_degenerate_measures)
    def test_even_moments_below_classical(self, mu, nu):
        classical = moments(classical_convolve(mu, nu), 12)
        free = free_convolve_moments(mu, nu, 12)
        for k in range(1, 7):
            assert classical[2 * k - 1] >= free[2 * k]

    def test_family_of_three(self, bernoulli, skewed, three_atoms):
        pair = free_convolve_moments(bernoulli, skewed, 6)
        expected = moments_from_cumulants(
            cumulants_from_moments(pair) + cumulants_from_moments(MomentVector.of_measure(three_atoms, 6))
        )
        assert free_convolve_many([bernoulli, skewed, three_atoms], 6) == expected

    def test_empty_family(self):
        with pytest.raises(SeriesError):
            free_convolve_many([], 4)

    def test_cumulants_add(self, skewed):
        kappa = cumulants_from_moments(MomentVector.of_measure(skewed, 4))
        assert cumulants_from_moments(free_convolve_moments(skewed, skewed, 4)) == kappa + kappa

    def test_classical_moment_vectors(self, bernoulli, skewed):
        m = classical_convolve_moments(MomentVector.of_measure(bernoulli, 5), MomentVector.of_measure(skewed, 5))
        assert m.m == moments(classical_convolve(bernoulli, skewed), 5)


class TestMixedFreeMoments:
    def test_bernoulli_pair(self, bernoulli):
        row = mixed_free_symmetric_moments(bernoulli, bernoulli, 4)
        assert row[2] == Fraction(2, 3)
        assert row[0] == row[4] == 1

    def test_degree_zero(self, bernoulli):
        assert mixed_free_symmetric_moments(bernoulli, bernoulli, 0) == [1]

    @given(atomic_measures(), atomic_measures())
    def test_pure_rows_are_moments(self, mu, nu):
        row = mixed_free_symmetric_moments(mu, nu, 3)
        assert row[0] == moment(nu, 3)
        assert row[3] == moment(mu, 3)

    def test_factorizes_below_degree_four(self, skewed, three_atoms):
        row = mixed_free_symmetric_moments(skewed, three_atoms, 3)
        assert row[1] == moment(skewed, 1) * moment(three_atoms, 2)
        assert row[2] == moment(skewed, 2) * moment(three_atoms, 1)

    def test_negative_degree(self, bernoulli):
        with pytest.raises(SeriesError):
            mixed_free_symmetric_moments(bernoulli, bernoulli, -1)

