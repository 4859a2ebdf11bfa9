"""Hypothesis strategies for rationals and atomic measures."""

from fractions import Fraction

from hypothesis import strategies as st

from measures import make_measure

small_rationals = st.fractions(min_value=-2, max_value=2, max_denominator=4)
non_integers = st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(lambda q: q.denominator != 1)
weights = st.integers(min_value=1, max_value=5)


def atomic_measures(min_atoms: int = 1, max_atoms: int = 4):
    """Measures with distinct atoms on a quarter-grid of [-2, 2]."""
    return st.lists(
        st.tuples(small_rationals, weights),
        min_size=min_atoms,
        max_size=max_atoms,
        unique_by=lambda atom: atom[0],
    ).map(make_measure)


non_degenerate_measures = atomic_measures(min_atoms=2, max_atoms=4)

distinct_nodes = st.lists(
    st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=1, max_size=5, unique=True
)

nonzero_scales = st.sampled_from([Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2)])
