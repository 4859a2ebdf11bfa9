"""Shared fixtures: the standard measures and measure files on disk."""

from fractions import Fraction

import pytest
from hypothesis import settings

from measures import make_measure, measure_to_json, point_mass

# exact rational arithmetic is slow on some draws
settings.register_profile("exact", deadline=None, max_examples=50)
settings.load_profile("exact")


@pytest.fixture
def bernoulli():
    """Symmetric Bernoulli on {-1, 1}."""
    return make_measure([(-1, 1), (1, 1)])


@pytest.fixture
def skewed():
    """{(0, 2/3), (1, 1/3)}."""
    return make_measure([(0, Fraction(2, 3)), (1, Fraction(1, 3))])


@pytest.fixture
def dirac_two():
    return point_mass(2)


@pytest.fixture
def three_atoms():
    return make_measure([(-1, 1), (Fraction(1, 2), 2), (2, 1)])


@pytest.fixture
def write_measure(tmp_path):
    """Write a measure as JSON and return the path."""
    def write(mu, name="measure.json"):
        path = tmp_path / name
        path.write_text(measure_to_json(mu))
        return path
    return write
