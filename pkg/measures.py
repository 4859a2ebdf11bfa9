"""
Measures - finitely supported probability measures with exact rational atoms

Moments, scaling, classical convolution and the measure JSON document.
"""

import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, List, Tuple, Union

from pydantic import BaseModel, ValidationError, field_validator

from errors import DomainError, MeasureError
from specialfn import Polynomial, Rational, as_fraction

logger = logging.getLogger(__name__)

Atom = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class SupportInterval:
    """Closed hull [lo, hi] of a support."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise MeasureError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class AtomicMeasure:
    """Probability measure sum_i p_i delta_{x_i}, atoms sorted by location."""

    atoms: Tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise MeasureError("a measure needs at least one atom")
        locations = [x for x, _ in self.atoms]
        if any(a >= b for a, b in zip(locations, locations[1:])):
            raise MeasureError("atom locations must be distinct and increasing")
        if any(p <= 0 for _, p in self.atoms):
            raise MeasureError("atom weights must be positive")
        if sum(p for _, p in self.atoms) != 1:
            raise MeasureError("atom weights must sum to 1")

    @property
    def locations(self) -> Tuple[Fraction, ...]:
        return tuple(x for x, _ in self.atoms)

    @property
    def weights(self) -> Tuple[Fraction, ...]:
        return tuple(p for _, p in self.atoms)

    @property
    def is_point_mass(self) -> bool:
        return len(self.atoms) == 1

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        return " ".join(f"{x}:{p}" for x, p in self.atoms)


def make_measure(pairs: Iterable[Tuple[Rational, Rational]]) -> AtomicMeasure:
    """Merge duplicate locations, normalize total mass to 1 and sort."""
    merged = defaultdict(Fraction)
    for x, p in pairs:
        x, p = as_fraction(x), as_fraction(p)
        if p <= 0:
            raise MeasureError(f"non-positive weight {p} at {x}")
        merged[x] += p
    if not merged:
        raise MeasureError("a measure needs at least one atom")
    total = sum(merged.values())
    return AtomicMeasure(tuple((x, merged[x] / total) for x in sorted(merged)))


def point_mass(c: Rational) -> AtomicMeasure:
    return AtomicMeasure(((as_fraction(c), Fraction(1)),))


def moment(mu: AtomicMeasure, k: int) -> Fraction:
    return sum((p * x ** k for x, p in mu.atoms), Fraction(0))


def moments(mu: AtomicMeasure, order: int) -> Tuple[Fraction, ...]:
    """m_1 .. m_order."""
    return tuple(moment(mu, k) for k in range(1, order + 1))


def mean(mu: AtomicMeasure) -> Fraction:
    return moment(mu, 1)


def variance(mu: AtomicMeasure) -> Fraction:
    return moment(mu, 2) - moment(mu, 1) ** 2


def support_interval(mu: AtomicMeasure) -> SupportInterval:
    return SupportInterval(mu.atoms[0][0], mu.atoms[-1][0])


def scale(mu: AtomicMeasure, a: Rational) -> AtomicMeasure:
    """Push-forward under x -> a x; a = 0 gives delta_0."""
    a = as_fraction(a)
    return make_measure((a * x, p) for x, p in mu.atoms)


def shift(mu: AtomicMeasure, c: Rational) -> AtomicMeasure:
    c = as_fraction(c)
    return make_measure((x + c, p) for x, p in mu.atoms)


def classical_convolve(mu: AtomicMeasure, nu: AtomicMeasure) -> AtomicMeasure:
    return make_measure((x + y, p * q) for x, p in mu.atoms for y, q in nu.atoms)


def binomial_moment_convolution(m_mu: List[Fraction], m_nu: List[Fraction], n: int) -> Fraction:
    """sum_k C(n,k) m_k m'_{n-k}, with the lists indexed from m_0."""
    return sum((comb(n, k) * m_mu[k] * m_nu[n - k] for k in range(n + 1)), Fraction(0))


def expectation_poly(mu: AtomicMeasure, p: Polynomial) -> Fraction:
    return sum((w * p(x) for x, w in mu.atoms), Fraction(0))


# Measure JSON document

class AtomEntry(BaseModel):
    x: Union[int, str]
    p: Union[int, str]

    @field_validator("x", "p")
    @classmethod
    def _rational_string(cls, value):
        try:
            as_fraction(value)
        except DomainError as e:
            raise ValueError(str(e)) from e
        return value


class MeasureDocument(BaseModel):
    atoms: List[AtomEntry]


def measure_from_json(text: str) -> AtomicMeasure:
    """Parse {"atoms":[{"x":"-1","p":"1/2"}, ...]}; weights must sum to exactly 1."""
    try:
        document = MeasureDocument.model_validate_json(text)
    except ValidationError as e:
        raise MeasureError(f"invalid measure document: {e.errors()[0]['msg']}") from e
    pairs = [(as_fraction(a.x), as_fraction(a.p)) for a in document.atoms]
    total = sum((p for _, p in pairs), Fraction(0))
    if pairs and total != 1:
        raise MeasureError(f"weights sum to {total}, expected 1")
    return make_measure(pairs)


def measure_to_json(mu: AtomicMeasure) -> str:
    document = {"atoms": [{"x": str(x), "p": str(p)} for x, p in mu.atoms]}
    return json.dumps(document, separators=(",", ":"))


def load_measure(path: Union[str, Path]) -> AtomicMeasure:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise MeasureError(f"cannot read measure file {path}: {e}") from e
    mu = measure_from_json(text)
    logger.debug("loaded %d atoms from %s", len(mu), path)
    return mu
