"""
Moment Calculus - truncated power series, the moment/free-cumulant transforms
and free additive convolution on moment sequences.

Conventions: moment and cumulant vectors are 1-indexed (m_1..m_N) and stored
as tuples whose position 0 holds m_1.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Iterator, List, Mapping, Sequence, Tuple

from errors import SeriesError
from measures import AtomicMeasure, binomial_moment_convolution, moments
from specialfn import Polynomial, Rational, as_fraction, divided_difference

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 16
NC_ORACLE_MAX_ORDER = 14


@dataclass(frozen=True)
class FormalSeries:
    """c_0 + c_1 z + ... + c_N z^N, known exactly up to the truncation order N."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise SeriesError("a series needs a truncation order (at least one coefficient)")
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[Rational]) -> "FormalSeries":
        return cls(tuple(coeffs))

    @classmethod
    def zero(cls, order: int) -> "FormalSeries":
        return cls((Fraction(0),) * (order + 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        if k < 0 or k > self.order:
            raise SeriesError(f"coefficient z^{k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.order:
            raise SeriesError(f"cannot extend order {self.order} series to {order}")
        return FormalSeries(self.coeffs[: order + 1])

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        n = min(self.order, other.order)
        return FormalSeries(tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])))

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + other.scale(-1)

    def scale(self, factor: Rational) -> "FormalSeries":
        factor = as_fraction(factor)
        return FormalSeries(tuple(factor * c for c in self.coeffs))

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += a * other.coeffs[j]
        return FormalSeries(tuple(out))

    def power(self, k: int) -> "FormalSeries":
        if k < 0:
            return self.reciprocal().power(-k)
        result = FormalSeries((Fraction(1),) + (Fraction(0),) * self.order)
        for _ in range(k):
            result = result * self
        return result

    def reciprocal(self) -> "FormalSeries":
        """1/f; needs c_0 != 0."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise SeriesError("series with zero constant term has no reciprocal")
        out = [1 / c0]
        for j in range(1, self.order + 1):
            acc = sum((self.coeffs[i] * out[j - i] for i in range(1, j + 1)), Fraction(0))
            out.append(-acc / c0)
        return FormalSeries(tuple(out))

    def compose(self, inner: "FormalSeries") -> "FormalSeries":
        """self(inner(z)); inner must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise SeriesError("composition needs an inner series without constant term")
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        result = FormalSeries.zero(n)
        for c in reversed(self.coeffs[: n + 1]):
            result = result * inner
            result = FormalSeries((result.coeffs[0] + c,) + result.coeffs[1:])
        return result

    def divide_by_z(self) -> "FormalSeries":
        if self.coeffs[0] != 0:
            raise SeriesError("series has a constant term, cannot divide by z")
        if self.order == 0:
            raise SeriesError("order 0 series cannot be divided by z")
        return FormalSeries(self.coeffs[1:])


@dataclass(frozen=True)
class MomentVector:
    m: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(as_fraction(v) for v in self.m))

    @classmethod
    def of_measure(cls, mu: AtomicMeasure, order: int = DEFAULT_ORDER) -> "MomentVector":
        return cls(moments(mu, order))

    @property
    def order(self) -> int:
        return len(self.m)

    def __getitem__(self, k: int) -> Fraction:
        """m_k with m_0 = 1."""
        if k == 0:
            return Fraction(1)
        if k < 0 or k > self.order:
            raise SeriesError(f"moment m_{k} beyond order {self.order}")
        return self.m[k - 1]

    def with_zeroth(self) -> List[Fraction]:
        return [Fraction(1)] + list(self.m)

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.m)


@dataclass(frozen=True)
class CumulantVector:
    kappa: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "kappa", tuple(as_fraction(v) for v in self.kappa))

    @property
    def order(self) -> int:
        return len(self.kappa)

    def __getitem__(self, k: int) -> Fraction:
        if k < 1 or k > self.order:
            raise SeriesError(f"cumulant kappa_{k} beyond order {self.order}")
        return self.kappa[k - 1]

    def __add__(self, other: "CumulantVector") -> "CumulantVector":
        n = min(self.order, other.order)
        return CumulantVector(tuple(a + b for a, b in zip(self.kappa[:n], other.kappa[:n])))

    def dilate(self, a: Rational) -> "CumulantVector":
        """Cumulants of the measure scaled by a: kappa_k -> a^k kappa_k."""
        a = as_fraction(a)
        return CumulantVector(tuple(a ** (k + 1) * c for k, c in enumerate(self.kappa)))

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.kappa)


# Series transforms

def psi_series(m: MomentVector) -> FormalSeries:
    """z (1 + sum_k m_k z^k) up to z^{N+1}."""
    return FormalSeries((Fraction(0), Fraction(1)) + m.m)


def revert_series(f: FormalSeries) -> FormalSeries:
    """Compositional inverse g with f(g(z)) = z, built coefficient by coefficient."""
    if f.order < 1 or f.coeffs[0] != 0 or f.coeffs[1] == 0:
        raise SeriesError("series not invertible: needs c_0 = 0 and c_1 != 0")
    c1 = f.coeffs[1]
    g = [Fraction(0), 1 / c1]
    for k in range(2, f.order + 1):
        partial = FormalSeries(tuple(g) + (Fraction(0),))
        residual = f.truncate(k).compose(partial).coeffs[k]
        g.append(-residual / c1)
    logger.debug("reverted series of order %d", f.order)
    return FormalSeries(tuple(g))


def lagrange_inversion_check(f: FormalSeries, n: int, k: int) -> Tuple[Fraction, Fraction]:
    """Both sides of k [z^k] g^n = n [z^{-n}] f^{-k}, g the inverse of f, 1 <= n <= k <= order."""
    if not 1 <= n <= k <= f.order:
        raise SeriesError(f"need 1 <= n <= k <= {f.order}, got n={n}, k={k}")
    g = revert_series(f)
    lhs = k * g.power(n)[k]
    # [z^{-n}] f^{-k} = [z^{k-n}] (f/z)^{-k}
    rhs = n * f.divide_by_z().power(-k)[k - n]
    return lhs, rhs


@lru_cache(maxsize=256)
def _composition_table(seq: Tuple[Fraction, ...]) -> Tuple[Tuple[Fraction, ...], ...]:
    """table[r][n] = [z^n] (sum_i s_i z^i)^r for 0 <= r, n <= N."""
    order = len(seq)
    base = FormalSeries((Fraction(0),) + seq)
    rows = [FormalSeries((Fraction(1),) + (Fraction(0),) * order)]
    for _ in range(order):
        rows.append(rows[-1] * base)
    return tuple(row.coeffs for row in rows)


def _check_indices(n: int, k: int, order: int) -> None:
    if not 1 <= k <= n:
        raise SeriesError(f"need n >= k >= 1, got n={n}, k={k}")
    if n > order:
        raise SeriesError(f"index n={n} beyond order {order}")


def partial_sum_M(m: MomentVector, n: int, k: int) -> Fraction:
    """M_{n,k}: sum over compositions i_1+..+i_k = n of m_{i_1}...m_{i_k}."""
    _check_indices(n, k, m.order)
    return _composition_table(m.m)[k][n]


def partial_sum_K(kappa: CumulantVector, n: int, k: int) -> Fraction:
    """K_{n,k}, the cumulant analogue of M_{n,k}."""
    _check_indices(n, k, kappa.order)
    return _composition_table(kappa.kappa)[k][n]


def mk_linear(n: int, k: int, table: Mapping[int, Fraction]) -> Fraction:
    """M_{n,k} from the row K_{n,r}, r = k..n."""
    return sum(
        (Fraction(k, r) * comb(n, r - k) * table[r] for r in range(k, n + 1)),
        Fraction(0),
    )


def km_linear(n: int, k: int, table: Mapping[int, Fraction]) -> Fraction:
    """K_{n,k} from the row M_{n,r}, r = k..n."""
    return sum(
        ((-1) ** (r - k) * Fraction(k, r) * comb(n + r - k - 1, r - k) * table[r] for r in range(k, n + 1)),
        Fraction(0),
    )


def mk_transform(kappa: CumulantVector, n: int, k: int) -> Fraction:
    _check_indices(n, k, kappa.order)
    row = _composition_table(kappa.kappa)
    return mk_linear(n, k, {r: row[r][n] for r in range(k, n + 1)})


def km_transform(m: MomentVector, n: int, k: int) -> Fraction:
    _check_indices(n, k, m.order)
    row = _composition_table(m.m)
    return km_linear(n, k, {r: row[r][n] for r in range(k, n + 1)})


def cumulants_from_moments(m: MomentVector) -> CumulantVector:
    """Read kappa off psi^{-1}(z) = z / (1 + sum_k kappa_k z^k)."""
    if m.order == 0:
        return CumulantVector(())
    inverse = revert_series(psi_series(m))
    one_plus_k = inverse.divide_by_z().reciprocal()
    return CumulantVector(one_plus_k.coeffs[1:])


def moments_from_cumulants(kappa: CumulantVector) -> MomentVector:
    """m_n = M_{n,1} = sum_r (1/r) C(n, r-1) K_{n,r}."""
    if kappa.order == 0:
        return MomentVector(())
    row = _composition_table(kappa.kappa)
    return MomentVector(tuple(
        mk_linear(n, 1, {r: row[r][n] for r in range(1, n + 1)})
        for n in range(1, kappa.order + 1)
    ))


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered tuples of `parts` positive integers summing to `total`."""
    if parts < 1 or total < parts:
        return
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


# Non-crossing partition oracle

def non_crossing_partitions(n: int) -> Iterator[List[Tuple[int, ...]]]:
    """Every non-crossing partition of {1..n}, each as a list of blocks."""
    yield from _nc(tuple(range(1, n + 1)))


def _nc(elements: Tuple[int, ...]) -> Iterator[List[Tuple[int, ...]]]:
    if not elements:
        yield []
        return
    yield from _grow((elements[0],), elements[1:])


def _grow(block: Tuple[int, ...], remaining: Tuple[int, ...]) -> Iterator[List[Tuple[int, ...]]]:
    # close the block: what follows is independent
    for tail in _nc(remaining):
        yield [block] + tail
    # or pick the next member; the skipped gap is partitioned on its own
    for j in range(len(remaining)):
        for gap in _nc(remaining[:j]):
            for rest in _grow(block + (remaining[j],), remaining[j + 1:]):
                yield gap + rest


@lru_cache(maxsize=None)
def _block_size_profile(n: int) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    counts = Counter(
        tuple(sorted(len(block) for block in partition))
        for partition in non_crossing_partitions(n)
    )
    return tuple(sorted(counts.items()))


def nc_moments_oracle(kappa: CumulantVector) -> MomentVector:
    """m_n = sum over non-crossing partitions of prod_blocks kappa_{|B|}."""
    if kappa.order > NC_ORACLE_MAX_ORDER:
        raise SeriesError(
            f"non-crossing enumeration refused above order {NC_ORACLE_MAX_ORDER} (got {kappa.order})"
        )
    out = []
    for n in range(1, kappa.order + 1):
        out.append(sum(
            (count * prod((kappa[size] for size in sizes), start=Fraction(1))
             for sizes, count in _block_size_profile(n)),
            Fraction(0),
        ))
    return MomentVector(tuple(out))


# Convolutions at the moment level

def free_convolve_many(measures: Sequence[AtomicMeasure], order: int = DEFAULT_ORDER) -> MomentVector:
    if not measures:
        raise SeriesError("free convolution of an empty family")
    total = cumulants_from_moments(MomentVector.of_measure(measures[0], order))
    for mu in measures[1:]:
        total = total + cumulants_from_moments(MomentVector.of_measure(mu, order))
    return moments_from_cumulants(total)


def free_convolve_moments(mu: AtomicMeasure, nu: AtomicMeasure, order: int = DEFAULT_ORDER) -> MomentVector:
    """Moments of mu boxplus nu through additivity of free cumulants."""
    return free_convolve_many((mu, nu), order)


def classical_convolve_moments(m: MomentVector, m_other: MomentVector) -> MomentVector:
    """Moments of the classical convolution of two measures given only by moments."""
    order = min(m.order, m_other.order)
    a, b = m.with_zeroth(), m_other.with_zeroth()
    return MomentVector(tuple(binomial_moment_convolution(a, b, n) for n in range(1, order + 1)))


def mixed_free_symmetric_moments(mu: AtomicMeasure, nu: AtomicMeasure, n: int) -> List[Fraction]:
    """E_free[m_{k,n-k}(a, b)] for k = 0..n, a ~ mu and b ~ nu free.

    m_n(t mu boxplus nu) = sum_k C(n,k) t^k E[m_{k,n-k}] is sampled at
    t = 1..n+1 and the polynomial in t is recovered exactly.
    """
    if n < 0:
        raise SeriesError(f"negative degree {n}")
    if n == 0:
        return [Fraction(1)]
    kappa_mu = cumulants_from_moments(MomentVector.of_measure(mu, n))
    kappa_nu = cumulants_from_moments(MomentVector.of_measure(nu, n))
    nodes = list(range(1, n + 2))
    samples = [moments_from_cumulants(kappa_mu.dilate(t) + kappa_nu)[n] for t in nodes]
    coeffs = _interpolating_coefficients(nodes, samples)
    return [coeffs.coefficient(k) / comb(n, k) for k in range(n + 1)]


def _interpolating_coefficients(nodes: Sequence[int], samples: Sequence[Fraction]) -> Polynomial:
    """Newton form with divided-difference coefficients, expanded to monomials."""
    result = Polynomial()
    basis = Polynomial.constant(1)
    for j in range(len(nodes)):
        result = result + basis * divided_difference(nodes[: j + 1], samples[: j + 1])
        basis = basis * Polynomial.from_coefficients((-nodes[j], 1))
    return result
