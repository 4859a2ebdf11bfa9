"""
Special Functions - exact divided differences, terminating hypergeometric sums
and Gegenbauer polynomials C_k^{3/2} normalized to 1 at x = 1.

Everything here works on fractions.Fraction; no floating point.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence, Tuple, Union

from errors import DomainError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction, str]


def as_fraction(value: Rational) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"not a rational: {value!r} ({e})") from e
    raise DomainError(f"not a rational: {value!r}")


def rising_factorial(a: Rational, k: int) -> Fraction:
    """a (a+1) ... (a+k-1); empty product for k = 0."""
    a = as_fraction(a)
    result = Fraction(1)
    for i in range(k):
        result *= a + i
    return result


def falling_factorial(a: Rational, k: int) -> Fraction:
    """a (a-1) ... (a-k+1); empty product for k = 0."""
    a = as_fraction(a)
    result = Fraction(1)
    for i in range(k):
        result *= a - i
    return result


def reciprocal_factorial(n: int) -> Fraction:
    """1/n!, taken to be 0 for negative n."""
    if n < 0:
        return Fraction(0)
    return Fraction(1, factorial(n))


def binomial(alpha: Rational, j: int) -> Fraction:
    """Generalized binomial coefficient alpha choose j."""
    if j < 0:
        return Fraction(0)
    return falling_factorial(alpha, j) / factorial(j)


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial with exact rational coefficients c_0, c_1, ... (low to high)."""

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coeffs = [as_fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[Rational]) -> "Polynomial":
        return cls(tuple(as_fraction(c) for c in coeffs))

    @classmethod
    def monomial(cls, k: int, coefficient: Rational = 1) -> "Polynomial":
        return cls((Fraction(0),) * k + (as_fraction(coefficient),))

    @classmethod
    def constant(cls, value: Rational) -> "Polynomial":
        return cls((as_fraction(value),))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, x: Rational) -> Fraction:
        x = as_fraction(x)
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def __add__(self, other: "Polynomial") -> "Polynomial":
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-_lift(other))

    def __rsub__(self, other: "Polynomial") -> "Polynomial":
        return _lift(other) - self

    def __mul__(self, other: Union["Polynomial", Rational]) -> "Polynomial":
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def power(self, k: int) -> "Polynomial":
        result = Polynomial.constant(1)
        for _ in range(k):
            result = result * self
        return result

    def truncate(self, order: int) -> "Polynomial":
        """Drop every term of degree above order."""
        return Polynomial(self.coeffs[: order + 1])

    def derivative(self, order: int = 1) -> "Polynomial":
        coeffs = list(self.coeffs)
        for _ in range(order):
            coeffs = [i * c for i, c in enumerate(coeffs)][1:]
        return Polynomial(tuple(coeffs))

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """self(inner(t)) by Horner's scheme."""
        result = Polynomial()
        for c in reversed(self.coeffs):
            result = result * inner + Polynomial.constant(c)
        return result

    def integrate(self, lo: Rational, hi: Rational) -> Fraction:
        lo, hi = as_fraction(lo), as_fraction(hi)
        return sum(
            (c * (hi ** (i + 1) - lo ** (i + 1)) / (i + 1) for i, c in enumerate(self.coeffs)),
            Fraction(0),
        )

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = [f"{c}*t^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(terms)


def _lift(value: Union[Polynomial, Rational]) -> Polynomial:
    return value if isinstance(value, Polynomial) else Polynomial.constant(value)


# Divided differences

def divided_difference(nodes: Sequence[Rational], values: Sequence[Rational]) -> Fraction:
    """[x_0, ..., x_k]_f = sum_i f(x_i) / prod_{j != i} (x_i - x_j) on distinct nodes."""
    xs = [as_fraction(x) for x in nodes]
    fs = [as_fraction(v) for v in values]
    if not xs:
        raise DomainError("divided difference needs at least one node")
    if len(xs) != len(fs):
        raise DomainError(f"{len(xs)} nodes but {len(fs)} values")
    if len(set(xs)) != len(xs):
        raise DomainError("repeated node: use dd_power for confluent divided differences of powers")
    total = Fraction(0)
    for i, (xi, fi) in enumerate(zip(xs, fs)):
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                denom *= xi - xj
        total += fi / denom
    return total


def divided_difference_recursive(nodes: Sequence[Rational], values: Sequence[Rational]) -> Fraction:
    """Same quantity through [x_0..x_k] = ([x_0..x_{k-1}] - [x_1..x_k]) / (x_0 - x_k)."""
    xs = [as_fraction(x) for x in nodes]
    table = [as_fraction(v) for v in values]
    if not xs or len(xs) != len(table):
        raise DomainError("nodes and values must be non-empty and of equal length")
    if len(set(xs)) != len(xs):
        raise DomainError("repeated node: use dd_power for confluent divided differences of powers")
    for width in range(1, len(xs)):
        table = [
            (table[i] - table[i + 1]) / (xs[i] - xs[i + width])
            for i in range(len(table) - 1)
        ]
    return table[0]


def dd_power(nodes: Sequence[Rational], n: int) -> Fraction:
    """[x_0..x_k] of t^n: the complete homogeneous sum of degree n - k in the nodes."""
    xs = [as_fraction(x) for x in nodes]
    if not xs:
        raise DomainError("divided difference needs at least one node")
    degree = n - (len(xs) - 1)
    if degree < 0:
        return Fraction(0)
    h = [Fraction(1)] + [Fraction(0)] * degree
    for x in xs:
        for d in range(1, degree + 1):
            h[d] += x * h[d - 1]
    return h[degree]


# Terminating hypergeometric sums

def hypergeometric_terminating(
    upper: Sequence[Rational], lower: Sequence[Rational], z: Rational
) -> Fraction:
    """pFq(upper; lower; z) summed term by term; some upper parameter must be a non-positive integer."""
    ups = [as_fraction(u) for u in upper]
    lows = [as_fraction(b) for b in lower]
    z = as_fraction(z)
    stops = [-u for u in ups if u.denominator == 1 and u <= 0]
    if not stops:
        raise DomainError(f"series with upper parameters {ups} does not terminate")
    n = int(min(stops))
    term = Fraction(1)
    total = Fraction(1)
    for j in range(n):
        num = Fraction(1)
        for u in ups:
            num *= u + j
        den = Fraction(j + 1)
        for b in lows:
            den *= b + j
        if den == 0:
            raise DomainError(f"zero denominator at term {j + 1}: lower parameters {lows}")
        term *= num * z / den
        total += term
    return total


def hyp2f1_terminating(a: Rational, n: int, c: Rational) -> Fraction:
    """2F1(a, -n; c; 1) by direct summation."""
    return hypergeometric_terminating((a, -n), (c,), 1)


def hyp3f2_saalschutz(a: Rational, b: Rational, n: int, c: Rational) -> Fraction:
    """3F2(a, b, -n; c, 1 + a + b - c - n; 1), balanced, by direct summation."""
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    return hypergeometric_terminating((a, b, -n), (c, 1 + a + b - c - n), 1)


def chu_vandermonde_rhs(a: Rational, n: int, c: Rational) -> Fraction:
    a, c = as_fraction(a), as_fraction(c)
    return rising_factorial(c - a, n) / rising_factorial(c, n)


def saalschutz_rhs(a: Rational, b: Rational, n: int, c: Rational) -> Fraction:
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    return (rising_factorial(c - a, n) * rising_factorial(c - b, n)) / (
        rising_factorial(c, n) * rising_factorial(c - a - b, n)
    )


# Gegenbauer polynomials, lambda = 3/2, C_k(1) = 1

def gegenbauer_c32(k: int, x: Rational) -> Fraction:
    x = as_fraction(x)
    return hypergeometric_terminating((k + 3, -k), (2,), (1 - x) / 2)


def gegenbauer_c32_polynomial(k: int) -> Polynomial:
    """Exact coefficients of C_k in powers of x."""
    z = Polynomial.from_coefficients((Fraction(1, 2), Fraction(-1, 2)))
    term = Fraction(1)
    result = Polynomial.constant(1)
    for j in range(k):
        term *= Fraction((k + 3 + j) * (-k + j), (2 + j) * (j + 1))
        result = result + z.power(j + 1) * term
    return result


def gegenbauer_c32_recurrence(k: int, x: Rational) -> Fraction:
    """(k+2) C_k = (2k+1) x C_{k-1} - (k-1) C_{k-2}."""
    x = as_fraction(x)
    prev, cur = Fraction(0), Fraction(1)
    for j in range(1, k + 1):
        prev, cur = cur, ((2 * j + 1) * x * cur - (j - 1) * prev) / (j + 2)
    return cur


def gegenbauer_norm(k: int) -> Fraction:
    """Integral of C_k^2 (1 - x^2) over [-1, 1]."""
    return Fraction(8, (2 * k + 3) * (k + 1) * (k + 2))


def gegenbauer_generating_coefficients(x: Rational, order: int) -> Tuple[Fraction, ...]:
    """Taylor coefficients of (1 - 2xt + t^2)^(-3/2) in t up to t^order."""
    x = as_fraction(x)
    u = Polynomial.from_coefficients((0, -2 * x, 1))
    total = Polynomial()
    u_power = Polynomial.constant(1)
    for j in range(order + 1):
        total = total + u_power * binomial(Fraction(-3, 2), j)
        u_power = (u_power * u).truncate(order)
    total = total.truncate(order)
    return tuple(total.coefficient(i) for i in range(order + 1))


def identity_lemma_sum(n1: int, n2: int) -> Fraction:
    """sum_l (2l+1) (-1)^l (n1)_l/(n1+l+1)! (n2)_l/(n2+l+1)!, which collapses to 1/(n1+n2+1)!."""
    total = Fraction(0)
    for l in range(min(n1, n2) + 1):
        sign = -1 if l % 2 else 1
        total += (
            sign
            * (2 * l + 1)
            * falling_factorial(n1, l)
            * reciprocal_factorial(n1 + l + 1)
            * falling_factorial(n2, l)
            * reciprocal_factorial(n2 + l + 1)
        )
    return total
