"""
Convolution Comparison - the measure m~_{mu,nu} comparing classical and free convolution

Pairing m~ with f''''(ax + by) gives ((a mu * b nu)(f) - (a mu boxplus b nu)(f)) / (a^2 b^2).
Exact routes work on Fractions; the spectral and quadrature routes are
floating-point oracles built on the omega density of the measure embeddings.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb, factorial
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError
from scipy.special import eval_gegenbauer

from errors import DomainError, MeasureError, QuadratureError
from measures import (
    AtomicMeasure,
    classical_convolve,
    expectation_poly,
    moment,
    scale,
    support_interval,
)
from momentcalc import (
    MomentVector,
    cumulants_from_moments,
    free_convolve_many,
    free_convolve_moments,
    mixed_free_symmetric_moments,
    partial_sum_K,
    partial_sum_M,
)
from quadrature import gauss_legendre, integrate_edges, softened_rule
from spectral import (
    DensityGrid,
    OmegaSlice,
    embed_measure,
    grid_axis,
    integrate_omega,
    merge_points,
    monomial_basis,
)
from specialfn import Polynomial, Rational, as_fraction, dd_power, gegenbauer_c32_polynomial, reciprocal_factorial

logger = logging.getLogger(__name__)

ROUTES = ("series", "cumulant", "spectral", "quadrature")
QUADRATURE_ORDERS = (16, 32, 64, 128)

Value = Union[Fraction, float]


@dataclass(frozen=True)
class BivariatePolynomial:
    """sum c_{i,j} x^i y^j with exact coefficients; zero terms are dropped."""

    terms: Tuple[Tuple[Tuple[int, int], Fraction], ...] = ()

    def __post_init__(self):
        merged: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), c in self.terms:
            if i < 0 or j < 0:
                raise DomainError(f"negative exponent ({i}, {j})")
            merged[(i, j)] = merged.get((i, j), Fraction(0)) + as_fraction(c)
        object.__setattr__(
            self, "terms", tuple(sorted((key, c) for key, c in merged.items() if c != 0))
        )

    @classmethod
    def from_dict(cls, coeffs: Mapping[Tuple[int, int], Rational]) -> "BivariatePolynomial":
        return cls(tuple(coeffs.items()))

    @classmethod
    def monomial(cls, i: int, j: int, coefficient: Rational = 1) -> "BivariatePolynomial":
        return cls((((i, j), as_fraction(coefficient)),))

    @classmethod
    def shifted(cls, q: Polynomial, a: Rational, b: Rational) -> "BivariatePolynomial":
        """q(ax + by) expanded into monomials."""
        a, b = as_fraction(a), as_fraction(b)
        terms = []
        for k, c in enumerate(q.coeffs):
            for j in range(k + 1):
                terms.append(((j, k - j), c * comb(k, j) * a ** j * b ** (k - j)))
        return cls(tuple(terms))

    @property
    def degree(self) -> int:
        return max((i + j for (i, j), _ in self.terms), default=-1)

    def items(self) -> Iterable[Tuple[Tuple[int, int], Fraction]]:
        return iter(self.terms)

    def __add__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        return BivariatePolynomial(self.terms + other.terms)

    def __call__(self, x: Rational, y: Rational) -> Fraction:
        x, y = as_fraction(x), as_fraction(y)
        return sum((c * x ** i * y ** j for (i, j), c in self.terms), Fraction(0))

    def mixed_derivative(self, dx: int, dy: int) -> "BivariatePolynomial":
        """d^dx/dx^dx d^dy/dy^dy."""
        terms = []
        for (i, j), c in self.terms:
            if i >= dx and j >= dy:
                factor = factorial(i) // factorial(i - dx) * (factorial(j) // factorial(j - dy))
                terms.append(((i - dx, j - dy), c * factor))
        return BivariatePolynomial(tuple(terms))


# Moment tables

class CcmEntry(BaseModel):
    nmu: int
    nnu: int
    value: str


class CcmDocument(BaseModel):
    order: int
    entries: List[CcmEntry]


def _format_value(value: Value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return f"{value:.17g}"


def _parse_value(text: str) -> Value:
    try:
        if "/" in text or text.lstrip("-").isdigit():
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as e:
        raise MeasureError(f"invalid table value {text!r}") from e


@dataclass(frozen=True)
class CcmMoments:
    """m~(t_mu^i t_nu^j) for 0 <= i, j <= order."""

    order: int
    entries: Tuple[Tuple[Tuple[int, int], Value], ...]

    def __post_init__(self):
        keys = {key for key, _ in self.entries}
        expected = {(i, j) for i in range(self.order + 1) for j in range(self.order + 1)}
        if keys != expected:
            raise DomainError(f"table of order {self.order} must hold all {len(expected)} entries")
        if any(isinstance(v, float) and not np.isfinite(v) for _, v in self.entries):
            raise DomainError("table entries must be finite")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for _, v in self.entries)

    def __getitem__(self, key: Tuple[int, int]) -> Value:
        return dict(self.entries)[key]

    def as_dict(self) -> Dict[Tuple[int, int], Value]:
        return dict(self.entries)

    def to_json(self) -> str:
        document = {
            "order": self.order,
            "entries": [{"nmu": i, "nnu": j, "value": _format_value(v)} for (i, j), v in self.entries],
        }
        return json.dumps(document, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "CcmMoments":
        try:
            document = CcmDocument.model_validate_json(text)
        except ValidationError as e:
            raise MeasureError(f"invalid comparison-moment document: {e.errors()[0]['msg']}") from e
        entries = tuple(((e.nmu, e.nnu), _parse_value(e.value)) for e in document.entries)
        return cls(document.order, tuple(sorted(entries)))


def ccm_apply(moments: CcmMoments, p: BivariatePolynomial) -> Value:
    """Linear pairing of a moment table with a polynomial."""
    if p.degree > 2 * moments.order:
        raise DomainError(f"polynomial of degree {p.degree} exceeds table order {moments.order}")
    table = moments.as_dict()
    total: Value = Fraction(0)
    for (i, j), c in p.items():
        if (i, j) not in table:
            raise DomainError(f"monomial x^{i} y^{j} beyond table order {moments.order}")
        total += c * table[(i, j)] if isinstance(table[(i, j)], Fraction) else float(c) * table[(i, j)]
    return total


# Positivity of a moment table on a box

Box = Tuple[float, float, float, float]


def _exponents(degree: int) -> List[Tuple[int, int]]:
    return [(i, total - i) for total in range(degree + 1) for i in range(total, -1, -1)]


def localized_moment_matrices(moments: CcmMoments, box: Box, degree: int = 3) -> Dict[str, np.ndarray]:
    """Moment matrix of the table and its localizing matrices for box = (lo_mu, hi_mu, lo_nu, hi_nu).

    Rows and columns run over monomials of total degree <= degree (degree - 1
    for the localizing matrices, which use (t - lo)(hi - t) in one variable).
    """
    if degree < 1 or 2 * degree > moments.order:
        raise DomainError(f"localizing degree must lie in [1, order / 2], got {degree} for order {moments.order}")
    table = {key: float(value) for key, value in moments.entries}

    def hankel(shift: Callable[[int, int], float], d: int) -> np.ndarray:
        basis = _exponents(d)
        return np.array([[shift(a[0] + b[0], a[1] + b[1]) for b in basis] for a in basis])

    def localized(axis: int, lo: float, hi: float) -> Callable[[int, int], float]:
        step = (1, 0) if axis == 0 else (0, 1)

        def entry(i: int, j: int) -> float:
            return (
                -table[(i + 2 * step[0], j + 2 * step[1])]
                + (lo + hi) * table[(i + step[0], j + step[1])]
                - lo * hi * table[(i, j)]
            )
        return entry

    lo_mu, hi_mu, lo_nu, hi_nu = box
    return {
        "moment": hankel(lambda i, j: table[(i, j)], degree),
        "mu": hankel(localized(0, lo_mu, hi_mu), degree - 1),
        "nu": hankel(localized(1, lo_nu, hi_nu), degree - 1),
    }


def is_moment_table_positive(moments: CcmMoments, box: Box, degree: int = 3, rtol: float = 1e-10) -> bool:
    """True when every localized moment matrix is positive semidefinite up to rtol * max |entry|."""
    for name, matrix in localized_moment_matrices(moments, box, degree).items():
        scale = float(np.max(np.abs(matrix)))
        smallest = float(np.linalg.eigvalsh(matrix)[0])
        if smallest < -rtol * scale:
            logger.debug("%s matrix has eigenvalue %.3g (scale %.3g)", name, smallest, scale)
            return False
    return True


# I_l functionals

def i_functional(mu: AtomicMeasure, l: int, n: int) -> Fraction:
    """I_l^mu(t^n); zero whenever l > n."""
    if l > n:
        return Fraction(0)
    M = MomentVector.of_measure(mu, n + 2)
    prefactor = factorial(n) * reciprocal_factorial(n + l + 3) * reciprocal_factorial(n - l)
    total = Fraction(0)
    for k in range(1, l + 3):
        total += (
            (-1) ** (k - 1)
            * factorial(n - k + 2)
            * reciprocal_factorial(k)
            * factorial(l + k)
            * reciprocal_factorial(l - k + 2)
            * partial_sum_M(M, n + 2, k)
        )
    return prefactor * total


def gegenbauer_basis(l_max: int):
    """b -> (C_0(2b-1), ..., C_lmax(2b-1)) in floats, each normalized to 1 at b = 1."""
    def basis(bs: np.ndarray) -> np.ndarray:
        x = 2.0 * np.asarray(bs, dtype=float) - 1.0
        return np.stack(
            [eval_gegenbauer(l, 1.5, x) * 2.0 / ((l + 1) * (l + 2)) for l in range(l_max + 1)],
            axis=-1,
        )
    return basis


def i_functional_spectral_table(mu: AtomicMeasure, l_max: int, n_max: int, tol: float) -> np.ndarray:
    """[n, l] -> integral of a^n C_l(2b - 1) omega_mu over the support box."""
    embedding = embed_measure(mu)
    return integrate_omega(embedding.A, embedding.B, monomial_basis(n_max), gegenbauer_basis(l_max), tol)


def i_functional_spectral(mu: AtomicMeasure, l: int, n: int, tol: float) -> float:
    return float(i_functional_spectral_table(mu, l, n, tol)[n, l])


# m~ on monomials

def ccm_moment_series(mu: AtomicMeasure, nu: AtomicMeasure, n_mu: int, n_nu: int) -> Fraction:
    """sum_{l <= min(n_mu, n_nu)} (-1)^l (2l + 3) I_l^mu(t^n_mu) I_l^nu(t^n_nu)."""
    if mu.is_point_mass or nu.is_point_mass:
        return Fraction(0)
    return sum(
        ((-1) ** l * (2 * l + 3) * i_functional(mu, l, n_mu) * i_functional(nu, l, n_nu)
         for l in range(min(n_mu, n_nu) + 1)),
        Fraction(0),
    )


def ccm_moment_via_cumulant_difference(mu: AtomicMeasure, nu: AtomicMeasure, n_mu: int, n_nu: int) -> Fraction:
    """The same entry from products of K tables of free cumulants."""
    if mu.is_point_mass or nu.is_point_mass:
        return Fraction(0)
    N_mu, N_nu = n_mu + 2, n_nu + 2
    K_mu = cumulants_from_moments(MomentVector.of_measure(mu, N_mu))
    K_nu = cumulants_from_moments(MomentVector.of_measure(nu, N_nu))
    total = Fraction(0)
    for k_mu in range(1, N_mu + 1):
        row_mu = partial_sum_K(K_mu, N_mu, k_mu)
        if row_mu == 0:
            continue
        for k_nu in range(1, N_nu + 1):
            row_nu = partial_sum_K(K_nu, N_nu, k_nu)
            if row_nu == 0:
                continue
            bracket = (
                reciprocal_factorial(N_mu - k_mu + 1) * reciprocal_factorial(N_nu - k_nu + 1)
                - reciprocal_factorial(N_mu - k_mu + N_nu - k_nu + 1)
            )
            weight = Fraction(factorial(n_mu) * factorial(n_nu), factorial(k_mu) * factorial(k_nu))
            total += weight * bracket * row_mu * row_nu
    return total


def ccm_moments(
    mu: AtomicMeasure, nu: AtomicMeasure, order: int, route: str = "series", tol: float = 1e-8,
    threads: int = 1,
) -> CcmMoments:
    """Full table up to order in each variable by the selected route."""
    if route not in ROUTES:
        raise DomainError(f"unknown route {route!r}, expected one of {ROUTES}")
    if order < 0:
        raise DomainError(f"order must be natural, got {order}")
    keys = [(i, j) for i in range(order + 1) for j in range(order + 1)]
    if mu.is_point_mass or nu.is_point_mass:
        return CcmMoments(order, tuple((key, Fraction(0)) for key in keys))
    if route == "series":
        values = {key: ccm_moment_series(mu, nu, *key) for key in keys}
    elif route == "cumulant":
        values = {key: ccm_moment_via_cumulant_difference(mu, nu, *key) for key in keys}
    elif route == "spectral":
        I_mu = i_functional_spectral_table(mu, order, order, tol)
        I_nu = i_functional_spectral_table(nu, order, order, tol)
        signs = np.array([(-1) ** l * (2 * l + 3) for l in range(order + 1)], dtype=float)
        values = {
            (i, j): float(np.sum(signs[: min(i, j) + 1] * I_mu[i, : min(i, j) + 1] * I_nu[j, : min(i, j) + 1]))
            for i, j in keys
        }
    else:
        table = ccm_moments_quadrature(mu, nu, order, tol, threads)
        values = {key: float(table[key]) for key in keys}
    logger.info("comparison moments of order %d by %s route", order, route)
    return CcmMoments(order, tuple((key, values[key]) for key in keys))


# Gaps between classical and free convolution

def convolution_gap(mu: AtomicMeasure, nu: AtomicMeasure, a: Rational, b: Rational, p: Polynomial) -> Fraction:
    """((a mu * b nu)(p) - (a mu boxplus b nu)(p)) / (a^2 b^2)."""
    a, b = as_fraction(a), as_fraction(b)
    if a == 0 or b == 0:
        raise DomainError("scales a and b must be non-zero")
    if p.degree < 0:
        return Fraction(0)
    scaled_mu, scaled_nu = scale(mu, a), scale(nu, b)
    classical = expectation_poly(classical_convolve(scaled_mu, scaled_nu), p)
    free_moments = free_convolve_moments(scaled_mu, scaled_nu, max(p.degree, 1))
    free = sum((c * free_moments[k] for k, c in enumerate(p.coeffs)), Fraction(0))
    return (classical - free) / (a * a * b * b)


def apply_ccm_to_shifted_poly(mu: AtomicMeasure, nu: AtomicMeasure, a: Rational, b: Rational, p: Polynomial) -> Fraction:
    """m~((x, y) -> p''''(ax + by)) from the exact table."""
    a, b = as_fraction(a), as_fraction(b)
    if a == 0 or b == 0:
        raise DomainError("scales a and b must be non-zero")
    shifted = BivariatePolynomial.shifted(p.derivative(4), a, b)
    if shifted.degree < 0:
        return Fraction(0)
    return ccm_apply(ccm_moments(mu, nu, shifted.degree), shifted)


def symmetric_lift_gap(mu: AtomicMeasure, nu: AtomicMeasure, p: BivariatePolynomial) -> Fraction:
    """Independent minus free expectation of the symmetric lift of p(a, b)."""
    free_rows: Dict[int, List[Fraction]] = {}
    total = Fraction(0)
    for (i, j), c in p.items():
        n = i + j
        if n not in free_rows:
            free_rows[n] = mixed_free_symmetric_moments(mu, nu, n)
        total += c * (moment(mu, i) * moment(nu, j) - free_rows[n][i])
    return total


def iterated_gap(measures: Sequence[AtomicMeasure], p: Polynomial) -> Fraction:
    """Classical minus free convolution of the whole family, integrated against p."""
    if not measures:
        raise DomainError("empty family of measures")
    classical = expectation_poly(reduce(classical_convolve, measures), p)
    free_moments = free_convolve_many(measures, max(p.degree, 1))
    free = sum((c * free_moments[k] for k, c in enumerate(p.coeffs)), Fraction(0))
    return classical - free


def leading_order_functional(mu: AtomicMeasure, p: Polynomial) -> Fraction:
    """E p''(X) - E [X, X']_{p'} for independent copies X, X' of mu."""
    first = expectation_poly(mu, p.derivative(2))
    slope = p.derivative(1)
    second = Fraction(0)
    for x, w in mu.atoms:
        for y, v in mu.atoms:
            second += w * v * sum(
                (c * dd_power((x, y), k) for k, c in enumerate(slope.coeffs)), Fraction(0)
            )
    return first - second


# Density of m~

def _w_from_slices(slice_mu: OmegaSlice, slice_nu: OmegaSlice, tol: float) -> float:
    """Integral of min(1/((1-b)(1-b')), 1/(b b')) F_mu(b) F_nu(b') over [0,1]^2.

    Split along b + b' = 1, where the kernel factorizes on either side.
    """
    if slice_mu.is_empty or slice_nu.is_empty:
        return 0.0
    cuts = sorted({1.0 - x for x in slice_nu.breakpoints})

    def integrand(b: np.ndarray) -> np.ndarray:
        s = 1.0 - b
        # both cumulative integrals vanish where their divisor does
        near_one = np.divide(slice_nu.toward_one(s), s, out=np.zeros(b.shape), where=s > 0)
        near_zero = np.divide(slice_nu.toward_zero(s), b, out=np.zeros(b.shape), where=b > 0)
        return slice_mu(b) * (near_one + near_zero)

    total = 0.0
    for piece in slice_mu.pieces:
        bounds = [piece.lo, *merge_points(cuts, piece.lo, piece.hi), piece.hi]
        for lo, hi in zip(bounds, bounds[1:]):
            total += float(integrate_edges(integrand, lo, hi, tol)[0])
    return max(total, 0.0)


def w_density(mu: AtomicMeasure, nu: AtomicMeasure, t_mu: float, t_nu: float, tol: float) -> float:
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if mu.is_point_mass or nu.is_point_mass:
        return 0.0
    slice_mu = OmegaSlice(embed_measure(mu), t_mu, tol)
    slice_nu = OmegaSlice(embed_measure(nu), t_nu, tol)
    return _w_from_slices(slice_mu, slice_nu, tol)


def _slices(mu: AtomicMeasure, nodes: np.ndarray, tol: float, threads: int) -> List[OmegaSlice]:
    embedding = embed_measure(mu)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: OmegaSlice(embedding, t, tol), nodes))


def _w_matrix(slices_mu: List[OmegaSlice], slices_nu: List[OmegaSlice], tol: float, threads: int) -> np.ndarray:
    def row(slice_mu: OmegaSlice) -> List[float]:
        return [_w_from_slices(slice_mu, slice_nu, tol) for slice_nu in slices_nu]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(row, slices_mu)), dtype=float).reshape(len(slices_mu), len(slices_nu))


def ccm_density_grid(
    mu: AtomicMeasure, nu: AtomicMeasure, na: int, nb: int, tol: float, threads: int = 1
) -> DensityGrid:
    """w sampled on a uniform na x nb grid over the product of support hulls."""
    if na < 2 or nb < 2:
        raise DomainError(f"grid counts must be at least 2, got {na}x{nb}")
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    hull_mu, hull_nu = support_interval(mu), support_interval(nu)
    box = (*grid_axis(float(hull_mu.lo), float(hull_mu.hi)), *grid_axis(float(hull_nu.lo), float(hull_nu.hi)))
    labels = ("t_mu", "t_nu", "w")
    if mu.is_point_mass or nu.is_point_mass:
        return DensityGrid(*box, np.zeros((na, nb)), labels=labels)
    t_mu = np.linspace(box[0], box[1], na)
    t_nu = np.linspace(box[2], box[3], nb)
    values = _w_matrix(_slices(mu, t_mu, tol, threads), _slices(nu, t_nu, tol, threads), tol, threads)
    logger.info("sampled w on a %dx%d grid", na, nb)
    return DensityGrid(*box, values, labels=labels)


def _axis_rule(mu: AtomicMeasure, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Edge-softened nodes on each piece of the hull between the critical points."""
    hull = support_interval(mu)
    bounds = [float(hull.lo), *embed_measure(mu).critical_points(), float(hull.hi)]
    rules = [softened_rule(lo, hi, order) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
    return np.concatenate([r[0] for r in rules]), np.concatenate([r[1] for r in rules])


def ccm_moments_quadrature(
    mu: AtomicMeasure, nu: AtomicMeasure, order: int, tol: float, threads: int = 1
) -> np.ndarray:
    """[i, j] -> integral of t_mu^i t_nu^j w over the support box, doubling the rule until stable."""
    if mu.is_point_mass or nu.is_point_mass:
        return np.zeros((order + 1, order + 1))
    previous = None
    gap = float("inf")
    for n in QUADRATURE_ORDERS:
        x_mu, w_mu = _axis_rule(mu, n)
        x_nu, w_nu = _axis_rule(nu, n)
        W = _w_matrix(_slices(mu, x_mu, tol, threads), _slices(nu, x_nu, tol, threads), tol, threads)
        V_mu = w_mu[:, None] * np.power.outer(x_mu, np.arange(order + 1))
        V_nu = w_nu[:, None] * np.power.outer(x_nu, np.arange(order + 1))
        current = V_mu.T @ W @ V_nu
        if previous is not None:
            gap = float(np.max(np.abs(current - previous)))
            logger.debug("w moments at order %d: gap %.3g", n, gap)
            if gap <= tol:
                return current
        previous = current
    raise QuadratureError(
        f"w moments did not settle by order {QUADRATURE_ORDERS[-1]}", estimate=previous, gap=gap
    )


# Kernel of the density in the Gegenbauer basis

def gegenbauer_kernel_coefficient(k_mu: int, k_nu: int) -> Fraction:
    """Integral of g(b, b') C_k(2b-1) C_k'(2b'-1) b(1-b) b'(1-b') over [0,1]^2, exactly.

    With g = min(1/((1-b)(1-b')), 1/(b b')) the weighted kernel is b b' below
    the anti-diagonal and (1-b)(1-b') above it.
    """
    shift = Polynomial.from_coefficients((-1, 2))
    t = Polynomial.monomial(1)
    P = t * gegenbauer_c32_polynomial(k_mu).compose(shift)
    Q = t * gegenbauer_c32_polynomial(k_nu).compose(shift)
    below = _triangle_integral(P, Q)
    # b -> 1 - b maps the upper triangle onto the lower one and C_k(2b-1) to (-1)^k C_k(2b-1)
    above = (-1) ** (k_mu + k_nu) * below
    return below + above


def gegenbauer_kernel_quadrature(k_mu: int, k_nu: int, order: int = 32) -> float:
    """The same coefficient by tensor Gauss-Legendre on either side of b + b' = 1."""
    xi, wi = gauss_legendre(order)
    b, wb = 0.5 * (xi + 1.0), 0.5 * wi
    C = lambda k, x: eval_gegenbauer(k, 1.5, 2.0 * x - 1.0) * 2.0 / ((k + 1) * (k + 2))
    total = 0.0
    for below in (True, False):
        lo = np.zeros_like(b) if below else 1.0 - b
        hi = 1.0 - b if below else np.ones_like(b)
        half = 0.5 * (hi - lo)
        bp = 0.5 * (hi + lo)[:, None] + half[:, None] * xi[None, :]
        kernel = b[:, None] * bp if below else (1.0 - b)[:, None] * (1.0 - bp)
        values = kernel * C(k_mu, b)[:, None] * C(k_nu, bp)
        total += float(np.sum(wb[:, None] * half[:, None] * wi[None, :] * values))
    return total


def _triangle_integral(P: Polynomial, Q: Polynomial) -> Fraction:
    """Integral of P(x) Q(y) over x, y >= 0, x + y <= 1."""
    return sum(
        (p * q * Fraction(factorial(i) * factorial(j), factorial(i + j + 2))
         for i, p in enumerate(P.coeffs) for j, q in enumerate(Q.coeffs)),
        Fraction(0),
    )


def expected_kernel_coefficient(k_mu: int, k_nu: int) -> Fraction:
    """Diagonal coefficient (2k+3)(-1)^k times the squared weighted norm of C_k(2b-1)."""
    if k_mu != k_nu:
        return Fraction(0)
    k = k_mu
    norm = Fraction(1, (2 * k + 3) * (k + 1) * (k + 2))
    return (2 * k + 3) * (-1) ** k * norm * norm
