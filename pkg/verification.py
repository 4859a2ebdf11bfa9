"""
Verification - seeded checks of the exact identities, the spectral oracle and
the comparison measure, run by `freeconv_cli.py verify`.

Each suite is a list of (name, tag, check); a check takes a numpy Generator
and returns (passed, detail). Identical seeds give identical reports.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import pi
from typing import Callable, Dict, List, Tuple

import numpy as np

from ccm import (
    BivariatePolynomial,
    apply_ccm_to_shifted_poly,
    ccm_apply,
    ccm_density_grid,
    ccm_moment_series,
    ccm_moment_via_cumulant_difference,
    ccm_moments,
    convolution_gap,
    expected_kernel_coefficient,
    gegenbauer_kernel_coefficient,
    gegenbauer_kernel_quadrature,
    i_functional,
    i_functional_spectral_table,
    is_moment_table_positive,
    iterated_gap,
    leading_order_functional,
    symmetric_lift_gap,
)
from errors import FreeConvError
from measures import AtomicMeasure, classical_convolve, make_measure, moments, point_mass, scale, support_interval, variance
from momentcalc import (
    CumulantVector,
    FormalSeries,
    MomentVector,
    cumulants_from_moments,
    free_convolve_many,
    free_convolve_moments,
    km_transform,
    lagrange_inversion_check,
    mk_transform,
    moments_from_cumulants,
    nc_moments_oracle,
    partial_sum_K,
    partial_sum_M,
)
from spectral import (
    HermitianMatrix,
    commutator_norm,
    embed_measure,
    omega_density,
    omega_embedding_moment,
    omega_quadrature_moments,
    omega_trace_moment,
    omega_values,
    pair_counts,
)
from specialfn import (
    Polynomial,
    chu_vandermonde_rhs,
    dd_power,
    divided_difference,
    divided_difference_recursive,
    gegenbauer_c32,
    gegenbauer_c32_polynomial,
    gegenbauer_c32_recurrence,
    gegenbauer_generating_coefficients,
    gegenbauer_norm,
    hyp2f1_terminating,
    hyp3f2_saalschutz,
    identity_lemma_sum,
    reciprocal_factorial,
    saalschutz_rhs,
)

logger = logging.getLogger(__name__)

Check = Callable[[np.random.Generator], Tuple[bool, str]]

INSTANCES = 100
PAIRS = 20
SPECTRAL_TOL = 1e-6
GRID_SIZE = 64

OMEGA_CONSTANT = Fraction(1, 6)
OMEGA_CONSTANT_NOTE = (
    "integral of omega_{A,B} = (1/6)(tr A^2B^2 - tr ABAB), "
    "resolved from the k = l = 0 case of the trace-moment formula"
)


@dataclass
class CheckResult:
    name: str
    tag: str
    passed: bool
    detail: str

    def __str__(self) -> str:
        status = "✅ PASS" if self.passed else "❌ FAIL"
        return f"{status} [{self.tag}] {self.name}: {self.detail}"


# Random inputs

def random_fraction(rng: np.random.Generator, span: int = 6, denominator: int = 7) -> Fraction:
    """Non-integer rational in (-span, span) with the given denominator."""
    while True:
        value = Fraction(int(rng.integers(-span * denominator, span * denominator + 1)), denominator)
        if value.denominator != 1:
            return value


def random_measure(rng: np.random.Generator, max_atoms: int = 5) -> AtomicMeasure:
    """2..max_atoms distinct atoms on the quarter-grid of [-2, 2], weights 1..5 normalized."""
    count = int(rng.integers(2, max_atoms + 1))
    cells = rng.choice(17, size=count, replace=False)
    weights = rng.integers(1, 6, size=count)
    return make_measure((Fraction(int(c) - 8, 4), int(w)) for c, w in zip(cells, weights))


def random_positive_measure(rng: np.random.Generator, max_atoms: int = 4) -> AtomicMeasure:
    count = int(rng.integers(2, max_atoms + 1))
    cells = rng.choice(8, size=count, replace=False)
    weights = rng.integers(1, 6, size=count)
    return make_measure((Fraction(int(c) + 1, 4), int(w)) for c, w in zip(cells, weights))


def random_hermitian(rng: np.random.Generator, dim: int) -> HermitianMatrix:
    """Gaussian Hermitian matrix scaled so the spectrum stays near [-2, 2]."""
    M = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianMatrix(M / np.sqrt(2.0 * dim))


def random_commuting_pair(rng: np.random.Generator, dim: int) -> Tuple[HermitianMatrix, HermitianMatrix]:
    Q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    x, y = rng.uniform(-2, 2, size=dim), rng.uniform(-2, 2, size=dim)
    return HermitianMatrix(Q @ np.diag(x) @ Q.conj().T), HermitianMatrix(Q @ np.diag(y) @ Q.conj().T)


def bernoulli() -> AtomicMeasure:
    return make_measure([(-1, 1), (1, 1)])


def _all(results: List[bool], what: str) -> Tuple[bool, str]:
    return all(results), f"{sum(results)}/{len(results)} {what}"


# Identities

def check_chu_vandermonde(rng):
    results = []
    for _ in range(INSTANCES):
        a = random_fraction(rng)
        c = random_fraction(rng, denominator=5)
        n = int(rng.integers(0, 9))
        results.append(hyp2f1_terminating(a, n, c) == chu_vandermonde_rhs(a, n, c))
    return _all(results, "instances exact")


def check_saalschutz(rng):
    results = []
    for _ in range(INSTANCES):
        a, b = random_fraction(rng), random_fraction(rng)
        c = random_fraction(rng, denominator=5)
        n = int(rng.integers(0, 8))
        results.append(hyp3f2_saalschutz(a, b, n, c) == saalschutz_rhs(a, b, n, c))
    return _all(results, "instances exact")


def check_alternating_sum(rng):
    results = []
    for _ in range(INSTANCES):
        n1, n2 = (int(v) for v in rng.integers(0, 12, size=2))
        results.append(identity_lemma_sum(n1, n2) == reciprocal_factorial(n1 + n2 + 1))
    return _all(results, "instances exact")


def check_gegenbauer_forms(rng):
    results = []
    for _ in range(INSTANCES):
        k = int(rng.integers(0, 10))
        x = random_fraction(rng, span=1, denominator=9)
        value = gegenbauer_c32(k, x)
        results.append(value == gegenbauer_c32_recurrence(k, x) == gegenbauer_c32_polynomial(k)(x))
    return _all(results, "points agree across the three forms")


def check_gegenbauer_orthogonality(rng):
    weight = Polynomial.from_coefficients((1, 0, -1))
    results = []
    for k in range(8):
        for j in range(8):
            integral = (gegenbauer_c32_polynomial(k) * gegenbauer_c32_polynomial(j) * weight).integrate(-1, 1)
            results.append(integral == (gegenbauer_norm(k) if k == j else 0))
    return _all(results, "inner products exact")


def check_gegenbauer_generating(rng):
    results = []
    for _ in range(INSTANCES // 4):
        x = random_fraction(rng, span=1, denominator=5)
        coefficients = gegenbauer_generating_coefficients(x, 8)
        results.append(all(
            c == Fraction((k + 1) * (k + 2), 2) * gegenbauer_c32(k, x) for k, c in enumerate(coefficients)
        ))
    return _all(results, "series exact to order 8")


def check_divided_differences(rng):
    results = []
    for _ in range(INSTANCES):
        count = int(rng.integers(1, 6))
        nodes = [Fraction(int(c) - 10, 3) for c in rng.choice(21, size=count, replace=False)]
        n = int(rng.integers(0, 9))
        values = [x ** n for x in nodes]
        explicit = divided_difference(nodes, values)
        results.append(explicit == divided_difference_recursive(nodes, values) == dd_power(nodes, n))
    return _all(results, "node sets agree")


def check_moment_cumulant_round_trip(rng):
    results = []
    for _ in range(INSTANCES // 2):
        m = MomentVector.of_measure(random_measure(rng), 10)
        kappa = cumulants_from_moments(m)
        n = int(rng.integers(1, 11))
        k = int(rng.integers(1, n + 1))
        results.append(
            moments_from_cumulants(kappa) == m
            and km_transform(m, n, k) == partial_sum_K(kappa, n, k)
            and mk_transform(kappa, n, k) == partial_sum_M(m, n, k)
        )
    return _all(results, "round trips exact")


def check_bernoulli_cumulants(rng):
    kappa = cumulants_from_moments(MomentVector.of_measure(bernoulli(), 8))
    expected = CumulantVector((0, 1, 0, -1, 0, 2, 0, -5))
    return kappa == expected, f"kappa = {kappa}"


def check_non_crossing_oracle(rng):
    results = []
    for _ in range(10):
        m = MomentVector.of_measure(random_measure(rng), 8)
        results.append(nc_moments_oracle(cumulants_from_moments(m)) == m)
    return _all(results, "measures match the partition sum")


def check_lagrange_inversion(rng):
    results = []
    for _ in range(INSTANCES):
        tail = [random_fraction(rng, span=2, denominator=3) for _ in range(6)]
        f = FormalSeries((Fraction(0), Fraction(int(rng.integers(1, 4)))) + tuple(tail))
        k = int(rng.integers(1, f.order + 1))
        n = int(rng.integers(1, k + 1))
        lhs, rhs = lagrange_inversion_check(f, n, k)
        results.append(lhs == rhs)
    return _all(results, "coefficient pairs exact")


IDENTITY_SUITE: List[Tuple[str, str, Check]] = [
    ("Chu-Vandermonde summation", "hypergeometric", check_chu_vandermonde),
    ("Saalschutz summation", "hypergeometric", check_saalschutz),
    ("Alternating Gegenbauer-weight sum", "hypergeometric", check_alternating_sum),
    ("Gegenbauer closed forms", "gegenbauer", check_gegenbauer_forms),
    ("Gegenbauer orthogonality", "gegenbauer", check_gegenbauer_orthogonality),
    ("Gegenbauer generating function", "gegenbauer", check_gegenbauer_generating),
    ("Divided differences of powers", "divided-difference", check_divided_differences),
    ("Moment-cumulant round trips", "cumulants", check_moment_cumulant_round_trip),
    ("Bernoulli free cumulants", "cumulants", check_bernoulli_cumulants),
    ("Non-crossing partition oracle", "cumulants", check_non_crossing_oracle),
    ("Lagrange inversion coefficients", "series", check_lagrange_inversion),
]


# Spectral

def check_omega_constant(rng):
    results = []
    for _ in range(PAIRS):
        dim = int(rng.integers(1, 5))
        A, B = random_hermitian(rng, dim), random_hermitian(rng, dim)
        a, b = A.entries, B.entries
        closed = float(OMEGA_CONSTANT) * float(np.real(np.trace(a @ a @ b @ b) - np.trace(a @ b @ a @ b)))
        results.append(abs(omega_trace_moment(A, B, 0, 0) - closed) <= 1e-9 * max(1.0, abs(closed)))
    ok, detail = _all(results, "pairs")
    return ok, f"{detail}; {OMEGA_CONSTANT_NOTE}"


def check_trace_vs_quadrature(rng):
    worst = 0.0
    for _ in range(PAIRS):
        dim = int(rng.integers(1, 5))
        A, B = random_hermitian(rng, dim), random_hermitian(rng, dim)
        table = omega_quadrature_moments(A, B, 3, 3, SPECTRAL_TOL)
        for k in range(4):
            for l in range(4):
                worst = max(worst, abs(table[k, l] - omega_trace_moment(A, B, k, l)))
    return worst <= 1e-5, f"max deviation {worst:.2e}"


def check_embedding_moments(rng):
    worst = 0.0
    for _ in range(5):
        mu = random_measure(rng)
        embedding = embed_measure(mu)
        for k in range(4):
            for l in range(4):
                exact = float(omega_embedding_moment(mu, k, l))
                worst = max(worst, abs(exact - omega_trace_moment(embedding.A, embedding.B, k, l)))
    return worst <= 1e-9, f"max deviation {worst:.2e}"


def check_i_functional_spectral(rng):
    worst = 0.0
    for _ in range(5):
        mu = random_measure(rng, max_atoms=4)
        table = i_functional_spectral_table(mu, 3, 4, SPECTRAL_TOL)
        for n in range(5):
            for l in range(4):
                worst = max(worst, abs(table[n, l] - float(i_functional(mu, l, n))))
    return worst <= 1e-5, f"max deviation {worst:.2e}"


def check_pair_count_and_bound(rng):
    results = []
    for _ in range(10):
        mu = random_measure(rng)
        embedding = embed_measure(mu)
        hull = support_interval(mu)
        bound = float(hull.length) / pi
        a = rng.uniform(float(hull.lo), float(hull.hi), size=1000)
        b = rng.uniform(0.0, 1.0, size=1000)
        count_ok = pair_counts(embedding.A, embedding.B, a, b) <= 1
        density_ok = omega_values(embedding.A, embedding.B, a, b) <= bound * (1 + 1e-9)
        results.extend((count_ok & density_ok).tolist())
    return _all(results, "points within bounds")


def check_commuting_pairs(rng):
    results = []
    for commuting in (True, False):
        for _ in range(PAIRS // 2):
            dim = int(rng.integers(2, 5))
            if commuting:
                A, B = random_commuting_pair(rng, dim)
            else:
                A, B = random_hermitian(rng, dim), random_hermitian(rng, dim)
            (a_lo, a_hi), (b_lo, b_hi) = A.hull, B.hull
            a, b = rng.uniform(a_lo, a_hi, size=1000), rng.uniform(b_lo, b_hi, size=1000)
            vanishes = bool(np.max(omega_values(A, B, a, b)) <= 1e-12)
            results.append(vanishes == (commutator_norm(A, B) <= 1e-12))
    return _all(results, "pairs where omega vanishes exactly when A and B commute")


def check_bernoulli_density(rng):
    embedding = embed_measure(bernoulli())
    value = omega_density(embedding.A, embedding.B, 0.0, 0.5)
    return abs(value - 1 / (2 * pi)) <= 1e-12, f"omega(0, 1/2) = {value:.15f}"


SPECTRAL_SUITE: List[Tuple[str, str, Check]] = [
    ("Total mass of omega", "spectral", check_omega_constant),
    ("Trace moments vs quadrature", "spectral", check_trace_vs_quadrature),
    ("Embedding moments exact", "spectral", check_embedding_moments),
    ("I functional by quadrature", "spectral", check_i_functional_spectral),
    ("Pair count and density bound", "spectral", check_pair_count_and_bound),
    ("Omega vanishes only for commuting pairs", "spectral", check_commuting_pairs),
    ("Bernoulli density at the centre", "spectral", check_bernoulli_density),
]


# Comparison measure

def check_even_moment_ordering(rng):
    results = []
    for _ in range(50):
        mu, nu = random_measure(rng), random_measure(rng)
        classical = moments(classical_convolve(mu, nu), 16)
        free = free_convolve_moments(mu, nu, 16)
        results.append(all(classical[2 * k - 1] >= free[2 * k] for k in range(1, 9)))
    return _all(results, "pairs ordered to m_16")


def check_fourth_moment_gap(rng):
    results = []
    for _ in range(50):
        mu, nu = random_measure(rng), random_measure(rng)
        gap = moments(classical_convolve(mu, nu), 4)[3] - free_convolve_moments(mu, nu, 4)[4]
        results.append(gap == 2 * variance(mu) * variance(nu))
    return _all(results, "pairs exact")


def check_total_mass(rng):
    results = []
    for _ in range(50):
        mu, nu = random_measure(rng), random_measure(rng)
        results.append(ccm_moment_series(mu, nu, 0, 0) == variance(mu) * variance(nu) / 12)
    return _all(results, "pairs exact")


def check_three_routes(rng):
    results = []
    scales = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2))
    for _ in range(PAIRS):
        mu, nu = random_measure(rng, max_atoms=4), random_measure(rng, max_atoms=4)
        entries_ok = all(
            ccm_moment_series(mu, nu, i, j) == ccm_moment_via_cumulant_difference(mu, nu, i, j)
            for i in range(6) for j in range(6) if i + j <= 10
        )
        p = Polynomial.from_coefficients(int(c) for c in rng.integers(-3, 4, size=13))
        a, b = scales[int(rng.integers(0, 5))], scales[int(rng.integers(0, 5))]
        gap_ok = apply_ccm_to_shifted_poly(mu, nu, a, b, p) == convolution_gap(mu, nu, a, b, p)
        results.append(entries_ok and gap_ok)
    return _all(results, "pairs agree exactly")


def check_symmetric_lift(rng):
    lift = BivariatePolynomial.monomial(2, 2)
    mu = bernoulli()
    value = symmetric_lift_gap(mu, mu, lift)
    table = ccm_moments(mu, mu, 0)
    paired = ccm_apply(table, lift.mixed_derivative(2, 2))
    return value == paired == Fraction(1, 3), f"gap {value}, m~(4) {paired}"


def check_leading_order(rng):
    results = []
    sixth = Polynomial.monomial(6)
    for _ in range(5):
        mu, nu = random_positive_measure(rng), random_positive_measure(rng)
        fourth = leading_order_functional(mu, Polynomial.monomial(4)) == 4 * variance(mu)
        limit = variance(nu) / 2 * leading_order_functional(mu, sixth)
        # convolution_gap already divides by eps^2
        residuals = [
            convolution_gap(mu, nu, 1, eps, sixth) - limit for eps in (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))
        ]
        halving = residuals[-1] > 0 and all(r >= 2 * s for r, s in zip(residuals, residuals[1:]))
        results.append(fourth and halving)
    return _all(results, "pairs with the expected leading term")


def check_iterated(rng):
    results = []
    for _ in range(10):
        family = [random_measure(rng, max_atoms=3) for _ in range(3)]
        for k in range(1, 7):
            results.append(iterated_gap(family, Polynomial.monomial(2 * k)) >= 0)
    return _all(results, "even moments dominate")


def check_kernel_coefficients(rng):
    results = []
    for i in range(6):
        for j in range(6):
            exact = gegenbauer_kernel_coefficient(i, j)
            quadrature = gegenbauer_kernel_quadrature(i, j)
            results.append(exact == expected_kernel_coefficient(i, j) and abs(quadrature - float(exact)) <= 1e-12)
    return _all(results, "coefficients exact and matched by quadrature")


def check_grid_mass(rng):
    worst = 0.0
    for _ in range(5):
        mu, nu = random_measure(rng, max_atoms=4), random_measure(rng, max_atoms=4)
        grid = ccm_density_grid(mu, nu, GRID_SIZE, GRID_SIZE, SPECTRAL_TOL)
        mass = float(variance(mu) * variance(nu) / 12)
        worst = max(worst, abs(grid.integrate() - mass) / mass)
    return worst <= 1e-3, f"max relative deviation {worst:.2e} on {GRID_SIZE}x{GRID_SIZE} grids"


def check_positivity(rng):
    results = []
    for _ in range(5):
        mu, nu = random_measure(rng, max_atoms=3), random_measure(rng, max_atoms=3)
        hull_mu, hull_nu = support_interval(mu), support_interval(nu)
        box = (float(hull_mu.lo), float(hull_mu.hi), float(hull_nu.lo), float(hull_nu.hi))
        results.append(is_moment_table_positive(ccm_moments(mu, nu, 6), box))
    return _all(results, "tables with positive semidefinite localized matrices")


def check_point_mass(rng):
    mu = random_measure(rng)
    table = ccm_moments(point_mass(random_fraction(rng)), mu, 3)
    scaled = ccm_moments(scale(mu, 0), mu, 3)
    vanishing = all(v == 0 for _, v in table.entries) and all(v == 0 for _, v in scaled.entries)
    return vanishing, "all entries zero" if vanishing else "non-zero entry"


def check_free_family(rng):
    family = [random_measure(rng, max_atoms=3) for _ in range(3)]
    pairwise = free_convolve_moments(family[0], family[1], 6)
    kappa = cumulants_from_moments(pairwise) + cumulants_from_moments(MomentVector.of_measure(family[2], 6))
    ok = moments_from_cumulants(kappa) == free_convolve_many(family, 6)
    return ok, "associative to order 6"


CCM_SUITE: List[Tuple[str, str, Check]] = [
    ("Even moments of classical dominate free", "ordering", check_even_moment_ordering),
    ("Fourth moment gap", "ordering", check_fourth_moment_gap),
    ("Total mass Var Var / 12", "ccm", check_total_mass),
    ("Series, cumulant and gap routes", "ccm", check_three_routes),
    ("Symmetric lift of x^2 y^2", "ccm", check_symmetric_lift),
    ("Leading order for small scale", "ccm", check_leading_order),
    ("Three-fold convolutions", "ordering", check_iterated),
    ("Gegenbauer kernel coefficients", "ccm", check_kernel_coefficients),
    ("Positivity on the support box", "ccm", check_positivity),
    ("Grid mass of w", "ccm", check_grid_mass),
    ("Vanishing for point masses", "ccm", check_point_mass),
    ("Free convolution of a family", "ordering", check_free_family),
]

SUITES: Dict[str, List[Tuple[str, str, Check]]] = {
    "identities": IDENTITY_SUITE,
    "spectral": SPECTRAL_SUITE,
    "ccm": CCM_SUITE,
}


def run_suite(name: str, seed: int) -> List[CheckResult]:
    """Run one suite, or every suite for name 'all'; failures never stop the run."""
    if name == "all":
        return [result for suite in SUITES for result in run_suite(suite, seed)]
    if name not in SUITES:
        raise FreeConvError(f"unknown suite {name!r}, expected one of {sorted(SUITES)} or 'all'")
    results = []
    for index, (check_name, tag, check) in enumerate(SUITES[name]):
        rng = np.random.default_rng([seed, index])
        logger.info("running %s / %s", name, check_name)
        try:
            passed, detail = check(rng)
        except FreeConvError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        except Exception as e:
            passed, detail = False, f"exception {type(e).__name__}: {e}"
        results.append(CheckResult(check_name, tag, bool(passed), detail))
    return results


def format_report(results: List[CheckResult]) -> str:
    passed = sum(r.passed for r in results)
    lines = [str(r) for r in results]
    lines += ["", "=" * 60, "📋 SUMMARY", "=" * 60, f"Result: {passed}/{len(results)} checks passed"]
    return "\n".join(lines)
