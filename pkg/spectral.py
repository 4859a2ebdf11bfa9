"""
Spectral - the eigenvalue density omega_{A,B} of a Hermitian pair

omega_{A,B}(a, b) = (1/2pi) sum_i |Im lambda_i((A - aI)(B - bI))|

together with its exact trace-moment formula, the diagonal embedding of an
atomic measure, quadrature of omega and the DensityGrid sampling format.
Matrices live in double precision; exact rationals stop at embed_measure.
"""

import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy.linalg
from numpy.polynomial import Chebyshev
from scipy.integrate import trapezoid

from errors import DomainError, EigenSolverError, QuadratureError
from measures import AtomicMeasure
from momentcalc import MomentVector, compositions, partial_sum_M
from quadrature import adaptive_panels, integrate_edges

logger = logging.getLogger(__name__)

NONREAL_THRESHOLD = 1e-9
TRACE_MOMENT_CAP = 10
SCAN_POINTS = 129
BISECTION_STEPS = 52
CHEBYSHEV_DEGREES = (16, 32, 64, 128, 256)
MERGE_RTOL = 1e-9

Basis = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Conjugate-symmetric d x d matrix; the constructor replaces M by (M + M*)/2."""

    entries: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DomainError(f"expected a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix entries must be finite")
        arr = 0.5 * (arr + arr.conj().T)
        if not np.any(arr.imag):
            arr = arr.real.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        eigenvalues = scipy.linalg.eigvalsh(arr)
        eigenvalues.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eigenvalues)

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def hull(self) -> Tuple[float, float]:
        return float(self.eigenvalues[0]), float(self.eigenvalues[-1])

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


@dataclass(frozen=True, eq=False)
class MeasureEmbedding:
    """A Hermitian and v a unit vector with <A^k v, v> = m_k(mu)."""

    A: HermitianMatrix
    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=complex if np.iscomplexobj(self.v) else float)
        if v.shape != (self.A.dim,):
            raise DomainError(f"vector of shape {v.shape} does not match dimension {self.A.dim}")
        if not np.isclose(np.linalg.norm(v), 1.0, rtol=0, atol=1e-12):
            raise DomainError("embedding vector must have unit norm")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def B(self) -> HermitianMatrix:
        return HermitianMatrix(np.outer(self.v, self.v.conj()))

    def moment(self, k: int) -> float:
        Akv = np.linalg.matrix_power(self.A.entries, k) @ self.v
        return float(np.real(np.vdot(self.v, Akv)))

    def critical_points(self) -> Tuple[float, ...]:
        """Interior a where the b-support of omega(a, .) reaches b = 0 or b = 1.

        These are the mean <Av, v> and the eigenvalues of A compressed to v-perp.
        """
        lo, hi = self.A.hull
        points = [self.moment(1)]
        if self.A.dim > 1:
            Q = scipy.linalg.null_space(self.v.conj()[None, :])
            points.extend(float(x) for x in scipy.linalg.eigvalsh(Q.conj().T @ self.A.entries @ Q))
        return merge_points(points, lo, hi)


def merge_points(points: Sequence[float], lo: float, hi: float) -> Tuple[float, ...]:
    """Sorted points strictly inside (lo, hi), with clusters closer than MERGE_RTOL * (hi - lo) merged."""
    eps = MERGE_RTOL * max(hi - lo, 1.0)
    merged: List[float] = []
    for x in sorted(points):
        if x <= lo + eps or x >= hi - eps:
            continue
        if merged and x - merged[-1] <= eps:
            continue
        merged.append(x)
    return tuple(merged)


def embed_measure(mu: AtomicMeasure) -> MeasureEmbedding:
    """A = diag(x_i), v_i = sqrt(p_i)."""
    A = HermitianMatrix.diagonal([float(x) for x in mu.locations])
    v = np.sqrt(np.array([float(p) for p in mu.weights]))
    v = v / np.linalg.norm(v)
    return MeasureEmbedding(A, v)


def general_eigenvalues(M: np.ndarray) -> np.ndarray:
    """All eigenvalues of a dense square matrix, with multiplicity."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DomainError(f"expected a non-empty square matrix, got shape {M.shape}")
    try:
        return scipy.linalg.eigvals(M, check_finite=True)
    except ValueError as e:
        raise DomainError(f"matrix entries must be finite: {e}") from e
    except np.linalg.LinAlgError as e:
        raise EigenSolverError(f"eigenvalue iteration failed to converge for {M.shape} matrix: {e}") from e


def _product_eigenvalues(A: HermitianMatrix, B: HermitianMatrix, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Eigenvalues of (A - a_j I)(B - b_j I) for every j, shape (n, d)."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    a, b = np.broadcast_arrays(a, b)
    Am, Bm = A.entries, B.entries
    eye = np.eye(A.dim)
    stack = (
        (Am @ Bm)[None, :, :]
        - a[:, None, None] * Bm[None, :, :]
        - b[:, None, None] * Am[None, :, :]
        + (a * b)[:, None, None] * eye[None, :, :]
    )
    try:
        return np.linalg.eigvals(stack)
    except np.linalg.LinAlgError as e:
        raise EigenSolverError(f"batched eigenvalue iteration failed: {e}") from e


def _inside(A: HermitianMatrix, B: HermitianMatrix, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a_lo, a_hi = A.hull
    b_lo, b_hi = B.hull
    return (a >= a_lo) & (a <= a_hi) & (b >= b_lo) & (b <= b_hi)


def omega_values(A: HermitianMatrix, B: HermitianMatrix, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized omega_{A,B} over paired arrays of a and b."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape)
    mask = _inside(A, B, a, b)
    if mask.any():
        eigs = _product_eigenvalues(A, B, a[mask], b[mask])
        out[mask] = np.abs(eigs.imag).sum(axis=1) / (2.0 * np.pi)
    return out


def omega_density(A: HermitianMatrix, B: HermitianMatrix, a: float, b: float) -> float:
    return float(omega_values(A, B, np.array([a]), np.array([b]))[0])


def _threshold(A: HermitianMatrix, B: HermitianMatrix) -> float:
    return NONREAL_THRESHOLD * (1.0 + A.norm * B.norm)


def pair_counts(A: HermitianMatrix, B: HermitianMatrix, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Number of conjugate pairs of non-real eigenvalues at each (a_j, b_j)."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape, dtype=int)
    mask = _inside(A, B, a, b)
    if mask.any():
        eigs = _product_eigenvalues(A, B, a[mask], b[mask])
        out[mask] = (np.abs(eigs.imag) > _threshold(A, B)).sum(axis=1) // 2
    return out


def nonreal_pair_count(embedding: MeasureEmbedding, a: float, b: float) -> int:
    return int(pair_counts(embedding.A, embedding.B, np.array([a]), np.array([b]))[0])


def commutator_norm(A: HermitianMatrix, B: HermitianMatrix) -> float:
    C = A.entries @ B.entries - B.entries @ A.entries
    return float(np.linalg.norm(C, 2))


# Trace-moment formula

def omega_trace_moment(A: HermitianMatrix, B: HermitianMatrix, k: int, l: int, cap: int = TRACE_MOMENT_CAP) -> float:
    """Integral of a^k b^l omega_{A,B} through traces of words in A and B."""
    if k < 0 or l < 0:
        raise DomainError(f"moment indices must be natural, got ({k}, {l})")
    if max(k, l) > cap:
        raise DomainError(f"trace-moment order ({k}, {l}) exceeds cap {cap}")
    A_pow = [np.linalg.matrix_power(A.entries, i) for i in range(k + 3)]
    B_pow = [np.linalg.matrix_power(B.entries, j) for j in range(l + 3)]
    total = 0.0
    for n in range(1, min(k, l) + 3):
        words = 0.0 + 0.0j
        for ic in compositions(k + 2, n):
            for jc in compositions(l + 2, n):
                product = np.eye(A.dim)
                for i, j in zip(ic, jc):
                    product = product @ A_pow[i] @ B_pow[j]
                words += np.trace(product)
        total += (-1) ** (n - 1) * words.real / comb(k + l + 1, n - 1)
    return total / ((k + l + 2) * (k + l + 3))


def omega_embedding_moment(mu: AtomicMeasure, k: int, l: int) -> Fraction:
    """Exact integral of a^k b^l omega for the embedding of mu (B = vv*)."""
    M = MomentVector.of_measure(mu, k + 2)
    total = Fraction(0)
    for n in range(1, k + 3):
        total += (-1) ** (n - 1) * Fraction(comb(l + 1, n - 1), comb(k + l + 1, n - 1)) * partial_sum_M(M, k + 2, n)
    return total / ((k + l + 2) * (k + l + 3))


# Pieces of a line on which omega is positive

def positive_pieces(count: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> List[Tuple[float, float]]:
    """Sub-intervals of [lo, hi] between pair-count changes on which the count is positive."""
    if hi <= lo:
        return []
    xs = np.linspace(lo, hi, SCAN_POINTS)
    counts = count(xs)
    idx = np.nonzero(counts[1:] != counts[:-1])[0]
    points = []
    if idx.size:
        left, right, base = xs[idx].copy(), xs[idx + 1].copy(), counts[idx]
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (left + right)
            same = count(mid) == base
            left = np.where(same, mid, left)
            right = np.where(same, right, mid)
        points = list(0.5 * (left + right))
    bounds = [lo] + sorted(points) + [hi]
    spans = [(p, q) for p, q in zip(bounds, bounds[1:]) if q > p]
    if not spans:
        return []
    mids = np.array([0.5 * (p + q) for p, q in spans])
    positive = count(mids) > 0
    return [span for span, keep in zip(spans, positive) if keep]


# Quadrature of omega

def integrate_omega(A: HermitianMatrix, B: HermitianMatrix, a_basis: Basis, b_basis: Basis, tol: float) -> np.ndarray:
    """Table of integrals of phi_i(a) psi_j(b) omega_{A,B}(a, b) over the support box.

    Inner integrals over a follow the pieces where a conjugate pair exists,
    cut again at the eigenvalues of A; each sub-piece gets integrate_edges.
    The outer integral over b runs on theta with b = c - r cos(theta) and
    adaptive panels.
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    a_lo, a_hi = A.hull
    b_lo, b_hi = B.hull
    ka = np.asarray(a_basis(np.array([a_lo]))).reshape(1, -1).shape[1]
    kb = np.asarray(b_basis(np.array([b_lo]))).reshape(1, -1).shape[1]
    if a_hi <= a_lo or b_hi <= b_lo or commutator_norm(A, B) <= 1e-14 * (1.0 + A.norm * B.norm):
        return np.zeros((ka, kb))
    b_bound = max(1.0, float(np.max(np.abs(b_basis(np.array([b_lo, b_hi]))))))
    inner_tol = tol / (4.0 * (b_hi - b_lo) * b_bound)

    kinks = A.eigenvalues

    def slice_integral(b: float) -> np.ndarray:
        total = np.zeros(ka)
        count = lambda xs: pair_counts(A, B, xs, np.full(xs.shape, b))
        integrand = lambda xs: (
            omega_values(A, B, xs, np.full(xs.shape, b))[:, None] * np.asarray(a_basis(xs)).reshape(xs.size, ka)
        )
        for p, q in positive_pieces(count, a_lo, a_hi):
            bounds = [p, *merge_points(kinks, p, q), q]
            for lo, hi in zip(bounds, bounds[1:]):
                total += integrate_edges(integrand, lo, hi, inner_tol)
        return total

    centre, radius = 0.5 * (b_lo + b_hi), 0.5 * (b_hi - b_lo)

    def outer(thetas: np.ndarray) -> np.ndarray:
        bs = centre - radius * np.cos(thetas)
        jac = radius * np.sin(thetas)
        psi = np.asarray(b_basis(bs)).reshape(bs.size, kb)
        rows = np.array([slice_integral(b) for b in bs])
        return (rows[:, :, None] * psi[:, None, :] * jac[:, None, None]).reshape(bs.size, ka * kb)

    result = adaptive_panels(outer, 0.0, np.pi, tol)
    return result.reshape(ka, kb)


def monomial_basis(degree: int) -> Basis:
    return lambda xs: np.power.outer(np.asarray(xs, dtype=float), np.arange(degree + 1))


def omega_quadrature_moments(A: HermitianMatrix, B: HermitianMatrix, k_max: int, l_max: int, tol: float) -> np.ndarray:
    return integrate_omega(A, B, monomial_basis(k_max), monomial_basis(l_max), tol)


def omega_quadrature_moment(A: HermitianMatrix, B: HermitianMatrix, k: int, l: int, tol: float) -> float:
    return float(omega_quadrature_moments(A, B, k, l, tol)[k, l])


# omega of an embedding along a fixed a = t, as a function of b

def _fit_chebyshev(fun: Callable[[np.ndarray], np.ndarray], tol: float) -> Chebyshev:
    """Chebyshev interpolant on [0, pi] whose trailing coefficients fall below tol."""
    for degree in CHEBYSHEV_DEGREES:
        series = Chebyshev.interpolate(fun, degree, domain=[0.0, np.pi])
        if np.max(np.abs(series.coef[-3:])) <= tol:
            return series
    raise QuadratureError(
        f"Chebyshev fit did not settle by degree {CHEBYSHEV_DEGREES[-1]}",
        estimate=None,
        gap=float(np.max(np.abs(series.coef[-3:]))),
    )


@dataclass(frozen=True, eq=False)
class _SlicePiece:
    lo: float
    hi: float
    values: Chebyshev
    toward_one: Chebyshev
    toward_zero: Chebyshev

    def theta(self, b: np.ndarray) -> np.ndarray:
        centre, radius = 0.5 * (self.lo + self.hi), 0.5 * (self.hi - self.lo)
        return np.arccos(np.clip((centre - b) / radius, -1.0, 1.0))


class OmegaSlice:
    """F(b) = omega_{A,vv*}(t, b) on [0, 1] for one fixed t.

    Keeps F as piecewise Chebyshev series in theta between pair-count changes,
    plus the cumulative integrals of F/(1 - b) from 0 and of F/b up to 1.
    """

    def __init__(self, embedding: MeasureEmbedding, t: float, tol: float):
        self.t = float(t)
        self.pieces: List[_SlicePiece] = []
        A, B = embedding.A, embedding.B
        a_lo, a_hi = A.hull
        if not (a_lo < self.t < a_hi):
            return
        count = lambda bs: pair_counts(A, B, np.full(bs.shape, self.t), bs)
        fit_tol = 1e-2 * tol
        for lo, hi in positive_pieces(count, 0.0, 1.0):
            centre, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)
            b_of = lambda th, c=centre, r=radius: c - r * np.cos(th)
            values = _fit_chebyshev(
                lambda th, b_of=b_of: omega_values(A, B, np.full(th.shape, self.t), b_of(th)), fit_tol
            )
            jac = lambda th, r=radius: r * np.sin(th)
            degree = 2 * (len(values.coef) - 1)
            toward_one = Chebyshev.interpolate(
                lambda th: values(th) * jac(th) / (1.0 - b_of(th)), degree, domain=[0.0, np.pi]
            ).integ(lbnd=0.0)
            toward_zero = Chebyshev.interpolate(
                lambda th: values(th) * jac(th) / b_of(th), degree, domain=[0.0, np.pi]
            ).integ(lbnd=0.0)
            self.pieces.append(_SlicePiece(lo, hi, values, toward_one, toward_zero))
        logger.debug("slice at t=%.6g: %d pieces", self.t, len(self.pieces))

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def breakpoints(self) -> List[float]:
        return sorted({x for piece in self.pieces for x in (piece.lo, piece.hi)})

    def __call__(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        out = np.zeros(b.shape)
        for piece in self.pieces:
            inside = (b > piece.lo) & (b < piece.hi)
            if inside.any():
                out[inside] = piece.values(piece.theta(b[inside]))
        return out

    def _cumulative(self, s: np.ndarray, attr: str) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        for piece in self.pieces:
            antiderivative = getattr(piece, attr)
            out += np.where(s >= piece.hi, antiderivative(np.pi), 0.0)
            inside = (s > piece.lo) & (s < piece.hi)
            if inside.any():
                out[inside] += antiderivative(piece.theta(s[inside]))
        return out

    def toward_one(self, s: np.ndarray) -> np.ndarray:
        """Integral of F(b)/(1 - b) over [0, s]."""
        return self._cumulative(s, "toward_one")

    def toward_zero(self, s: np.ndarray) -> np.ndarray:
        """Integral of F(b)/b over [s, 1]."""
        total = sum(float(piece.toward_zero(np.pi)) for piece in self.pieces)
        return total - self._cumulative(s, "toward_zero")


# Sampled densities

@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Samples of a density on an na x nb uniform grid over a box."""

    a_lo: float
    a_hi: float
    b_lo: float
    b_hi: float
    values: np.ndarray
    labels: Tuple[str, str, str] = ("a", "b", "omega")

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or min(values.shape) < 2:
            raise DomainError(f"grid needs at least 2 x 2 samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DomainError("grid values must be finite and non-negative")
        if self.a_hi <= self.a_lo and self.b_hi <= self.b_lo:
            raise DomainError("a grid box needs at least one axis of positive length")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def a_nodes(self) -> np.ndarray:
        return np.linspace(self.a_lo, self.a_hi, self.shape[0])

    @property
    def b_nodes(self) -> np.ndarray:
        return np.linspace(self.b_lo, self.b_hi, self.shape[1])

    @property
    def spacing(self) -> Tuple[float, float]:
        return (
            (self.a_hi - self.a_lo) / (self.shape[0] - 1),
            (self.b_hi - self.b_lo) / (self.shape[1] - 1),
        )

    def integrate(self) -> float:
        """Trapezoid rule over both axes."""
        inner = trapezoid(self.values, self.b_nodes, axis=1)
        return float(trapezoid(inner, self.a_nodes))

    def to_frame(self) -> pd.DataFrame:
        na, nb = self.shape
        return pd.DataFrame({
            self.labels[0]: np.repeat(self.a_nodes, nb),
            self.labels[1]: np.tile(self.b_nodes, na),
            self.labels[2]: self.values.reshape(-1),
        })

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        text = self.to_frame().to_csv(index=False, float_format="%.17g", lineterminator="\n")
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source: Union[str, Path], labels: Optional[Tuple[str, str, str]] = None) -> "DensityGrid":
        """Read a grid written by to_csv (text or path); rows are a-major, b-fastest."""
        text = Path(source).read_text() if isinstance(source, Path) else source
        frame = pd.read_csv(io.StringIO(text), float_precision="round_trip")
        labels = labels or tuple(frame.columns)
        a_col, b_col, v_col = labels
        na, nb = frame[a_col].nunique(), frame[b_col].nunique()
        rows = len(frame)
        if na == 1 and nb > 1:
            na = rows // nb
        elif nb == 1 and na > 1:
            nb = rows // na
        if na * nb != rows:
            raise DomainError(f"cannot recover the grid shape from {rows} rows")
        values = frame[v_col].to_numpy().reshape(na, nb)
        a_col_values = frame[a_col].to_numpy()
        b_col_values = frame[b_col].to_numpy()
        return cls(
            float(a_col_values[0]), float(a_col_values[-1]), float(b_col_values[0]), float(b_col_values[-1]),
            values, labels=tuple(labels),
        )


def grid_axis(lo: float, hi: float) -> Tuple[float, float]:
    """The sampled range for a hull; a single point widens to a unit interval around it."""
    if hi > lo:
        return lo, hi
    return lo - 0.5, lo + 0.5


def omega_grid(A: HermitianMatrix, B: HermitianMatrix, na: int, nb: int) -> DensityGrid:
    """omega_{A,B} sampled on the support box."""
    if na < 2 or nb < 2:
        raise DomainError(f"grid counts must be at least 2, got {na}x{nb}")
    a_lo, a_hi = grid_axis(*A.hull)
    b_lo, b_hi = grid_axis(*B.hull)
    aa, bb = np.meshgrid(np.linspace(a_lo, a_hi, na), np.linspace(b_lo, b_hi, nb), indexing="ij")
    values = omega_values(A, B, aa.ravel(), bb.ravel()).reshape(na, nb)
    return DensityGrid(a_lo, a_hi, b_lo, b_hi, values)
