"""
Quadrature - Gauss-Legendre rules for densities with square-root edges

An interval [lo, hi] is mapped from theta in [0, pi] through
x = c - r cos(theta); a sqrt-type vanishing of the integrand at either end
becomes analytic in theta, so plain Gauss-Legendre in theta converges fast.
"""

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.special import roots_legendre

from errors import QuadratureError

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

MAX_SOFTENED_ORDER = 512
DEFAULT_PANEL_BUDGET = 4096
EDGE_SOFTENED_ORDER = 128


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    nodes, weights = roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def softened_rule(lo: float, hi: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the integral over [lo, hi] after x = c - r cos(theta)."""
    xi, wi = gauss_legendre(order)
    theta = 0.5 * np.pi * (xi + 1.0)
    centre, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)
    nodes = centre - radius * np.cos(theta)
    weights = 0.5 * np.pi * wi * radius * np.sin(theta)
    return nodes, weights


def _apply(f: Integrand, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    values = np.asarray(f(nodes), dtype=float)
    values = values.reshape(len(nodes), -1)
    return weights @ values


def integrate_softened(
    f: Integrand,
    lo: float,
    hi: float,
    tol: float,
    start_order: int = 16,
    max_order: int = MAX_SOFTENED_ORDER,
) -> np.ndarray:
    """Vector-valued integral over [lo, hi], doubling the order until two levels agree to tol.

    f maps an array of n abscissae to an (n,) or (n, m) array.
    """
    if hi <= lo:
        sample = np.asarray(f(np.array([lo], dtype=float)), dtype=float)
        return np.zeros(sample.reshape(1, -1).shape[1])
    order = start_order
    previous = _apply(f, *softened_rule(lo, hi, order))
    while True:
        order *= 2
        current = _apply(f, *softened_rule(lo, hi, order))
        gap = float(np.max(np.abs(current - previous)))
        if gap <= tol:
            return current
        if order >= max_order:
            raise QuadratureError(
                f"softened rule on [{lo:.6g}, {hi:.6g}] stalled at order {order} (gap {gap:.3g} > {tol:.3g})",
                estimate=current,
                gap=gap,
            )
        logger.debug("order %d on [%.6g, %.6g]: gap %.3g", order, lo, hi, gap)
        previous = current


def adaptive_panels(
    f: Integrand,
    lo: float,
    hi: float,
    tol: float,
    order: int = 10,
    initial_panels: int = 8,
    max_panels: int = DEFAULT_PANEL_BUDGET,
) -> np.ndarray:
    """Composite Gauss-Legendre with bisection of the panels carrying the largest gaps.

    Each leaf panel holds its one-panel estimate and the sum over its two
    halves; refinement stops when the halves-vs-whole gaps sum to at most tol.
    Every round evaluates f once, on all new nodes.
    """
    xi, wi = gauss_legendre(order)

    def rule(left: np.ndarray, right: np.ndarray) -> np.ndarray:
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        nodes = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
        values = np.asarray(f(nodes), dtype=float).reshape(len(left), order, -1)
        return np.einsum("j,pjm->pm", wi, values) * half[:, None]

    def refine(left: np.ndarray, right: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        mid = 0.5 * (left + right)
        halves = rule(np.concatenate([left, mid]), np.concatenate([mid, right]))
        return halves[: left.size], halves[left.size:]

    edges = np.linspace(lo, hi, initial_panels + 1)
    left, right = edges[:-1], edges[1:]
    coarse = rule(left, right)
    first, second = refine(left, right)
    used = left.size
    rounds = 0
    while True:
        refined = first + second
        gaps = np.max(np.abs(refined - coarse), axis=1)
        total_gap = float(gaps.sum())
        if total_gap <= tol:
            logger.debug("converged after %d rounds on %d panels (gap %.3g)", rounds, left.size, total_gap)
            return refined.sum(axis=0)
        split = gaps > tol / left.size
        if used + 2 * int(split.sum()) > max_panels:
            raise QuadratureError(
                f"panel budget {max_panels} exhausted on [{lo:.6g}, {hi:.6g}] (gap {total_gap:.3g} > {tol:.3g})",
                estimate=refined.sum(axis=0),
                gap=total_gap,
            )
        keep = ~split
        mid = 0.5 * (left[split] + right[split])
        child_left = np.concatenate([left[split], mid])
        child_right = np.concatenate([mid, right[split]])
        child_coarse = np.concatenate([first[split], second[split]])
        child_first, child_second = refine(child_left, child_right)
        left = np.concatenate([left[keep], child_left])
        right = np.concatenate([right[keep], child_right])
        coarse = np.concatenate([coarse[keep], child_coarse])
        first = np.concatenate([first[keep], child_first])
        second = np.concatenate([second[keep], child_second])
        used += child_left.size
        rounds += 1


def integrate_edges(
    f: Integrand,
    lo: float,
    hi: float,
    tol: float,
    max_panels: int = DEFAULT_PANEL_BUDGET,
) -> np.ndarray:
    """integrate_softened, falling back to adaptive panels in theta when the order stalls.

    Interior kinks and near-edge breakpoints stall the global rule; panels in
    theta keep the edge softening while localizing the refinement.
    """
    if hi <= lo:
        return integrate_softened(f, lo, hi, tol)
    try:
        return integrate_softened(f, lo, hi, tol, max_order=EDGE_SOFTENED_ORDER)
    except QuadratureError as e:
        logger.debug("falling back to theta panels: %s", e)
    centre, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def in_theta(theta: np.ndarray) -> np.ndarray:
        values = np.asarray(f(centre - radius * np.cos(theta)), dtype=float)
        values = values.reshape(len(theta), -1)
        return values * (radius * np.sin(theta))[:, None]

    return adaptive_panels(in_theta, 0.0, np.pi, tol, max_panels=max_panels)
