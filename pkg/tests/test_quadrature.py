"""Tests for the edge-softened Gauss-Legendre rules and adaptive panels."""

import numpy as np
import pytest

from errors import QuadratureError
from quadrature import adaptive_panels, gauss_legendre, integrate_edges, integrate_softened, softened_rule


class TestRules:
    def test_gauss_legendre_is_exact_for_polynomials(self):
        nodes, weights = gauss_legendre(5)
        assert weights @ nodes ** 8 == pytest.approx(2 / 9, abs=1e-14)
        assert weights.sum() == pytest.approx(2.0, abs=1e-14)

    def test_nodes_are_read_only(self):
        nodes, _ = gauss_legendre(4)
        with pytest.raises(ValueError):
            nodes[0] = 0.0

    def test_softened_rule_handles_square_root_edges(self):
        nodes, weights = softened_rule(0.0, 1.0, 16)
        assert np.all((nodes > 0) & (nodes < 1))
        assert weights @ np.sqrt(nodes * (1 - nodes)) == pytest.approx(np.pi / 8, abs=1e-12)


class TestIntegrateSoftened:
    def test_vector_valued(self):
        result = integrate_softened(lambda x: np.stack([np.ones_like(x), x], axis=-1), 0.0, 2.0, 1e-12)
        assert result == pytest.approx([2.0, 2.0], abs=1e-12)

    def test_semicircle(self):
        result = integrate_softened(lambda x: np.sqrt(4 - x ** 2) / (2 * np.pi), -2.0, 2.0, 1e-12)
        assert result[0] == pytest.approx(1.0, abs=1e-12)

    def test_empty_interval(self):
        result = integrate_softened(lambda x: np.stack([x, x], axis=-1), 1.0, 1.0, 1e-8)
        assert result.shape == (2,)
        assert np.all(result == 0)

    def test_stalls_on_a_jump(self):
        with pytest.raises(QuadratureError) as info:
            integrate_softened(lambda x: np.sign(x - 0.3), 0.0, 1.0, 1e-14, max_order=64)
        assert info.value.estimate is not None
        assert info.value.gap > 1e-14


class TestAdaptivePanels:
    def test_kink(self):
        result = adaptive_panels(lambda x: np.abs(x - 1 / 3), 0.0, 1.0, 1e-10)
        assert result[0] == pytest.approx(5 / 18, abs=1e-9)

    def test_columns(self):
        result = adaptive_panels(lambda x: np.stack([np.sin(x), np.cos(x)], axis=-1), 0.0, np.pi, 1e-12)
        assert result == pytest.approx([2.0, 0.0], abs=1e-10)

    def test_budget_exhausted(self):
        with pytest.raises(QuadratureError, match="budget"):
            adaptive_panels(lambda x: np.where(x < 0.3, 0.0, 1.0), 0.0, 1.0, 1e-15, max_panels=64)


class TestIntegrateEdges:
    def test_smooth_matches_softened(self):
        f = lambda x: np.sqrt(4 - x ** 2) / (2 * np.pi)
        assert integrate_edges(f, -2.0, 2.0, 1e-12) == pytest.approx(integrate_softened(f, -2.0, 2.0, 1e-12), abs=1e-13)

    def test_interior_jump_falls_back_to_panels(self):
        cut = 0.3
        exact = np.pi / 4 - (cut * np.sqrt(1 - cut ** 2) + np.arcsin(cut)) / 2
        result = integrate_edges(lambda x: np.sqrt(1 - x ** 2) * (x > cut), 0.0, 1.0, 1e-9)
        assert result[0] == pytest.approx(exact, abs=1e-8)

    def test_empty_interval(self):
        assert np.all(integrate_edges(lambda x: x, 2.0, 2.0, 1e-8) == 0)

    def test_budget_still_applies(self):
        with pytest.raises(QuadratureError, match="budget"):
            integrate_edges(lambda x: np.where(x < 0.3, 0.0, 1.0), 0.0, 1.0, 1e-15, max_panels=64)
