"""
Unit tests for Wasserstein and bottleneck distances between diagrams.
"""
import math

import numpy as np
import pytest

from tests.oracles import brute_force_matching, random_diagram
from ties.topology.diagram_metric import DiagramMetric, MetricName, bottleneck, wasserstein
from ties.topology.persistence import PersistenceDiagram, PersistencePoint
from ties.utils.errors import ContractViolation

EMPTY = np.zeros((0, 2))


class TestWasserstein:
    """Test cases for wasserstein."""

    def test_identity(self, rng):
        diagram = random_diagram(rng, 8)
        assert wasserstein(diagram, diagram, q=1) == 0.0
        assert wasserstein(diagram, diagram, q=2) == 0.0

    def test_single_point_against_empty(self):
        assert wasserstein(np.array([[0.0, 2.0]]), EMPTY) == 1.0

    def test_direct_match_beats_diagonal(self):
        assert wasserstein(np.array([[0.0, 2.0]]), np.array([[0.0, 1.0]])) == 1.0

    def test_both_empty(self):
        assert wasserstein(EMPTY, EMPTY) == 0.0

    def test_q2(self):
        a = np.array([[0.0, 2.0], [0.0, 4.0]])
        assert wasserstein(a, EMPTY, q=2) == pytest.approx(math.sqrt(1.0 + 4.0))

    def test_rejects_infinite_bars(self):
        with pytest.raises(ContractViolation):
            wasserstein(np.array([[0.0, np.inf]]), EMPTY)

    def test_diagram_input_strips_essential_and_filters_dimension(self):
        a = PersistenceDiagram((PersistencePoint(0.0, 2.0, 0), PersistencePoint(0.0, math.inf, 0),
                                PersistencePoint(1.0, 5.0, 1)))
        b = PersistenceDiagram((PersistencePoint(0.0, math.inf, 0),))
        assert wasserstein(a, b, hdim=0) == 1.0
        assert wasserstein(a, b, hdim=1) == 2.0

    def test_scale_equivariance(self, rng):
        for _ in range(50):
            a, b = random_diagram(rng, 6), random_diagram(rng, 6)
            alpha = float(rng.uniform(0.1, 5.0))
            for q in (1, 2):
                assert wasserstein(alpha * a, alpha * b, q=q) == pytest.approx(alpha * wasserstein(a, b, q=q),
                                                                               rel=1e-9, abs=1e-12)


class TestBottleneck:
    """Test cases for bottleneck."""

    def test_identity(self, rng):
        diagram = random_diagram(rng, 8)
        assert bottleneck(diagram, diagram) == 0.0

    def test_single_point_against_empty(self):
        assert bottleneck(np.array([[0.0, 2.0]]), EMPTY) == 1.0

    def test_two_against_one(self):
        assert bottleneck(np.array([[0.0, 2.0], [0.0, 4.0]]), np.array([[0.0, 4.0]])) == 1.0


class TestOracleAgreement:
    """Solvers against exhaustive enumeration of partial matchings."""

    @pytest.mark.slow
    def test_against_enumeration(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            a, b = random_diagram(rng, 5), random_diagram(rng, 5)
            assert wasserstein(a, b, q=1) == pytest.approx(brute_force_matching(a, b, q=1), abs=1e-9)
            assert wasserstein(a, b, q=2) == pytest.approx(brute_force_matching(a, b, q=2), abs=1e-9)
            assert bottleneck(a, b) == pytest.approx(brute_force_matching(a, b, bottleneck=True), abs=1e-9)


class TestMetricProperties:
    @pytest.mark.slow
    @pytest.mark.parametrize("name", list(MetricName))
    def test_symmetry(self, name):
        metric = DiagramMetric(name)
        rng = np.random.default_rng(4)
        for _ in range(1000):
            a, b = random_diagram(rng, 12), random_diagram(rng, 12)
            assert metric(a, b, 0) == pytest.approx(metric(b, a, 0), abs=1e-9)

    @pytest.mark.parametrize("name", list(MetricName))
    def test_triangle_inequality(self, name):
        metric = DiagramMetric(name)
        rng = np.random.default_rng(5)
        for _ in range(200):
            a, b, c = (random_diagram(rng, 12) for _ in range(3))
            assert metric(a, c, 0) <= metric(a, b, 0) + metric(b, c, 0) + 1e-9

    def test_metric_names(self):
        assert DiagramMetric().name is MetricName.W1
        assert DiagramMetric("w2").order == 2
        assert DiagramMetric("bottleneck")(np.array([[0.0, 2.0]]), EMPTY, 0) == 1.0
