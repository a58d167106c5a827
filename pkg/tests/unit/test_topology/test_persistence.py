"""
Unit tests for Vietoris-Rips persistence.
"""
import io
import math

import numpy as np
import pytest

from tests.oracles import brute_force_diagram, random_symmetric_matrix
from ties.topology.diagram_metric import bottleneck
from ties.topology.geometry import DistanceMatrix
from ties.topology.persistence import (
    PersistenceDiagram,
    diagram_from_string,
    enclosing_radius,
    mst_deaths,
    read_diagram_csv,
    remove_dimension,
    rips_persistence,
    write_diagram_csv,
)
from ties.utils.errors import ContractViolation, TooFewDimensionsError

TRIANGLE = [[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]]


def as_triples(diagram: PersistenceDiagram):
    return sorted((p.hdim, p.birth, p.death) for p in diagram.points)


def assert_same_bars(actual, expected, tolerance=1e-9):
    assert len(actual) == len(expected)
    for (h1, b1, d1), (h2, b2, d2) in zip(actual, expected):
        assert h1 == h2
        assert b1 == pytest.approx(b2, abs=tolerance)
        if math.isinf(d2):
            assert math.isinf(d1)
        else:
            assert d1 == pytest.approx(d2, abs=tolerance)


class TestRipsPersistence:
    """Test cases for rips_persistence."""

    def test_single_point(self):
        diagram = rips_persistence(DistanceMatrix(np.zeros((1, 1))))
        assert as_triples(diagram) == [(0, 0.0, math.inf)]

    def test_three_points(self):
        diagram = rips_persistence(DistanceMatrix(np.array(TRIANGLE)))
        assert diagram.finite(0)[:, 1].tolist() == [1.0, 2.0]
        assert len(diagram.essential(0)) == 1
        assert diagram.select(1) == []

    def test_square_loop(self, square_phi):
        diagram = rips_persistence(DistanceMatrix(square_phi))
        assert diagram.finite(1).tolist() == [[1.0, math.sqrt(2.0)]]
        assert diagram.finite(0).shape == (3, 2)

    def test_max_hdim_zero_has_no_loops(self, square_phi):
        assert rips_persistence(DistanceMatrix(square_phi), max_hdim=0).select(1) == []

    def test_invalid_input(self):
        with pytest.raises(ContractViolation):
            rips_persistence(DistanceMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]])))
        with pytest.raises(ContractViolation):
            rips_persistence(DistanceMatrix(np.zeros((2, 2))), max_hdim=2)

    def test_betti_numbers(self, square_phi):
        diagram = rips_persistence(DistanceMatrix(square_phi))
        assert diagram.betti(0, 0.5) == 4
        assert diagram.betti(0, 1.0) == 1
        assert diagram.betti(1, 1.2) == 1
        assert diagram.betti(1, 1.5) == 0

    def test_enclosing_radius(self, square_phi):
        assert enclosing_radius(DistanceMatrix(square_phi)) == pytest.approx(math.sqrt(2.0))

    @pytest.mark.slow
    def test_matches_full_boundary_reduction(self):
        """200 random matrices with n ≤ 7 against the unoptimised reduction."""
        rng = np.random.default_rng(1)
        for _ in range(200):
            values = random_symmetric_matrix(rng, int(rng.integers(1, 8)))
            engine = as_triples(rips_persistence(DistanceMatrix(values), max_hdim=1))
            assert_same_bars(engine, brute_force_diagram(values, max_hdim=1))

    @pytest.mark.slow
    def test_h0_equals_minimum_spanning_tree(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            phi = DistanceMatrix(random_symmetric_matrix(rng, int(rng.integers(2, 65))))
            deaths = sorted(rips_persistence(phi, max_hdim=0).finite(0)[:, 1].tolist())
            assert deaths == mst_deaths(phi)

    @pytest.mark.parametrize("transform", [lambda v: v * v, lambda v: 2.0 * v])
    def test_monotone_reparameterization(self, rng, transform):
        for _ in range(20):
            values = random_symmetric_matrix(rng, int(rng.integers(3, 10)))
            original = as_triples(rips_persistence(DistanceMatrix(values)))
            mapped = as_triples(rips_persistence(DistanceMatrix(transform(values))))
            expected = sorted((h, transform(b), transform(d) if math.isfinite(d) else d) for h, b, d in original)
            assert_same_bars(mapped, expected, tolerance=1e-12)

    def test_stability_under_perturbation(self, rng):
        epsilon = 1e-3
        for _ in range(20):
            n = int(rng.integers(3, 17))
            values = random_symmetric_matrix(rng, n)
            noise = np.triu(rng.uniform(-epsilon, epsilon, size=(n, n)), k=1)
            perturbed = values + noise + noise.T
            a = rips_persistence(DistanceMatrix(values))
            b = rips_persistence(DistanceMatrix(perturbed))
            for hdim in (0, 1):
                assert bottleneck(a, b, hdim) <= epsilon + 1e-12


class TestMstDeaths:
    def test_triangle(self):
        assert mst_deaths(DistanceMatrix(np.array(TRIANGLE))) == [1.0, 2.0]

    def test_two_points(self):
        assert mst_deaths(DistanceMatrix(np.array([[0.0, 0.7], [0.7, 0.0]]))) == [0.7]

    def test_equal_weights(self):
        values = np.full((5, 5), 0.4)
        np.fill_diagonal(values, 0.0)
        assert mst_deaths(DistanceMatrix(values)) == [0.4] * 4


class TestRemoveDimension:
    """Test cases for remove_dimension."""

    def test_submatrix(self):
        phi = DistanceMatrix(np.array([[11.0, 12.0, 13.0], [21.0, 22.0, 23.0], [31.0, 32.0, 33.0]]))
        reduced = remove_dimension(phi, 2)
        assert reduced.values.tolist() == [[11.0, 13.0], [31.0, 33.0]]
        assert reduced.dim_labels == (1, 3)
        assert reduced.removed == 2

    def test_labels_follow_repeated_removal(self):
        values = np.ones((5, 5)) - np.eye(5)
        reduced = remove_dimension(remove_dimension(DistanceMatrix(values), 4), 1)
        assert reduced.dim_labels == (2, 3, 5)

    def test_constant_matrix_stays_constant(self):
        values = np.full((4, 4), 0.3)
        np.fill_diagonal(values, 0.0)
        reduced = remove_dimension(DistanceMatrix(values), 3)
        off_diagonal = reduced.values[~np.eye(3, dtype=bool)]
        assert np.all(off_diagonal == 0.3)

    def test_too_few_dimensions(self):
        with pytest.raises(TooFewDimensionsError):
            remove_dimension(DistanceMatrix(np.zeros((2, 2))), 1)

    def test_unknown_label(self):
        with pytest.raises(ContractViolation):
            remove_dimension(DistanceMatrix(np.zeros((3, 3))), 7)


class TestDiagramCsv:
    def test_layout(self):
        buffer = io.StringIO()
        write_diagram_csv(rips_persistence(DistanceMatrix(np.array(TRIANGLE))), buffer)
        assert buffer.getvalue().splitlines() == ["hdim,birth,death", "0,0.0,1.0", "0,0.0,2.0", "0,0.0,inf"]

    def test_read_back(self, tmp_path, square_phi):
        diagram = rips_persistence(DistanceMatrix(square_phi))
        path = tmp_path / "d.csv"
        write_diagram_csv(diagram, path)
        assert read_diagram_csv(path).points == diagram.points

    def test_header_optional(self):
        diagram = diagram_from_string("1,0.5,0.75\n0,0,inf\n")
        assert as_triples(diagram) == [(0, 0.0, math.inf), (1, 0.5, 0.75)]

    def test_malformed_row(self):
        with pytest.raises(ContractViolation):
            diagram_from_string("0,1\n")
