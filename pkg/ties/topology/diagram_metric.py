"""
TIES - Diagram Metric Module
Distances between persistence diagrams: exact q-Wasserstein and bottleneck,
both with the L∞ ground metric and free matching to the diagonal.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ties.topology.persistence import PersistenceDiagram
from ties.utils.errors import ContractViolation

DiagramLike = Union[PersistenceDiagram, np.ndarray]


class MetricName(str, Enum):
    """CLI / configuration names of the supported diagram distances."""

    W1 = "w1"
    W2 = "w2"
    BOTTLENECK = "bottleneck"


@dataclass(frozen=True)
class DiagramMetric:
    """The diagram distance Ψ used for feature extraction (default: W1)."""

    name: MetricName = MetricName.W1

    def __post_init__(self):
        object.__setattr__(self, "name", MetricName(self.name))

    @property
    def order(self) -> int:
        return 2 if self.name is MetricName.W2 else 1

    def __call__(self, a: DiagramLike, b: DiagramLike, hdim: int) -> float:
        if self.name is MetricName.BOTTLENECK:
            return bottleneck(a, b, hdim)
        return wasserstein(a, b, hdim, q=self.order)


def _bars(diagram: DiagramLike, hdim: int) -> np.ndarray:
    if isinstance(diagram, PersistenceDiagram):
        return diagram.finite(hdim)
    bars = np.asarray(diagram, dtype=np.float64).reshape(-1, 2)
    if not np.all(np.isfinite(bars)):
        raise ContractViolation("diagram distances take finite bars only; strip essential classes first")
    return bars


def _cost_blocks(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pairwise L∞ costs and diagonal-projection costs of both diagrams."""
    cross = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2) if a.size and b.size \
        else np.zeros((a.shape[0], b.shape[0]))
    to_diagonal_a = (a[:, 1] - a[:, 0]) / 2.0
    to_diagonal_b = (b[:, 1] - b[:, 0]) / 2.0
    return cross, to_diagonal_a, to_diagonal_b


def augmented_cost_matrix(a: np.ndarray, b: np.ndarray, q: int = 1) -> np.ndarray:
    """
    (m+n)×(m+n) assignment matrix: real points of ``a`` against real points of
    ``b`` plus one diagonal slot per point; diagonal slots match each other for
    free. Entries are per-pair costs raised to ``q``.
    """
    m, n = a.shape[0], b.shape[0]
    cross, diag_a, diag_b = _cost_blocks(a, b)
    forbidden = (float(np.sum(diag_a ** q) + np.sum(diag_b ** q) + np.sum(cross ** q)) + 1.0) * 2.0
    cost = np.zeros((m + n, n + m), dtype=np.float64)
    cost[:m, :n] = cross ** q
    upper_right = np.full((m, m), forbidden)
    np.fill_diagonal(upper_right, diag_a ** q)
    cost[:m, n:] = upper_right
    lower_left = np.full((n, n), forbidden)
    np.fill_diagonal(lower_left, diag_b ** q)
    cost[m:, :n] = lower_left
    return cost


def wasserstein(a: DiagramLike, b: DiagramLike, hdim: int = 0, q: int = 1) -> float:
    """
    Exact q-Wasserstein distance between the finite ``hdim`` bars of two diagrams.

    Unmatched points pay their L∞ distance to the diagonal, (death − birth)/2.
    Solved as a linear assignment on the augmented cost matrix.
    """
    if q not in (1, 2):
        raise ContractViolation(f"q must be 1 or 2, got {q}")
    bars_a, bars_b = _bars(a, hdim), _bars(b, hdim)
    if bars_a.shape[0] + bars_b.shape[0] == 0:
        return 0.0
    cost = augmented_cost_matrix(bars_a, bars_b, q)
    rows, cols = linear_sum_assignment(cost)
    total = float(np.sum(cost[rows, cols]))
    return total if q == 1 else float(np.sqrt(total))


def bottleneck(a: DiagramLike, b: DiagramLike, hdim: int = 0) -> float:
    """
    Exact bottleneck distance: the smallest ε such that a perfect matching of
    the augmented bipartite graph uses only edges of cost ≤ ε. Binary search
    over the sorted candidate costs with a maximum bipartite matching test.
    """
    bars_a, bars_b = _bars(a, hdim), _bars(b, hdim)
    m, n = bars_a.shape[0], bars_b.shape[0]
    if m + n == 0:
        return 0.0
    cross, diag_a, diag_b = _cost_blocks(bars_a, bars_b)
    size = m + n

    # inf marks edges that do not exist in the augmented graph
    cost = np.full((size, size), np.inf)
    cost[:m, :n] = cross
    cost[np.arange(m), n + np.arange(m)] = diag_a
    cost[m + np.arange(n), np.arange(n)] = diag_b
    cost[m:, n:] = 0.0

    candidates = np.unique(cost[np.isfinite(cost)])

    def feasible(epsilon: float) -> bool:
        graph = csr_matrix((cost <= epsilon).astype(np.int8))
        matching = maximum_bipartite_matching(graph, perm_type="column")
        return bool(np.all(matching >= 0))

    lo, hi = 0, candidates.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])
