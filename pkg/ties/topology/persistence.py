"""
TIES - Persistence Module
Vietoris–Rips persistent homology (dimensions 0 and 1) of a distance matrix.

Simplices are totally ordered by (filtration value, dimension, vertex tuple);
that order fixes every tie so diagrams are bit-reproducible. Coefficients are
in the two-element field.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Set, TextIO, Tuple, Union

import numpy as np

from ties.topology.geometry import DistanceMatrix
from ties.utils.errors import ContractViolation, TooFewDimensionsError
from ties.utils.logging_config import get_logger

logger = get_logger("topology.persistence")


class PersistencePoint(NamedTuple):
    """One bar: birth, death (``inf`` for essential classes) and homology dimension."""

    birth: float
    death: float
    hdim: int


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of persistence points, canonically sorted by (hdim, birth, death)."""

    points: Tuple[PersistencePoint, ...] = ()
    n_points: Optional[int] = None

    def __post_init__(self):
        ordered = tuple(sorted(
            (PersistencePoint(float(p[0]), float(p[1]), int(p[2])) for p in self.points),
            key=lambda p: (p.hdim, p.birth, p.death)
        ))
        object.__setattr__(self, "points", ordered)

    def __len__(self) -> int:
        return len(self.points)

    def select(self, hdim: int) -> List[PersistencePoint]:
        return [p for p in self.points if p.hdim == hdim]

    def finite(self, hdim: int) -> np.ndarray:
        """Finite bars of one dimension as a (k, 2) array of (birth, death)."""
        bars = [(p.birth, p.death) for p in self.points if p.hdim == hdim and math.isfinite(p.death)]
        return np.array(bars, dtype=np.float64).reshape(len(bars), 2)

    def essential(self, hdim: int) -> List[PersistencePoint]:
        return [p for p in self.points if p.hdim == hdim and math.isinf(p.death)]

    def betti(self, hdim: int, epsilon: float) -> int:
        """Number of classes of dimension ``hdim`` alive at scale ``epsilon``."""
        return sum(1 for p in self.points if p.hdim == hdim and p.birth <= epsilon < p.death)


@dataclass(frozen=True)
class ReducedMatrix(DistanceMatrix):
    """Principal submatrix Φ∖d: the distance matrix without dimension ``removed``."""

    removed: int = field(default=0)


class _UnionFind:
    """Disjoint sets over vertex indices with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # the younger root (larger index) is attached to the elder
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True


def enclosing_radius(phi: DistanceMatrix) -> float:
    """min over points of the max distance to all others."""
    if phi.size < 2:
        return 0.0
    return float(np.min(np.max(phi.values, axis=1)))


def _sorted_edges(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols = np.triu_indices(values.shape[0], k=1)
    weights = values[rows, cols]
    order = np.lexsort((cols, rows, weights))
    return rows[order], cols[order], weights[order]


def _triangles(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All vertex triples i < j < k in lexicographic order."""
    a, b = np.triu_indices(n, k=1)
    counts = n - 1 - b
    total = int(counts.sum())
    ii = np.repeat(a, counts)
    jj = np.repeat(b, counts)
    starts = np.cumsum(counts) - counts
    kk = np.arange(total) - np.repeat(starts, counts) + jj + 1
    return ii, jj, kk


def rips_persistence(phi: DistanceMatrix, max_hdim: int = 1) -> PersistenceDiagram:
    """
    Persistence diagram of the Vietoris–Rips filtration of ``phi``.

    H0 comes from a union-find sweep over the edges in filtration order
    (births 0, finite deaths equal the minimum spanning tree weights, one
    essential bar). H1 is computed by reducing triangle boundary columns up to
    the enclosing radius, beyond which the complex is a cone. Rows of edges that
    already killed an H0 class are dropped from the triangle columns, and the
    reduction stops once every cycle-creating edge has been paired.
    Zero-persistence pairs are discarded.

    Args:
        phi: Symmetric, non-negative matrix with zero diagonal
        max_hdim: 0 or 1

    Returns:
        PersistenceDiagram with points of dimension ≤ ``max_hdim``
    """
    if max_hdim not in (0, 1):
        raise ContractViolation(f"max_hdim must be 0 or 1, got {max_hdim}")
    phi.validate()
    values = phi.values
    n = phi.size
    if n < 1:
        raise ContractViolation("distance matrix must have at least one point")

    points: List[PersistencePoint] = [PersistencePoint(0.0, math.inf, 0)]
    if n == 1:
        return PersistenceDiagram(points=tuple(points), n_points=1)

    rows, cols, weights = _sorted_edges(values)
    rank = np.empty((n, n), dtype=np.int64)
    edge_ids = np.arange(weights.shape[0])
    rank[rows, cols] = edge_ids
    rank[cols, rows] = edge_ids

    components = _UnionFind(n)
    negative = np.zeros(weights.shape[0], dtype=bool)
    merged = 0
    for e in range(weights.shape[0]):
        if components.union(int(rows[e]), int(cols[e])):
            negative[e] = True
            merged += 1
            if weights[e] > 0.0:
                points.append(PersistencePoint(0.0, float(weights[e]), 0))
            if merged == n - 1:
                break

    if max_hdim >= 1 and n >= 3:
        points.extend(_h1_pairs(values, rank, weights, negative, enclosing_radius(phi)))

    return PersistenceDiagram(points=tuple(points), n_points=n)


def _h1_pairs(
    values: np.ndarray,
    rank: np.ndarray,
    weights: np.ndarray,
    negative: np.ndarray,
    threshold: float
) -> List[PersistencePoint]:
    n = values.shape[0]
    positive_edges = int(np.count_nonzero((weights <= threshold) & ~negative))
    if positive_edges == 0:
        return []

    ii, jj, kk = _triangles(n)
    diameters = np.maximum(np.maximum(values[ii, jj], values[ii, kk]), values[jj, kk])
    keep = diameters <= threshold
    ii, jj, kk, diameters = ii[keep], jj[keep], kk[keep], diameters[keep]
    order = np.lexsort((kk, jj, ii, diameters))
    faces = np.stack([rank[ii, jj], rank[ii, kk], rank[jj, kk]], axis=1)[order]
    diameters = diameters[order]

    is_negative = negative.tolist()
    edge_weights = weights.tolist()
    triangle_values = diameters.tolist()
    pivots: Dict[int, Set[int]] = {}
    pairs: List[PersistencePoint] = []
    for t, boundary in enumerate(faces.tolist()):
        column = {e for e in boundary if not is_negative[e]}
        while column:
            low = max(column)
            reducer = pivots.get(low)
            if reducer is None:
                pivots[low] = column
                birth, death = edge_weights[low], triangle_values[t]
                if death > birth:
                    pairs.append(PersistencePoint(birth, death, 1))
                break
            column = column ^ reducer
        if len(pivots) == positive_edges:
            break

    if len(pivots) < positive_edges:
        # cannot happen for a valid filtration below the enclosing radius
        logger.error("H1 reduction left %d cycles unpaired", positive_edges - len(pivots))
    return pairs


def mst_deaths(phi: DistanceMatrix) -> List[float]:
    """
    Edge weights of a minimum spanning tree (dense Prim), sorted ascending.

    Independent of :func:`rips_persistence`; used to cross-check H0.
    """
    phi.validate()
    n = phi.size
    if n < 2:
        return []
    values = phi.values
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = values[0].copy()
    deaths: List[float] = []
    for _ in range(n - 1):
        candidates = np.where(in_tree, np.inf, best)
        nxt = int(np.argmin(candidates))
        deaths.append(float(candidates[nxt]))
        in_tree[nxt] = True
        best = np.minimum(best, values[nxt])
    return sorted(deaths)


def remove_dimension(phi: DistanceMatrix, d: int) -> ReducedMatrix:
    """
    Delete row and column of embedding dimension ``d`` (a 1-based label).

    Raises:
        TooFewDimensionsError: fewer than three dimensions
    """
    if phi.size < 3:
        raise TooFewDimensionsError(f"need at least 3 dimensions to remove one, got {phi.size}")
    position = phi.position_of(d)
    keep = np.delete(np.arange(phi.size), position)
    values = phi.values[np.ix_(keep, keep)]
    labels = tuple(label for label in phi.dim_labels if label != d)
    return ReducedMatrix(values=values, dim_labels=labels, removed=d)


def _format_value(value: float) -> str:
    return "inf" if math.isinf(value) else repr(float(value))


def write_diagram_csv(diagram: PersistenceDiagram, target: Union[str, Path, TextIO]) -> None:
    """Write ``hdim,birth,death`` rows; essential classes get death ``inf``."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as f:
            write_diagram_csv(diagram, f)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(["hdim", "birth", "death"])
    for point in diagram.points:
        writer.writerow([point.hdim, _format_value(point.birth), _format_value(point.death)])


def read_diagram_csv(source: Union[str, Path]) -> PersistenceDiagram:
    """Read a diagram CSV (header optional)."""
    with open(source, "r", encoding="utf-8", newline="") as f:
        return _parse_diagram_rows(csv.reader(f), str(source))


def diagram_from_string(text: str) -> PersistenceDiagram:
    return _parse_diagram_rows(csv.reader(io.StringIO(text)), "<string>")


def _parse_diagram_rows(rows: Iterable[List[str]], source: str) -> PersistenceDiagram:
    points: List[PersistencePoint] = []
    for line_number, row in enumerate(rows, start=1):
        if not row or (line_number == 1 and row[0].strip().lower() == "hdim"):
            continue
        if len(row) != 3:
            raise ContractViolation(f"{source}:{line_number}: expected 'hdim,birth,death'")
        try:
            hdim, birth, death = int(row[0]), float(row[1]), float(row[2])
        except ValueError as exc:
            raise ContractViolation(f"{source}:{line_number}: {exc}") from exc
        if hdim not in (0, 1) or birth < 0 or death < birth:
            raise ContractViolation(f"{source}:{line_number}: invalid point {row}")
        points.append(PersistencePoint(birth, death, hdim))
    return PersistenceDiagram(points=tuple(points))
