"""
TIES - Geometry Module
Pairwise distances between embedding dimensions of a smoothed document.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ties.pipelines.smoothing import SmoothedMatrix
from ties.utils.errors import ContractViolation
from ties.utils.logging_config import get_logger

logger = get_logger("topology.geometry")

SYMMETRY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    """
    Symmetric, non-negative D×D dissimilarity between embedding dimensions.

    ``dim_labels`` keeps the 1-based index each row had in the full embedding,
    so leave-one-out submatrices remain traceable.
    """

    values: np.ndarray
    dim_labels: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ContractViolation(f"distance matrix must be square, got shape {values.shape}")
        object.__setattr__(self, "values", values)
        if not self.dim_labels:
            object.__setattr__(self, "dim_labels", tuple(range(1, values.shape[0] + 1)))
        elif len(self.dim_labels) != values.shape[0]:
            raise ContractViolation("dim_labels must have one entry per row")

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    def validate(self, tolerance: float = SYMMETRY_TOLERANCE) -> None:
        """Check the filtration preconditions: finite, symmetric, ≥ 0, zero diagonal."""
        values = self.values
        if not np.all(np.isfinite(values)):
            raise ContractViolation("distance matrix has non-finite entries")
        if values.size and np.max(np.abs(values - values.T)) > tolerance:
            raise ContractViolation("distance matrix is not symmetric")
        if values.size and np.min(values) < -tolerance:
            raise ContractViolation("distance matrix has negative entries")
        if values.size and np.max(np.abs(np.diag(values))) > tolerance:
            raise ContractViolation("distance matrix has a non-zero diagonal")

    def position_of(self, label: int) -> int:
        try:
            return self.dim_labels.index(label)
        except ValueError as exc:
            raise ContractViolation(f"dimension {label} not in {self.dim_labels}") from exc


def _unit_columns(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(x, axis=0)
    safe = np.where(norms > 0.0, norms, 1.0)
    return x / safe, norms


def phi(xi: Sequence[float], xj: Sequence[float]) -> float:
    """
    Distance between two smoothed embedding dimensions.

    φ(x, y) = (‖x‖·‖y‖ − xᵀy) / T̃, i.e. the product of the norms scaled by
    one minus the cosine similarity. It is evaluated as
    ‖x‖·‖y‖·‖x/‖x‖ − y/‖y‖‖² / (2·T̃), which avoids the cancellation of the
    direct form: phi(x, x) is exactly 0 and phi((1, 2), (2, 1)) is 0.5.
    """
    xi = np.asarray(xi, dtype=np.float64)
    xj = np.asarray(xj, dtype=np.float64)
    if xi.ndim != 1 or xi.shape != xj.shape:
        raise ContractViolation(f"phi needs two vectors of equal length, got {xi.shape} and {xj.shape}")
    if xi.shape[0] < 1:
        raise ContractViolation("phi needs non-empty vectors")
    unit, norms = _unit_columns(np.column_stack([xi, xj]))
    gap = float(np.sum((unit[:, 0] - unit[:, 1]) ** 2))
    return max(float(norms[0] * norms[1] * gap / (2.0 * xi.shape[0])), 0.0)


def distance_matrix(smoothed: Union[SmoothedMatrix, np.ndarray]) -> DistanceMatrix:
    """
    Build Φ with Φᵢⱼ = φ(column i, column j).

    Each unordered pair is evaluated once (``pdist``) and mirrored, so Φ is
    exactly symmetric with an exact zero diagonal.
    """
    x = smoothed.values if isinstance(smoothed, SmoothedMatrix) else np.asarray(smoothed, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 2 or x.shape[0] < 1:
        raise ContractViolation(f"need at least 1 row and 2 columns, got shape {x.shape}")
    length = x.shape[0]

    unit, norms = _unit_columns(x)
    zero_columns = np.flatnonzero(norms == 0.0)
    if zero_columns.size:
        logger.warning(
            "Degenerate embedding dimension(s) %s: all-zero smoothed column, distance 0 to every dimension",
            (zero_columns + 1).tolist()
        )

    gaps = squareform(pdist(unit.T, metric="sqeuclidean"))
    values = np.outer(norms, norms) * gaps / (2.0 * length)
    np.maximum(values, 0.0, out=values)
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(values=values)


def write_matrix_csv(matrix: DistanceMatrix, path: Union[str, Path]) -> None:
    """Write Φ as D rows of D comma-separated values at full precision."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        for row in matrix.values:
            writer.writerow([repr(float(v)) for v in row])


def read_matrix_csv(path: Union[str, Path], labels: Optional[Tuple[int, ...]] = None) -> DistanceMatrix:
    """Read a square matrix written by :func:`write_matrix_csv`."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = [[float(v) for v in row] for row in csv.reader(f) if row]
    try:
        values = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise ContractViolation(f"{path}: rows have unequal length") from exc
    if values.size == 0:
        raise ContractViolation(f"{path}: empty matrix")
    return DistanceMatrix(values=values, dim_labels=labels or ())
