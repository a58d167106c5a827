"""
TIES - Features Module
Sensitivity of the persistence diagrams of Φ to each embedding dimension.
"""

import time
from concurrent.futures import Executor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ties.pipelines.embedding import DocMatrix
from ties.pipelines.smoothing import WindowSpec, smooth
from ties.topology.diagram_metric import DiagramMetric
from ties.topology.geometry import DistanceMatrix, distance_matrix
from ties.topology.persistence import PersistenceDiagram, remove_dimension, rips_persistence
from ties.utils.errors import TooFewDimensionsError
from ties.utils.logging_config import get_logger

logger = get_logger("topology.features")


@dataclass
class TiesFeatureVector:
    """
    Per-dimension sensitivities of one document.

    ``v0[d]`` and ``v1[d]`` are the diagram distances between PD₀/PD₁ of Φ and
    of Φ without dimension d+1. Persisted rows concatenate v0 then v1.
    """

    v0: np.ndarray
    v1: np.ndarray
    doc_id: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return int(self.v0.shape[0])

    def concatenated(self) -> np.ndarray:
        return np.concatenate([self.v0, self.v1])


def _leave_one_out(
    phi: DistanceMatrix,
    full: PersistenceDiagram,
    metric: DiagramMetric,
    label: int
) -> Tuple[float, float]:
    reduced = rips_persistence(remove_dimension(phi, label), max_hdim=1)
    return metric(full, reduced, 0), metric(full, reduced, 1)


def ties_features(
    phi: DistanceMatrix,
    metric: Optional[DiagramMetric] = None,
    executor: Optional[Executor] = None,
    doc_id: str = ""
) -> TiesFeatureVector:
    """
    V₀,d = Ψ(PD₀(Φ), PD₀(Φ∖d)) and V₁,d = Ψ(PD₁(Φ), PD₁(Φ∖d)) for every d.

    Essential bars are stripped on both sides before Ψ. Each Φ∖d diagram is
    recomputed from scratch. With an ``executor`` the D leave-one-out runs are
    mapped over it; ``Executor.map`` keeps the order, so the result equals
    the sequential one.

    Raises:
        TooFewDimensionsError: Φ has fewer than three dimensions
    """
    if phi.size < 3:
        raise TooFewDimensionsError(f"TIES features need D >= 3, got {phi.size}")
    metric = metric or DiagramMetric()
    full = rips_persistence(phi, max_hdim=1)

    task = partial(_leave_one_out, phi, full, metric)
    if executor is None:
        results: List[Tuple[float, float]] = [task(label) for label in phi.dim_labels]
    else:
        results = list(executor.map(task, phi.dim_labels))

    sensitivities = np.array(results, dtype=np.float64).reshape(phi.size, 2)
    return TiesFeatureVector(
        v0=sensitivities[:, 0].copy(),
        v1=sensitivities[:, 1].copy(),
        doc_id=doc_id,
        metadata={"metric": metric.name.value, "D": phi.size},
    )


def extract_document_features(
    matrix: DocMatrix,
    window: WindowSpec,
    metric: Optional[DiagramMetric] = None,
    timings: Optional[Dict[str, float]] = None
) -> Tuple[TiesFeatureVector, DistanceMatrix]:
    """
    smooth → distance matrix → TIES features for one embedded document.

    Per-stage wall time (seconds) is accumulated into ``timings`` when given.
    """
    metric = metric or DiagramMetric()
    clock = time.perf_counter()
    smoothed = smooth(matrix, window)
    after_smooth = time.perf_counter()
    phi = distance_matrix(smoothed)
    after_geometry = time.perf_counter()
    features = ties_features(phi, metric, doc_id=matrix.doc_id)
    after_features = time.perf_counter()

    if timings is not None:
        timings["smooth"] = timings.get("smooth", 0.0) + after_smooth - clock
        timings["geometry"] = timings.get("geometry", 0.0) + after_geometry - after_smooth
        timings["features"] = timings.get("features", 0.0) + after_features - after_geometry

    features.metadata.update({
        "window": window.size,
        "window_kind": window.kind.value,
        "window_mode": window.mode.value,
        "T": matrix.rows,
        "T_smoothed": smoothed.rows,
        "oov": matrix.oov_count,
    })
    logger.debug("Features for %s: D=%d, T=%d, T~=%d", matrix.doc_id, phi.size, matrix.rows, smoothed.rows)
    return features, phi
