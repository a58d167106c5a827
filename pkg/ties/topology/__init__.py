"""
TIES Topology Modules
Dimension distance matrix, Vietoris-Rips persistence, diagram distances and
the leave-one-dimension-out features.
"""

from ties.topology.geometry import DistanceMatrix, distance_matrix, phi
from ties.topology.persistence import PersistenceDiagram, PersistencePoint, mst_deaths, remove_dimension, rips_persistence
from ties.topology.diagram_metric import DiagramMetric, MetricName, bottleneck, wasserstein
from ties.topology.features import TiesFeatureVector, extract_document_features, ties_features

__all__ = [
    "DistanceMatrix",
    "distance_matrix",
    "phi",
    "PersistenceDiagram",
    "PersistencePoint",
    "mst_deaths",
    "remove_dimension",
    "rips_persistence",
    "DiagramMetric",
    "MetricName",
    "bottleneck",
    "wasserstein",
    "TiesFeatureVector",
    "extract_document_features",
    "ties_features"
]
