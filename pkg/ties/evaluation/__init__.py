"""
TIES Evaluation
Train/test split, logistic-regression baseline and metrics over feature files.
"""

from ties.evaluation.harness import Metrics, Model, SplitSpec, TrainConfig, evaluate, split, train

__all__ = [
    "Metrics",
    "Model",
    "SplitSpec",
    "TrainConfig",
    "evaluate",
    "split",
    "train"
]
