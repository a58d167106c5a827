"""
TIES - Evaluation Harness
Seeded train/test split, one-vs-rest L2 logistic regression on TIES feature
rows, and micro-averaged precision / recall / F1 / accuracy.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from dataclasses_json import dataclass_json
from scipy.special import expit

from ties.pipelines.feature_io import FeatureRow
from ties.utils.errors import ContractViolation, MissingLabelError, SplitError
from ties.utils.logging_config import get_logger

logger = get_logger("evaluation.harness")


@dataclass_json
@dataclass
class SplitSpec:
    """Random train/test partition: ``⌈f·n⌉`` rows for training, the rest for testing."""

    train_fraction: float = 2.0 / 3.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise SplitError(f"train fraction must lie in (0, 1), got {self.train_fraction}")

    def train_size(self, n: int) -> int:
        # at least one row on each side; tolerance absorbs 2/3·3 = 2.0000000000000004
        return min(n - 1, max(1, math.ceil(self.train_fraction * n - 1e-9)))

    def indices(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        if n < 2:
            raise SplitError(f"cannot split {n} row(s); need at least 2")
        order = np.random.default_rng(self.seed).permutation(n)
        k = self.train_size(n)
        return np.sort(order[:k]), np.sort(order[k:])


def split(rows: Sequence[FeatureRow], spec: Optional[SplitSpec] = None) -> Tuple[List[FeatureRow], List[FeatureRow]]:
    """
    Deterministic partition of ``rows`` into (train, test) for a fixed seed.

    Both parts keep the input order.

    Raises:
        SplitError: fewer than two rows
    """
    spec = spec or SplitSpec()
    train_idx, test_idx = spec.indices(len(rows))
    return [rows[i] for i in train_idx], [rows[i] for i in test_idx]


@dataclass_json
@dataclass
class TrainConfig:
    l2: float = 1e-3
    max_epochs: int = 500
    learning_rate: float = 0.1
    tolerance: float = 1e-7


def label_alphabet(rows: Sequence[FeatureRow]) -> List[str]:
    return sorted({label for row in rows for label in row.labels})


def design_matrix(rows: Sequence[FeatureRow]) -> np.ndarray:
    """Stack the concatenated ``v0 ⧺ v1`` vectors of ``rows``."""
    if not rows:
        return np.zeros((0, 0))
    widths = {len(row.v0) + len(row.v1) for row in rows}
    if len(widths) != 1:
        raise ContractViolation(f"feature rows have mixed widths: {sorted(widths)}")
    return np.vstack([row.values() for row in rows])


def label_matrix(rows: Sequence[FeatureRow], labels: Sequence[str]) -> np.ndarray:
    """Boolean (n_rows, n_labels) indicator of gold labels."""
    gold = np.zeros((len(rows), len(labels)), dtype=bool)
    position = {label: j for j, label in enumerate(labels)}
    for i, row in enumerate(rows):
        for label in row.labels:
            if label in position:
                gold[i, position[label]] = True
    return gold


def loss_and_gradient(
    weights: np.ndarray,
    bias: float,
    x: np.ndarray,
    y: np.ndarray,
    l2: float
) -> Tuple[float, np.ndarray, float]:
    """
    Mean logistic loss with an L2 penalty on the weights (not the bias).

    Returns:
        (loss, gradient w.r.t. weights, gradient w.r.t. bias)
    """
    z = x @ weights + bias
    y = y.astype(np.float64)
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(weights, weights))
    residual = expit(z) - y
    n = max(x.shape[0], 1)
    grad_w = x.T @ residual / n + l2 * weights
    grad_b = float(np.sum(residual) / n)
    return loss, grad_w, grad_b


def _fit_binary(x: np.ndarray, y: np.ndarray, config: TrainConfig) -> Tuple[np.ndarray, float, bool, List[float]]:
    weights = np.zeros(x.shape[1])
    bias = 0.0
    history: List[float] = []
    converged = False
    for _ in range(config.max_epochs):
        loss, grad_w, grad_b = loss_and_gradient(weights, bias, x, y, config.l2)
        if history and abs(history[-1] - loss) < config.tolerance:
            history.append(loss)
            converged = True
            break
        history.append(loss)
        weights = weights - config.learning_rate * grad_w
        bias -= config.learning_rate * grad_b
    if not converged:
        history.append(loss_and_gradient(weights, bias, x, y, config.l2)[0])
    return weights, bias, converged, history


@dataclass_json
@dataclass
class Model:
    """One-vs-rest logistic model with the train-only standardisation it was fitted with."""

    labels: List[str]
    mean: List[float]
    scale: List[float]
    weights: List[List[float]]
    biases: List[float]
    converged: List[bool] = field(default_factory=list)
    loss_history: List[List[float]] = field(default_factory=list)
    split: Optional[SplitSpec] = None
    config: Optional[TrainConfig] = None

    @property
    def dimension(self) -> int:
        return len(self.mean)

    def standardize(self, x: np.ndarray) -> np.ndarray:
        return (x - np.asarray(self.mean)) / np.asarray(self.scale)

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        if x.shape[1] != self.dimension:
            raise ContractViolation(f"model expects {self.dimension} features, got {x.shape[1]}")
        return self.standardize(x) @ np.asarray(self.weights).T + np.asarray(self.biases)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """(n_rows, n_labels) probability of each label."""
        return expit(self.decision_function(x))

    def predict(self, x: np.ndarray, threshold: float = 0.5) -> np.ndarray:
        return self.predict_proba(x) >= threshold


def train(
    rows: Sequence[FeatureRow],
    config: Optional[TrainConfig] = None,
    labels: Optional[Sequence[str]] = None,
    split_spec: Optional[SplitSpec] = None
) -> Model:
    """
    Fit one binary logistic regression per label on standardised features.

    The scaler statistics come from ``rows`` alone; constant columns get
    unit scale.

    Args:
        rows: Training rows
        config: Optimiser settings
        labels: Label alphabet to learn; defaults to the labels seen in ``rows``
        split_spec: Recorded on the model so ``eval`` can recover the test partition

    Raises:
        MissingLabelError: a requested label has no positive training example
    """
    config = config or TrainConfig()
    if not rows:
        raise SplitError("no training rows")
    labels = sorted(labels) if labels is not None else label_alphabet(rows)
    if not labels:
        raise ContractViolation("training rows carry no labels")
    gold = label_matrix(rows, labels)
    for j, label in enumerate(labels):
        if not gold[:, j].any():
            raise MissingLabelError(label)

    x = design_matrix(rows)
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale == 0.0] = 1.0
    x = (x - mean) / scale

    weights, biases, converged, histories = [], [], [], []
    for j, label in enumerate(labels):
        w, b, ok, history = _fit_binary(x, gold[:, j], config)
        if not ok:
            logger.warning("Label %r did not converge in %d epochs (loss %.6f)", label, config.max_epochs, history[-1])
        logger.debug("Label %r: %d epochs, final loss %.6f", label, len(history), history[-1])
        weights.append(w.tolist())
        biases.append(float(b))
        converged.append(ok)
        histories.append(history)

    logger.info("Trained %d label model(s) on %d rows x %d features", len(labels), x.shape[0], x.shape[1])
    return Model(
        labels=list(labels),
        mean=mean.tolist(),
        scale=scale.tolist(),
        weights=weights,
        biases=biases,
        converged=converged,
        loss_history=histories,
        split=split_spec,
        config=config,
    )


@dataclass_json
@dataclass
class LabelMetrics:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    accuracy: float = 0.0


@dataclass_json
@dataclass
class Metrics:
    """Micro-averaged scores over all (example, label) decisions plus a per-label breakdown."""

    precision: float
    recall: float
    f1: float
    accuracy: float
    decisions: int = 0
    per_label: Dict[str, LabelMetrics] = field(default_factory=dict)


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0 else 0.0


def confusion_scores(tp: int, fp: int, fn: int, tn: int) -> LabelMetrics:
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2.0 * precision * recall, precision + recall)
    accuracy = _ratio(tp + tn, tp + fp + fn + tn)
    return LabelMetrics(int(tp), int(fp), int(fn), int(tn), precision, recall, f1, accuracy)


def score_decisions(gold: np.ndarray, predicted: np.ndarray, labels: Sequence[str]) -> Metrics:
    """Micro metrics from boolean (n_rows, n_labels) gold and predicted matrices."""
    gold = np.asarray(gold, dtype=bool)
    predicted = np.asarray(predicted, dtype=bool)
    if gold.shape != predicted.shape:
        raise ContractViolation(f"shape mismatch: gold {gold.shape} vs predicted {predicted.shape}")

    per_label: Dict[str, LabelMetrics] = {}
    for j, label in enumerate(labels):
        g, p = gold[:, j], predicted[:, j]
        per_label[label] = confusion_scores(
            int(np.sum(g & p)), int(np.sum(~g & p)), int(np.sum(g & ~p)), int(np.sum(~g & ~p))
        )
    micro = confusion_scores(
        int(np.sum(gold & predicted)), int(np.sum(~gold & predicted)),
        int(np.sum(gold & ~predicted)), int(np.sum(~gold & ~predicted))
    )
    return Metrics(micro.precision, micro.recall, micro.f1, micro.accuracy,
                   decisions=int(gold.size), per_label=per_label)


def evaluate(model: Model, rows: Sequence[FeatureRow], threshold: float = 0.5) -> Metrics:
    """
    Threshold the model's probabilities and score every (row, label) decision.

    Gold labels the model never learned count as missed positives under
    their own per-label entry.
    """
    unknown = sorted(set(label_alphabet(rows)) - set(model.labels))
    if unknown:
        logger.warning("Test labels unknown to the model: %s", ", ".join(unknown))
    labels = list(model.labels) + unknown
    gold = label_matrix(rows, labels)
    if rows:
        predicted = model.predict(design_matrix(rows), threshold)
    else:
        predicted = np.zeros((0, len(model.labels)), dtype=bool)
    predicted = np.hstack([predicted, np.zeros((len(rows), len(unknown)), dtype=bool)])
    return score_decisions(gold, predicted, labels)


def format_metrics(metrics: Metrics) -> str:
    """Human-readable table: micro scores and one line per label."""
    width = max([len("micro")] + [len(label) for label in metrics.per_label])
    lines = [
        f"{'label':<{width}}  {'prec':>6} {'rec':>6} {'f1':>6} {'acc':>6}   tp   fp   fn",
        "-" * (width + 46),
    ]
    for label, m in metrics.per_label.items():
        lines.append(f"{label:<{width}}  {m.precision:6.3f} {m.recall:6.3f} {m.f1:6.3f} {m.accuracy:6.3f}"
                     f" {m.tp:4d} {m.fp:4d} {m.fn:4d}")
    lines.append("-" * (width + 46))
    lines.append(f"{'micro':<{width}}  {metrics.precision:6.3f} {metrics.recall:6.3f} "
                 f"{metrics.f1:6.3f} {metrics.accuracy:6.3f}")
    return "\n".join(lines)


def save_model(model: Model, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(model.to_json(indent=2))


def load_model(path: Union[str, Path]) -> Model:
    with open(path, "r", encoding="utf-8") as f:
        return Model.from_dict(json.load(f))
