"""
Unit tests for the split / train / evaluate harness.
"""
import numpy as np
import pytest

from ties.evaluation.harness import (
    Model,
    SplitSpec,
    TrainConfig,
    evaluate,
    format_metrics,
    load_model,
    loss_and_gradient,
    save_model,
    score_decisions,
    split,
    train,
)
from ties.pipelines.feature_io import FeatureRow
from ties.utils.errors import MissingLabelError, SplitError


def make_rows(features, labels):
    """Rows whose v0 holds the features and v1 is empty."""
    return [
        FeatureRow(id=f"r{i}", labels=list(row_labels), v0=[float(v) for v in x], v1=[])
        for i, (x, row_labels) in enumerate(zip(features, labels))
    ]


@pytest.fixture
def separable_rows():
    rng = np.random.default_rng(11)
    positives = rng.normal(loc=[2.0, 2.0], scale=0.5, size=(10, 2))
    negatives = rng.normal(loc=[-2.0, -2.0], scale=0.5, size=(10, 2))
    features = np.vstack([positives, negatives])
    labels = [["pos"]] * 10 + [["neg"]] * 10
    return make_rows(features, labels)


class TestSplit:
    """Test cases for split."""

    def test_three_rows(self):
        rows = make_rows(np.zeros((3, 1)), [["a"]] * 3)
        train_rows, test_rows = split(rows, SplitSpec(seed=5))
        assert (len(train_rows), len(test_rows)) == (2, 1)

    def test_partition(self):
        rows = make_rows(np.zeros((30, 1)), [["a"]] * 30)
        train_rows, test_rows = split(rows, SplitSpec(seed=1))
        ids = sorted(r.id for r in train_rows + test_rows)
        assert ids == sorted(r.id for r in rows)
        assert len(train_rows) == 20

    def test_same_seed_same_partition(self):
        rows = make_rows(np.zeros((50, 1)), [["a"]] * 50)
        assert split(rows, SplitSpec(seed=9)) == split(rows, SplitSpec(seed=9))

    def test_seeds_differ(self):
        rows = make_rows(np.zeros((100, 1)), [["a"]] * 100)
        partitions = {tuple(r.id for r in split(rows, SplitSpec(seed=s))[0]) for s in range(10)}
        assert len(partitions) > 1

    def test_too_few_rows(self):
        with pytest.raises(SplitError):
            split(make_rows(np.zeros((1, 1)), [["a"]]))

    def test_fraction_bounds(self):
        with pytest.raises(SplitError):
            SplitSpec(train_fraction=1.0)


class TestTrain:
    """Test cases for train."""

    def test_separable_training_accuracy(self, separable_rows):
        model = train(separable_rows, TrainConfig(max_epochs=2000, learning_rate=0.5))
        metrics = evaluate(model, separable_rows)
        assert metrics.accuracy == 1.0
        assert model.labels == ["neg", "pos"]

    def test_no_signal_gives_half(self):
        rows = make_rows(np.ones((10, 3)), [["yes"], ["no"]] * 5)
        model = train(rows)
        probabilities = model.predict_proba(np.ones((4, 3)))
        assert np.allclose(probabilities, 0.5, atol=1e-6)

    def test_missing_label_named(self, separable_rows):
        with pytest.raises(MissingLabelError) as excinfo:
            train(separable_rows, labels=["neg", "pos", "other"])
        assert excinfo.value.label == "other"

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(12)
        h = 1e-6
        for _ in range(10):
            x = rng.normal(size=(15, 4))
            y = rng.integers(0, 2, size=15).astype(bool)
            w, b, l2 = rng.normal(size=4), float(rng.normal()), 0.1
            _, grad_w, grad_b = loss_and_gradient(w, b, x, y, l2)
            for k in range(4):
                step = np.zeros(4)
                step[k] = h
                numeric = (loss_and_gradient(w + step, b, x, y, l2)[0]
                           - loss_and_gradient(w - step, b, x, y, l2)[0]) / (2 * h)
                assert abs(numeric - grad_w[k]) < 1e-6
            numeric_b = (loss_and_gradient(w, b + h, x, y, l2)[0] - loss_and_gradient(w, b - h, x, y, l2)[0]) / (2 * h)
            assert abs(numeric_b - grad_b) < 1e-6

    def test_loss_decreases_monotonically(self, separable_rows):
        model = train(separable_rows, TrainConfig(learning_rate=0.01, max_epochs=300, tolerance=0.0))
        for history in model.loss_history:
            assert all(later <= earlier for earlier, later in zip(history, history[1:]))

    def test_scaler_uses_train_rows_only(self, separable_rows):
        train_rows, test_rows = split(separable_rows, SplitSpec(seed=3))
        model = train(train_rows)
        expected = np.vstack([r.values() for r in train_rows])
        assert np.allclose(model.mean, expected.mean(axis=0))
        assert np.allclose(model.scale, expected.std(axis=0))
        shifted = [FeatureRow(r.id, r.labels, [v + 100.0 for v in r.v0], []) for r in test_rows]
        evaluate(model, shifted)
        assert np.allclose(model.mean, expected.mean(axis=0))

    def test_model_json_round_trip(self, tmp_path, separable_rows):
        model = train(separable_rows, split_spec=SplitSpec(seed=4))
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert isinstance(loaded, Model)
        assert loaded.split == SplitSpec(seed=4)
        x = np.vstack([r.values() for r in separable_rows])
        assert np.allclose(loaded.predict_proba(x), model.predict_proba(x))


class TestMetrics:
    """Test cases for score_decisions and evaluate."""

    def test_perfect(self):
        gold = np.array([[True, False], [False, True]])
        metrics = score_decisions(gold, gold, ["a", "b"])
        assert (metrics.precision, metrics.recall, metrics.f1, metrics.accuracy) == (1.0, 1.0, 1.0, 1.0)

    def test_confusion_arithmetic(self):
        """TP=2, FP=1, FN=1, TN=6."""
        gold = np.array([True, True, True, False] + [False] * 6).reshape(-1, 1)
        predicted = np.array([True, True, False, True] + [False] * 6).reshape(-1, 1)
        metrics = score_decisions(gold, predicted, ["x"])
        assert metrics.precision == pytest.approx(2 / 3)
        assert metrics.recall == pytest.approx(2 / 3)
        assert metrics.f1 == pytest.approx(2 / 3)
        assert metrics.accuracy == pytest.approx(0.8)
        assert (metrics.per_label["x"].tp, metrics.per_label["x"].tn) == (2, 6)

    def test_no_positive_predictions(self):
        gold = np.array([[True], [False]])
        metrics = score_decisions(gold, np.zeros_like(gold), ["x"])
        assert (metrics.precision, metrics.recall, metrics.f1) == (0.0, 0.0, 0.0)

    def test_permutation_invariance(self, separable_rows):
        model = train(separable_rows)
        reversed_rows = list(reversed(separable_rows))
        assert evaluate(model, separable_rows) == evaluate(model, reversed_rows)

    def test_table_lists_labels(self, separable_rows):
        table = format_metrics(evaluate(train(separable_rows), separable_rows))
        assert "pos" in table and "neg" in table and "micro" in table
