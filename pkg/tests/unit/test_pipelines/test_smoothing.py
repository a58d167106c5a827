"""
Unit tests for sliding-window smoothing.
"""
import numpy as np
import pytest

from ties.pipelines.embedding import DocMatrix
from ties.pipelines.smoothing import WindowKind, WindowMode, WindowSpec, smooth
from ties.utils.errors import ContractViolation, DocumentTooShortError


def column(values):
    return DocMatrix(values=np.asarray(values, dtype=np.float64).reshape(-1, 1))


class TestWindowSpec:
    """Test cases for WindowSpec."""

    @pytest.mark.parametrize("size", [0, 2, 4, -3])
    def test_rejects_even_or_non_positive(self, size):
        with pytest.raises(ContractViolation):
            WindowSpec(size=size)

    def test_exponential_weights(self):
        weights = WindowSpec(7, WindowKind.EXPONENTIAL).weights()
        assert weights.tolist() == [0.125, 0.25, 0.5, 1.0, 0.5, 0.25, 0.125]

    @pytest.mark.parametrize("text,size,kind", [
        ("3", 3, WindowKind.ARITHMETIC),
        ("7-exponential", 7, WindowKind.EXPONENTIAL),
        ("7e", 7, WindowKind.EXPONENTIAL),
    ])
    def test_parse(self, text, size, kind):
        spec = WindowSpec.parse(text)
        assert (spec.size, spec.kind) == (size, kind)

    def test_label(self):
        assert WindowSpec(7, "exponential").label() == "7-exponential"
        assert WindowSpec(5, mode="same").label() == "5-same"


class TestSmooth:
    """Test cases for smooth."""

    def test_hand_summation(self):
        assert smooth(column([1, 2, 3, 4]), WindowSpec(3)).values.ravel().tolist() == [6.0, 9.0]

    def test_constant_column(self):
        result = smooth(column([2.5] * 20), WindowSpec(5))
        assert result.rows == 16
        assert np.allclose(result.values, 12.5)

    def test_exponential_impulse_response(self):
        impulse = np.zeros(13)
        impulse[6] = 1.0
        result = smooth(column(impulse), WindowSpec(7, WindowKind.EXPONENTIAL))
        assert result.values.ravel().tolist() == [0.125, 0.25, 0.5, 1.0, 0.5, 0.25, 0.125]

    def test_window_one_is_identity(self, rng):
        x = rng.normal(size=(15, 4))
        assert np.array_equal(smooth(DocMatrix(x), WindowSpec(1)).values, x)

    def test_linearity(self, rng):
        x, y = rng.normal(size=(30, 3)), rng.normal(size=(30, 3))
        window = WindowSpec(5, WindowKind.EXPONENTIAL)
        combined = smooth(DocMatrix(2.0 * x - 0.5 * y), window).values
        separate = 2.0 * smooth(DocMatrix(x), window).values - 0.5 * smooth(DocMatrix(y), window).values
        assert np.allclose(combined, separate, atol=1e-12)

    def test_too_short(self):
        with pytest.raises(DocumentTooShortError) as excinfo:
            smooth(DocMatrix(np.ones((2, 3)), doc_id="short"), WindowSpec(3))
        assert excinfo.value.reason == "too_short"

    def test_same_mode_truncates_at_edges(self):
        result = smooth(column([1, 2, 3, 4]), WindowSpec(3, mode=WindowMode.SAME))
        assert result.values.ravel().tolist() == [3.0, 6.0, 9.0, 7.0]
        assert result.source_rows == 4

    def test_short_output_warns(self, caplog):
        smooth(column(np.arange(12.0)), WindowSpec(3))
        assert any("smoothed length" in r.getMessage() for r in caplog.records)


class TestCrossCovarianceCoefficients:
    """Lag-k cross-covariance of smoothed i.i.d. signals follows the window weights."""

    T = 100_000
    SEEDS = range(20)

    def _coefficient(self, window: WindowSpec, lag: int) -> float:
        estimates = []
        for seed in self.SEEDS:
            base = np.random.default_rng(seed).standard_normal(self.T + lag)
            x = np.column_stack([base[lag:], base[:self.T]])
            smoothed = smooth(DocMatrix(x), window).values
            estimates.append(float(smoothed[:, 0] @ smoothed[:, 1]) / smoothed.shape[0])
        return float(np.mean(estimates))

    @pytest.mark.slow
    @pytest.mark.parametrize("lag", [0, 1, 2])
    def test_arithmetic(self, lag):
        window = WindowSpec(3)
        assert self._coefficient(window, lag) == pytest.approx(window.size - lag, rel=0.05)

    @pytest.mark.slow
    @pytest.mark.parametrize("lag", [0, 1, 2])
    def test_exponential(self, lag):
        window = WindowSpec(7, WindowKind.EXPONENTIAL)
        w = window.weights()
        expected = float(np.sum(w[:len(w) - lag] * w[lag:]))
        assert self._coefficient(window, lag) == pytest.approx(expected, rel=0.05)
