"""
TIES - Smoothing Module
Sliding-window aggregation of the D-dimensional embedding time series.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from ties.pipelines.embedding import DocMatrix
from ties.utils.errors import ContractViolation, DocumentTooShortError
from ties.utils.logging_config import get_logger

logger = get_logger("pipelines.smoothing")


class WindowKind(str, Enum):
    """Weighting inside the window."""

    ARITHMETIC = "arithmetic"
    EXPONENTIAL = "exponential"


class WindowMode(str, Enum):
    """
    ``valid`` keeps only full windows (T̃ = T − ω + 1).
    ``same`` applies the banded smoother matrix S·X, truncating windows at the
    document edges (T̃ = T).
    """

    VALID = "valid"
    SAME = "same"


@dataclass(frozen=True)
class WindowSpec:
    """Window of odd size ``size`` centred on each token, half-width ``c``."""

    size: int = 3
    kind: WindowKind = WindowKind.ARITHMETIC
    mode: WindowMode = WindowMode.VALID

    def __post_init__(self):
        object.__setattr__(self, "kind", WindowKind(self.kind))
        object.__setattr__(self, "mode", WindowMode(self.mode))
        if isinstance(self.size, bool) or int(self.size) != self.size:
            raise ContractViolation(f"window size must be an integer, got {self.size!r}")
        if self.size < 1 or self.size % 2 == 0:
            raise ContractViolation(f"window size must be odd and >= 1, got {self.size}")

    @property
    def half_width(self) -> int:
        return (self.size - 1) // 2

    def weights(self) -> np.ndarray:
        """Kernel weights for offsets −c..c."""
        offsets = np.arange(-self.half_width, self.half_width + 1)
        if self.kind is WindowKind.EXPONENTIAL:
            return np.power(2.0, -np.abs(offsets))
        return np.ones(self.size, dtype=np.float64)

    def label(self) -> str:
        """Short name used in reports, e.g. ``7-exponential``."""
        text = f"{self.size}"
        if self.kind is WindowKind.EXPONENTIAL:
            text += "-exponential"
        if self.mode is WindowMode.SAME:
            text += "-same"
        return text

    @classmethod
    def parse(cls, text: Union[str, int], mode: Union[str, WindowMode] = WindowMode.VALID) -> "WindowSpec":
        """Parse the CLI/grid form: ``3``, ``7-exponential`` or ``7e``."""
        text = str(text).strip().lower()
        kind = WindowKind.ARITHMETIC
        for suffix in ("-exponential", "-expon", "e"):
            if text.endswith(suffix):
                text = text[: -len(suffix)]
                kind = WindowKind.EXPONENTIAL
                break
        try:
            size = int(text)
        except ValueError as exc:
            raise ContractViolation(f"cannot parse window '{text}'") from exc
        return cls(size=size, kind=kind, mode=WindowMode(mode))


@dataclass(frozen=True)
class SmoothedMatrix:
    """The smoothed series X̃ of one document, shape (T̃, D)."""

    values: np.ndarray
    window: WindowSpec
    source_rows: int

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])


def smooth(matrix: DocMatrix, window: WindowSpec) -> SmoothedMatrix:
    """
    Weighted sum of each column over a centred window.

    In ``valid`` mode X̃[t] = Σ_{s=−c..c} w_s · X[t + c + s] for
    t = 0..T−ω; the operator is linear in X and ω = 1 is the identity.

    Raises:
        DocumentTooShortError: fewer rows than the window size (valid mode)
    """
    values = np.asarray(matrix.values, dtype=np.float64)
    rows = values.shape[0]
    weights = window.weights()
    c = window.half_width

    if window.mode is WindowMode.VALID:
        if rows < window.size:
            raise DocumentTooShortError(
                matrix.doc_id, f"{rows} in-vocabulary tokens < window size {window.size}"
            )
        out_rows = rows - window.size + 1
        smoothed = np.zeros((out_rows, values.shape[1]), dtype=np.float64)
        for k, weight in enumerate(weights):
            smoothed += weight * values[k:k + out_rows]
    else:
        if rows < 1:
            raise DocumentTooShortError(matrix.doc_id, "empty document")
        smoothed = np.zeros_like(values)
        for k, weight in enumerate(weights):
            shift = k - c
            lo, hi = max(0, -shift), min(rows, rows - shift)
            if lo < hi:
                smoothed[lo:hi] += weight * values[lo + shift:hi + shift]

    if smoothed.shape[0] < 10 * window.size:
        logger.warning(
            "Document %s: smoothed length %d < 10 x window size %d; features may be noisy",
            matrix.doc_id or "<anonymous>", smoothed.shape[0], window.size
        )
    return SmoothedMatrix(values=smoothed, window=window, source_rows=rows)
