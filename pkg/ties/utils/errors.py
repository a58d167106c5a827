"""
Exception hierarchy for the TIES toolkit.

Document-level errors (degenerate or too-short documents) are recoverable: the
batch extractor records them as skips. Configuration, corpus I/O and lexicon
errors are fatal for a run.
"""
from typing import Optional


class TiesError(Exception):
    """Base class for all TIES errors."""


class ConfigError(TiesError):
    """Invalid or unresolvable run configuration."""


class CorpusError(TiesError):
    """The corpus location cannot be read at all."""


class CorpusRecordError(TiesError):
    """A single malformed corpus record; processing continues."""

    def __init__(self, message: str, line_number: Optional[int] = None, source: Optional[str] = None):
        self.line_number = line_number
        self.source = source
        where = []
        if source:
            where.append(source)
        if line_number is not None:
            where.append(f"line {line_number}")
        prefix = f"{':'.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class LexiconParseError(TiesError):
    """Malformed embedding lexicon file."""

    def __init__(self, message: str, line_number: int):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DocumentError(TiesError):
    """A document that cannot be turned into features."""

    reason = "error"

    def __init__(self, doc_id: str, message: str):
        self.doc_id = doc_id
        super().__init__(f"{doc_id}: {message}")


class DegenerateDocumentError(DocumentError):
    """No token of the document is in the lexicon."""

    reason = "all_oov"


class DocumentTooShortError(DocumentError):
    """Fewer in-vocabulary tokens than the window size."""

    reason = "too_short"


class ContractViolation(TiesError, ValueError):
    """Input violates a documented precondition."""


class TooFewDimensionsError(ContractViolation):
    """Leave-one-out needs at least three embedding dimensions."""


class SplitError(TiesError, ValueError):
    """A corpus too small to split into train and test."""


class MissingLabelError(TiesError, ValueError):
    """A label of the alphabet has no positive example in the training rows."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"label '{label}' has no example in the training set")
