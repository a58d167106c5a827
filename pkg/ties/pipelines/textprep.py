"""
TIES - Text Preparation Module
Corpus ingestion and token stream production.
"""

import json
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import FrozenSet, Iterator, List, Optional, Set, Union

from ties.utils.errors import CorpusError, CorpusRecordError
from ties.utils.logging_config import LoggerMixin, get_logger

logger = get_logger("pipelines.textprep")


class CorpusFormat(str, Enum):
    """Supported corpus layouts."""

    JSONL = "jsonl"
    DIRECTORY = "directory"


@dataclass(frozen=True)
class LabeledDocument:
    """One corpus record: id, raw text and a (possibly empty) label set."""

    id: str
    text: str
    labels: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class TokenStream:
    """Ordered tokens of one document."""

    tokens: List[str]
    source_id: str = ""

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)


@dataclass(frozen=True)
class TokenizerOptions:
    """Options controlling :func:`tokenize`."""

    lowercase: bool = False
    stopwords: FrozenSet[str] = field(default_factory=frozenset)


class CorpusReader(LoggerMixin):
    """
    Streams :class:`LabeledDocument` records from a corpus location.

    Malformed records are collected in :attr:`errors` and skipped; an
    unreadable location raises :class:`CorpusError` on iteration.
    """

    def __init__(self, path: Union[str, Path], fmt: Union[str, CorpusFormat] = CorpusFormat.JSONL):
        self.path = Path(path)
        self.format = CorpusFormat(fmt)
        self.errors: List[CorpusRecordError] = []

    def __iter__(self) -> Iterator[LabeledDocument]:
        self.errors = []
        if self.format is CorpusFormat.JSONL:
            yield from self._iter_jsonl()
        else:
            yield from self._iter_directory()

    def _record_error(self, error: CorpusRecordError) -> None:
        self.errors.append(error)
        self.logger.warning("Skipping corpus record: %s", error)

    def _iter_jsonl(self) -> Iterator[LabeledDocument]:
        try:
            handle = open(self.path, "rb")
        except OSError as exc:
            raise CorpusError(f"cannot read corpus {self.path}: {exc}") from exc

        seen: Set[str] = set()
        with handle:
            for line_number, raw in enumerate(handle, start=1):
                if not raw.strip():
                    continue
                try:
                    document = self._parse_record(self._decode(raw, line_number), line_number)
                except CorpusRecordError as error:
                    self._record_error(error)
                    continue
                if document.id in seen:
                    self._record_error(
                        CorpusRecordError(f"duplicate id '{document.id}'", line_number, str(self.path))
                    )
                    continue
                seen.add(document.id)
                yield document

    def _decode(self, raw: bytes, line_number: int) -> str:
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusRecordError(f"invalid UTF-8 at byte {exc.start}", line_number, str(self.path)) from exc

    def _parse_record(self, line: str, line_number: int) -> LabeledDocument:
        source = str(self.path)
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusRecordError(f"invalid JSON ({exc.msg})", line_number, source) from exc
        if not isinstance(record, dict):
            raise CorpusRecordError("record is not a JSON object", line_number, source)
        text = record.get("text")
        if not isinstance(text, str):
            raise CorpusRecordError("missing or non-string 'text'", line_number, source)
        doc_id = record.get("id", str(line_number))
        if isinstance(doc_id, bool) or not isinstance(doc_id, (str, int)):
            raise CorpusRecordError("'id' must be a string", line_number, source)
        labels = record.get("labels")
        if labels is None:
            labels = []
        if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
            raise CorpusRecordError("'labels' must be an array of strings", line_number, source)
        return LabeledDocument(id=str(doc_id), text=text, labels=frozenset(labels))

    def _iter_directory(self) -> Iterator[LabeledDocument]:
        if not self.path.is_dir():
            raise CorpusError(f"corpus directory not found: {self.path}")
        for text_file in sorted(self.path.glob("*.txt")):
            try:
                text = text_file.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                self._record_error(CorpusRecordError(str(exc), source=text_file.name))
                continue
            yield LabeledDocument(id=text_file.stem, text=text)


def load_corpus(path: Union[str, Path], fmt: Union[str, CorpusFormat] = CorpusFormat.JSONL) -> CorpusReader:
    """
    Open a corpus for streaming.

    Args:
        path: JSONL file or directory of ``*.txt`` files
        fmt: ``jsonl`` or ``directory``

    Returns:
        A re-iterable :class:`CorpusReader`; per-record errors are in ``reader.errors``
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus path does not exist: {path}")
    return CorpusReader(path, fmt)


def load_stopwords(path: Union[str, Path]) -> FrozenSet[str]:
    """Read a stopword file: UTF-8, one word per line, ``#`` lines ignored."""
    words: Set[str] = set()
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word)
    logger.debug("Loaded %d stopwords from %s", len(words), path)
    return frozenset(words)


def _is_punctuation(char: str) -> bool:
    return unicodedata.category(char).startswith("P")


def _strip_punctuation(chunk: str) -> str:
    start, end = 0, len(chunk)
    while start < end and _is_punctuation(chunk[start]):
        start += 1
    while end > start and _is_punctuation(chunk[end - 1]):
        end -= 1
    return chunk[start:end]


def tokenize(
    text: str,
    options: Optional[TokenizerOptions] = None,
    source_id: str = ""
) -> TokenStream:
    """
    Split text into tokens.

    Chunks are separated by Unicode whitespace, then leading and trailing
    punctuation is stripped. Optional case folding happens before stopword
    removal.

    Example:
        >>> tokenize("The cat sat.", TokenizerOptions(True, frozenset({"the"}))).tokens
        ['cat', 'sat']
    """
    options = options or TokenizerOptions()
    tokens: List[str] = []
    for chunk in text.split():
        token = _strip_punctuation(chunk)
        if not token:
            continue
        if options.lowercase:
            token = token.casefold()
        if token in options.stopwords:
            continue
        tokens.append(token)
    return TokenStream(tokens=tokens, source_id=source_id)

