"""
TIES - Embedding Module
Loads pre-trained word-embedding lexica (GloVe / fastText / Numberbatch text
format) and maps token streams to document matrices.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from ties.pipelines.textprep import TokenStream
from ties.utils.errors import DegenerateDocumentError, LexiconParseError
from ties.utils.logging_config import get_logger

logger = get_logger("pipelines.embedding")


class EmbeddingLexicon:
    """
    Immutable token → vector map with a fixed dimension.

    Vectors are stored row-wise in one float64 array; the lexicon is shared
    read-only across workers.
    """

    def __init__(self, tokens: List[str], vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(tokens):
            raise ValueError("vectors must be a (len(tokens), D) array")
        if vectors.shape[1] < 1:
            raise ValueError("embedding dimension must be positive")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("embedding vectors must be finite")
        self._index: Dict[str, int] = {}
        for i, token in enumerate(tokens):
            if token in self._index:
                raise ValueError(f"duplicate token '{token}'")
            self._index[token] = i
        self._tokens = list(tokens)
        self._vectors = vectors
        self._vectors.setflags(write=False)

    @property
    def dimension(self) -> int:
        return int(self._vectors.shape[1])

    @property
    def vocabulary_size(self) -> int:
        return len(self._tokens)

    @property
    def vectors(self) -> np.ndarray:
        return self._vectors

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self._tokens)

    def index_of(self, token: str) -> Optional[int]:
        return self._index.get(token)

    def vector(self, token: str) -> np.ndarray:
        return self._vectors[self._index[token]]

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        for token, row in zip(self._tokens, self._vectors):
            yield token, row

    def __repr__(self) -> str:
        return f"EmbeddingLexicon(vocabulary_size={self.vocabulary_size}, dimension={self.dimension})"


@dataclass(frozen=True)
class DocMatrix:
    """The T×D embedding matrix of one document."""

    values: np.ndarray
    doc_id: str = ""
    oov_count: int = 0

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])


def _is_header(parts: List[str]) -> bool:
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def load_lexicon(path: Union[str, Path]) -> EmbeddingLexicon:
    """
    Load a whitespace-separated text embedding file.

    Each line is a token followed by D decimal floats. An optional first line
    ``"V D"`` (two integers) is skipped. D is taken from the first data line;
    any later line with a different arity is a fatal parse error. Duplicate
    tokens keep their first vector.

    Args:
        path: Path to the embedding text file

    Returns:
        EmbeddingLexicon at float64 precision
    """
    tokens: List[str] = []
    rows: List[List[float]] = []
    seen = set()
    dimension: Optional[int] = None
    duplicates = 0

    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue
            if line_number == 1 and _is_header(parts):
                logger.debug("Skipping lexicon header %r", line.strip())
                continue
            token, fields = parts[0], parts[1:]
            if dimension is None:
                if not fields:
                    raise LexiconParseError(f"token '{token}' has no vector", line_number)
                dimension = len(fields)
            elif len(fields) != dimension:
                raise LexiconParseError(
                    f"expected {dimension} values for '{token}', found {len(fields)}", line_number
                )
            try:
                vector = [float(v) for v in fields]
            except ValueError as exc:
                raise LexiconParseError(f"non-numeric value for '{token}': {exc}", line_number) from exc
            if not all(np.isfinite(vector)):
                raise LexiconParseError(f"non-finite value for '{token}'", line_number)
            if token in seen:
                duplicates += 1
                logger.warning("Duplicate token '%s' at line %d; keeping first vector", token, line_number)
                continue
            seen.add(token)
            tokens.append(token)
            rows.append(vector)

    if dimension is None:
        raise LexiconParseError("lexicon contains no vectors", 0)

    if duplicates:
        logger.warning("Lexicon %s: %d duplicate tokens ignored", path, duplicates)
    lexicon = EmbeddingLexicon(tokens, np.array(rows, dtype=np.float64).reshape(len(rows), dimension))
    logger.info("Loaded %r from %s", lexicon, path)
    return lexicon


def dump_lexicon(lexicon: EmbeddingLexicon, path: Union[str, Path], header: bool = False) -> None:
    """Write a lexicon in the text format read by :func:`load_lexicon`."""
    with open(path, "w", encoding="utf-8") as f:
        if header:
            f.write(f"{lexicon.vocabulary_size} {lexicon.dimension}\n")
        for token, vector in lexicon.items():
            f.write(token + " " + " ".join(repr(float(v)) for v in vector) + "\n")


def embed_document(tokens: TokenStream, lexicon: EmbeddingLexicon) -> DocMatrix:
    """
    Replace each in-vocabulary token with its embedding vector.

    Out-of-vocabulary tokens are dropped; their number is reported as
    ``oov_count`` so that ``rows + oov_count == len(tokens)``.

    Raises:
        DegenerateDocumentError: no token is in the lexicon
    """
    indices = [lexicon.index_of(token) for token in tokens]
    kept = [i for i in indices if i is not None]
    oov_count = len(indices) - len(kept)
    if not kept:
        raise DegenerateDocumentError(
            tokens.source_id, f"no in-vocabulary tokens ({oov_count} OOV)"
        )
    values = lexicon.vectors[np.asarray(kept, dtype=np.intp)]
    return DocMatrix(values=values, doc_id=tokens.source_id, oov_count=oov_count)
