"""
pytest configuration file for TIES tests.
"""
import json
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from ties.pipelines.embedding import EmbeddingLexicon, dump_lexicon  # noqa: E402


TOY_VECTORS = {
    "alpha": [1.0, 0.0, 0.5, 0.2],
    "beta": [0.0, 1.0, 0.3, 0.9],
    "gamma": [0.4, 0.4, 1.0, 0.0],
    "delta": [0.9, 0.1, 0.0, 1.0],
    "eps": [0.2, 0.7, 0.6, 0.1],
}


@pytest.fixture
def rng():
    """Seeded generator shared by randomized tests."""
    return np.random.default_rng(20240611)


@pytest.fixture
def toy_lexicon():
    """Five-word lexicon with D=4."""
    tokens = list(TOY_VECTORS)
    return EmbeddingLexicon(tokens, np.array([TOY_VECTORS[t] for t in tokens]))


@pytest.fixture
def toy_lexicon_path(tmp_path, toy_lexicon):
    path = tmp_path / "toy_vectors.txt"
    dump_lexicon(toy_lexicon, path)
    return path


def _toy_text(rng, length):
    words = list(TOY_VECTORS)
    return " ".join(words[i] for i in rng.integers(0, len(words), size=length))


@pytest.fixture
def toy_corpus_path(tmp_path):
    """Two labelled documents of 40 tokens each."""
    rng = np.random.default_rng(7)
    path = tmp_path / "corpus.jsonl"
    records = [
        {"id": "doc-a", "text": _toy_text(rng, 40), "labels": ["L1"]},
        {"id": "doc-b", "text": _toy_text(rng, 40), "labels": ["L2"]},
    ]
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def square_phi():
    """Four points on a unit square: sides 1, diagonals √2."""
    s = np.sqrt(2.0)
    return np.array([
        [0.0, 1.0, s, 1.0],
        [1.0, 0.0, 1.0, s],
        [s, 1.0, 0.0, 1.0],
        [1.0, s, 1.0, 0.0],
    ])
