"""
TIES Pipeline Modules
Text preparation, embedding lookup and sliding-window smoothing.
"""

from ties.pipelines.textprep import CorpusReader, LabeledDocument, TokenStream, TokenizerOptions, load_corpus, tokenize
from ties.pipelines.embedding import DocMatrix, EmbeddingLexicon, embed_document, load_lexicon
from ties.pipelines.smoothing import SmoothedMatrix, WindowKind, WindowMode, WindowSpec, smooth

__all__ = [
    "CorpusReader",
    "LabeledDocument",
    "TokenStream",
    "TokenizerOptions",
    "load_corpus",
    "tokenize",
    "DocMatrix",
    "EmbeddingLexicon",
    "embed_document",
    "load_lexicon",
    "SmoothedMatrix",
    "WindowKind",
    "WindowMode",
    "WindowSpec",
    "smooth"
]
