"""
TIES - Topological Inference of Embedding Space
Per-dimension topological sensitivity features for text documents.
"""

from ties.version import __version__, __author__, __description__

__all__ = [
    "__version__",
    "__author__",
    "__description__"
]
