"""
TIES - Version Information
"""

__version__ = "0.1.0"
__author__ = "TIES Development Team"
__description__ = "Topological feature extraction for text via persistent homology of word-embedding dimensions"
__license__ = "Apache 2.0"
