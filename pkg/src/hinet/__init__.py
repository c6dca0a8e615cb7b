"""Build a Doc/Item/Topic network from standards text.

Similarity edges come from SimHash-screened Word Mover's Distance, items from
numbered section headers, and topic edges from label propagation.
"""

from .corpus import Kind, TextUnit, TokenizerConfig, to_nbow, tokenize
from .embedding import EmbeddingTable, load_embeddings
from .errors import HinError
from .fingerprint import Fingerprint, hamming, simhash, topn_fullsort, topn_replace, topn_window
from .graph import HinGraph, assemble
from .propagate import LabelEdge, PropagationConfig, Status
from .relational import SimilarityEdge, build_similarity_graph
from .segment import segment
from .transport import TransportProblem, solve_transport, wmd

__version__ = "0.1.0"

__all__ = [
    "EmbeddingTable",
    "Fingerprint",
    "HinError",
    "HinGraph",
    "Kind",
    "LabelEdge",
    "PropagationConfig",
    "SimilarityEdge",
    "Status",
    "TextUnit",
    "TokenizerConfig",
    "TransportProblem",
    "assemble",
    "build_similarity_graph",
    "hamming",
    "load_embeddings",
    "segment",
    "simhash",
    "solve_transport",
    "to_nbow",
    "tokenize",
    "topn_fullsort",
    "topn_replace",
    "topn_window",
    "wmd",
]
