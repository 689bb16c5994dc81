"""Dimensionality reduction for mixed numerical/categorical data."""

from .base import Embedding, load_embedding_csv
from .famd import encode, encoded_rank, famd
from .pacmap import PairSets, pacmap, pacmap_weights, pair_grad, pair_loss, sample_pairs
from .spectral import laplacian_eigenmaps, spectral_coordinates
from .umap import (
    NeighborGraph,
    attract_grad,
    attract_loss,
    build_neighbor_graph,
    low_dim_similarity,
    neighbor_graph_from_distances,
    repel_grad,
    repel_loss,
    umap,
)

__all__ = [
    "Embedding",
    "load_embedding_csv",
    "encode",
    "encoded_rank",
    "famd",
    "laplacian_eigenmaps",
    "spectral_coordinates",
    "NeighborGraph",
    "build_neighbor_graph",
    "neighbor_graph_from_distances",
    "low_dim_similarity",
    "attract_loss",
    "attract_grad",
    "repel_loss",
    "repel_grad",
    "umap",
    "PairSets",
    "pacmap",
    "pacmap_weights",
    "pair_loss",
    "pair_grad",
    "sample_pairs",
]
