"""Clustering toolkit for mixed numerical/categorical data.

Distances (Huang, Gower), embeddings (FAMD, Laplacian eigenmaps, simplified
UMAP/PaCMAP), clusterers (k-prototypes, KAMILA, Gower agglomerative, HDBSCAN,
DenseClus, pretopological), tendency diagnostics and validity indices, plus a
benchmark CLI.
"""

from .baselines import (
    KamilaState,
    Prototype,
    elbow_k,
    kamila,
    kamila_detail,
    kprototypes,
    kprototypes_detail,
    laplace_theta,
    phillip_ottaway,
)
from .config import CLUSTER_ALGORITHMS, REDUCE_METHODS, PipelineConfig
from .dataset import (
    MISSING_LEVEL,
    FeatureKind,
    GeneratorConfig,
    LabeledDataset,
    MixedDataset,
    from_arrays,
    generate,
    load_csv,
    save_csv,
    standardize,
)
from .density import (
    CondensedNode,
    CondensedTree,
    DenseClusResult,
    condense,
    condense_and_extract,
    core_distances,
    denseclus,
    extract,
    hdbscan,
    mst,
    mutual_reachability,
)
from .dimred import (
    Embedding,
    NeighborGraph,
    build_neighbor_graph,
    encode,
    encoded_rank,
    famd,
    laplacian_eigenmaps,
    load_embedding_csv,
    pacmap,
    pacmap_weights,
    spectral_coordinates,
    umap,
)
from .distance import (
    DistanceMatrix,
    default_gamma,
    embedding_distances,
    gower_dissimilarity,
    huang_distance,
    pairwise,
)
from .labels import OUTLIER, Hierarchy, HierarchyNode, Partition, compact_labels
from .pretopo import (
    PretopoConfig,
    PretopoSpace,
    WeightedGraphFamily,
    build_space,
    closure,
    pretopomd,
    pseudoclosure,
    quasi_hierarchy,
    select_seeds,
)
from .validation import (
    CH_CAP,
    ValidationReport,
    calinski_harabasz,
    davies_bouldin,
    hopkins,
    ivat,
    minimax_distances,
    report,
    silhouette,
    vat_order,
)

__version__ = "0.1.0"

__all__ = [
    "CH_CAP",
    "CLUSTER_ALGORITHMS",
    "CondensedNode",
    "CondensedTree",
    "DenseClusResult",
    "DistanceMatrix",
    "Embedding",
    "FeatureKind",
    "GeneratorConfig",
    "Hierarchy",
    "HierarchyNode",
    "KamilaState",
    "LabeledDataset",
    "MISSING_LEVEL",
    "MixedDataset",
    "NeighborGraph",
    "OUTLIER",
    "Partition",
    "PipelineConfig",
    "PretopoConfig",
    "PretopoSpace",
    "Prototype",
    "REDUCE_METHODS",
    "ValidationReport",
    "WeightedGraphFamily",
    "build_neighbor_graph",
    "build_space",
    "calinski_harabasz",
    "closure",
    "compact_labels",
    "condense",
    "condense_and_extract",
    "core_distances",
    "davies_bouldin",
    "default_gamma",
    "denseclus",
    "elbow_k",
    "embedding_distances",
    "encode",
    "encoded_rank",
    "extract",
    "famd",
    "from_arrays",
    "generate",
    "gower_dissimilarity",
    "hdbscan",
    "hopkins",
    "huang_distance",
    "ivat",
    "kamila",
    "kamila_detail",
    "kprototypes",
    "kprototypes_detail",
    "laplace_theta",
    "laplacian_eigenmaps",
    "load_csv",
    "load_embedding_csv",
    "minimax_distances",
    "mst",
    "mutual_reachability",
    "pacmap",
    "pacmap_weights",
    "pairwise",
    "phillip_ottaway",
    "pretopomd",
    "pseudoclosure",
    "quasi_hierarchy",
    "report",
    "save_csv",
    "select_seeds",
    "silhouette",
    "spectral_coordinates",
    "standardize",
    "umap",
    "vat_order",
]
