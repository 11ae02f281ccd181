"""Two-sample hypothesis testing for point clouds via persistent homology
and max-plus (tropical) barcode coordinates.

The package is organized along the pipeline:

    shapes       synthetic point clouds and distance matrices
    persistence  Rips filtrations, barcodes, bottleneck distance
    tropical     coordinates on barcode space, sorted embeddings
    energy       energy statistic and permutation test
    pipeline     end-to-end runs, serialization, reports
    cli          the `tropitest` command
"""

__version__ = "0.1.0"

from .energy import (
    Sample,
    TestResult,
    energy_statistic,
    permutation_null_distribution,
    permutation_test,
)
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateInputError,
    InputError,
    ParameterError,
    ParseError,
    RefusalError,
    RegularizationError,
    TropitestError,
)
from .persistence import (
    Bar,
    Barcode,
    Filtration,
    Matching,
    bottleneck_bruteforce,
    bottleneck_distance,
    bottleneck_matching,
    build_rips_filtration,
    compute_barcode,
)
from .shapes import (
    DistanceMatrix,
    PointCloud,
    ShapeSpec,
    pairwise_distances,
    sample_shape,
)
from .tropical import (
    OrbitIndex,
    SortedEmbedding,
    TropicalEmbedding,
    canonicalize,
    check_regularized,
    embedding_dimension,
    gamma_bruteforce,
    gamma_eval,
    orbit_indices,
    regularization_parameter,
    sufficient_statistic,
    tropical_embedding,
)

__all__ = [
    "__version__",
    "Bar",
    "Barcode",
    "CapacityError",
    "ConfigError",
    "DegenerateInputError",
    "DistanceMatrix",
    "Filtration",
    "InputError",
    "Matching",
    "OrbitIndex",
    "ParameterError",
    "ParseError",
    "PointCloud",
    "RefusalError",
    "RegularizationError",
    "Sample",
    "ShapeSpec",
    "SortedEmbedding",
    "TestResult",
    "TropicalEmbedding",
    "TropitestError",
    "bottleneck_bruteforce",
    "bottleneck_distance",
    "bottleneck_matching",
    "build_rips_filtration",
    "canonicalize",
    "check_regularized",
    "compute_barcode",
    "embedding_dimension",
    "energy_statistic",
    "gamma_bruteforce",
    "gamma_eval",
    "orbit_indices",
    "pairwise_distances",
    "permutation_null_distribution",
    "permutation_test",
    "regularization_parameter",
    "sample_shape",
    "sufficient_statistic",
    "tropical_embedding",
]
