"""Spectral seriation with multidimensional Laplacian embeddings."""
from .errors import (
    AsymmetryWarning,
    DegenerateAngle,
    DegenerateNeighborhood,
    DimensionMismatch,
    DisconnectedWarning,
    IntervalViolation,
    InvalidDimension,
    InvalidParameter,
    MergeIncomplete,
    NoConvergence,
    NotBijective,
    NotConnected,
    NotMonotone,
    ParseError,
    SeriationError,
    ZeroDegree,
)
from .linalg import Embedding, LaplacianMode, Scaling, eigen_smallest, eigh, embed, laplacian
from .matgen import (
    NoiseSpec,
    add_noise,
    gen_circulant,
    gen_circular_banded,
    gen_circular_kms,
    gen_kms,
    gen_linear_banded,
    inverse_permutation,
    permute_matrix,
    random_permutation,
)
from .mdso import MdsoParams, filament_similarity, merge_components, mdso_order
from .metrics import circular_kendall_tau, kendall_tau, linear_score
from .seriation import circular_order, spectral_order

__version__ = "0.1.0"
