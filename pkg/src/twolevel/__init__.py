"""Spectrally optimal two-level methods for general matrix pencils.

Constructs interpolation/restriction pairs from the generalized
eigenvectors of a pencil (A, M), assembles the two-level error
propagator, and verifies sharp convergence bounds by direct
computation.
"""

from .cycle import (
    ConvergenceRecord,
    TwoLevelOperator,
    coarse_projection,
    error_propagator,
    make_two_level,
    n_norm_of,
    power_norm_check,
    predicted_bound,
    random_competitor_pair,
    run_iterations,
    spectral_radius,
)
from .errors import (
    BadCoarseDim,
    CholeskyFailure,
    ConfigError,
    DimensionMismatch,
    DivergenceOverflow,
    IllConditionedEigenbasis,
    InconsistentBlockColoring,
    NotRealPencil,
    PairSplitWarning,
    ParseError,
    ResidualImaginary,
    SingularBasisChange,
    SingularBlock,
    SingularCoarseOperator,
    SingularM,
    TwoLevelError,
    UnsupportedField,
    ZeroDiagonal,
)
from .mmio import load_matrix_market, save_matrix_market
from .pencil import (
    BiorthogonalityReport,
    Field,
    GeneralizedEigenDecomposition,
    Pencil,
    deviation_order,
    factor_pencil,
    make_pencil,
    verify_biorthogonality,
)
from .problems import (
    GridSpec,
    ProblemKind,
    ProblemSpec,
    advection_reaction_matrix,
    diagonal_pencil,
    hpd_laplacian,
    laplacian_1d,
    mixed_wave_matrix,
    random_dense_pencil,
)
from .smoothers import (
    BLACK,
    RED,
    BlockPartition,
    CFSplit,
    Smoother,
    block_cf_split,
    block_jacobi,
    jacobi,
    make_smoother,
    red_black_jacobi,
    rs_cf_split,
    strength_matrix,
)
from .transfers import (
    BasisChange,
    NormSpec,
    TransferPair,
    apply_basis_change,
    cf_block_norm_matrix,
    check_pi_orthogonal,
    n_norm_matrix,
    optimal_complex_transfers,
    optimal_real_transfers,
)
from .verify import CheckResult, run_verification

__version__ = "0.1.0"
