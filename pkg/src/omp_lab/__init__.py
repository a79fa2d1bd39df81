"""Orthogonal Matching Pursuit, RIP constants and instance-optimality bounds."""

from ._backend import backend, set_backend, use_backend
from .bounds import (
    oracle_ls_decoder,
    theorem1_rhs,
    verify_lemma1,
    verify_theorem1,
    verify_theorem2,
    verify_zhang,
)
from .constants import TheoremConstants, alpha_of, constants
from .errors import (
    ContractViolation,
    DataFormatError,
    EnumerationBudgetError,
    ExcludedCaseError,
    IterationBudgetError,
    UnsupportedExponentError,
)
from .harness import parse_experiment_config, run_experiment, run_verification
from .linalg import gram_eigen_bounds, least_squares_on_support, matvec, transpose_matvec
from .omp import OmpOptions, RecoveryResult, omp_decode
from .reports import BoundReport
from .sensing import (
    MatrixSpec,
    RipEstimate,
    boundedness_probability,
    check_rip_premise,
    generate,
    rip_delta_exact,
    rip_delta_lower_bound,
    rip_delta_upper_bound,
)
from .signal import KTermApprox, best_k_term, lp_norm, sigma_k, support

__version__ = "0.1.0"
