"""Bounds and oracles for permanents of hermitian positive semidefinite matrices."""

from .certificates import (
    EULER_GAMMA,
    McEstimate,
    Rank1Certificate,
    VectorEnsemble,
    extract_rank1,
    f_ratio,
    f_sup_estimate,
    gurvits_estimate,
    marcus_bounds,
    verify_rank1,
)
from .errors import PermboundError
from .fileio import BoundReport, build_bound_report, emit_report, load_matrix, parse_matrix, write_matrix
from .linalg import (
    CholeskyFactor,
    Spectrum,
    admit_hermitian_psd,
    cholesky_factor,
    diag_congruence,
    eigh,
    loewner_geq,
    random_psd,
)
from .permanent import LogNonneg, per_diagonal, per_naive, per_psd_log, per_rank1, per_ryser, per_tensor
from .relaxation import RelaxationSolution, SolverOptions, barrier_value_grad, feasible_start, rel_solve, x_bounds
from .sampling import make_rng, sample_cnormal
from .tightness import (
    ExperimentConfig,
    RatioRow,
    TightInstance,
    duplicate_ensemble,
    perbound_check,
    ratio_experiment,
    sphere_ensemble,
    tight_instance,
)

__version__ = "0.1.0"
