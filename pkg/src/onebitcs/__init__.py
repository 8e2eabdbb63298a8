"""Decoders for 1-bit compressive sensing.

Measurements are the (possibly noisy, possibly sign-flipped) signs of
linear samples of an unknown signal.  The package recovers the signal up
to scale with either plain least squares (overdetermined case) or
l1-regularized least squares solved by a primal-dual active-set Newton
method with continuation and voting-based selection of the regularization
parameter, and ships a seeded harness that reproduces the synthetic
benchmarks.
"""

from .continuation import (
    PathPoint,
    Selection,
    SolutionPath,
    decode_l1,
    run_path,
    select_lambda,
    support_cap,
    write_path_csv,
)
from .errors import (
    ActiveSetOverflow,
    DegenerateScale,
    EmptyPath,
    MaxIterExceeded,
    OneBitCSError,
    ShapeError,
    SingularGram,
)
from .ista import OracleResult, ista_solve, objective
from .least_squares import LsEstimate, decode_ls
from .linalg import CholeskyFactor, cholesky, gram_submatrix, matvec, solve_spd
from .metrics import AggregateSummary, DecodeReport, aggregate, psnr, report
from .pdas import PdasOutcome, SolverState, pdas_iterate, pdas_solve, soft_threshold
from .problem_io import export_csv, load_problem, save_problem
from .sensing import (
    GroundTruth,
    ModelParams,
    SensingProblem,
    elliptic_norm,
    generate,
    scale_constant,
    toeplitz_covariance,
    verify_population_identity,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveSetOverflow",
    "AggregateSummary",
    "CholeskyFactor",
    "DecodeReport",
    "DegenerateScale",
    "EmptyPath",
    "GroundTruth",
    "LsEstimate",
    "MaxIterExceeded",
    "ModelParams",
    "OneBitCSError",
    "OracleResult",
    "PathPoint",
    "PdasOutcome",
    "Selection",
    "SensingProblem",
    "ShapeError",
    "SingularGram",
    "SolutionPath",
    "SolverState",
    "aggregate",
    "cholesky",
    "decode_l1",
    "decode_ls",
    "elliptic_norm",
    "export_csv",
    "generate",
    "gram_submatrix",
    "ista_solve",
    "load_problem",
    "matvec",
    "objective",
    "pdas_iterate",
    "pdas_solve",
    "psnr",
    "report",
    "run_path",
    "save_problem",
    "scale_constant",
    "select_lambda",
    "soft_threshold",
    "solve_spd",
    "support_cap",
    "toeplitz_covariance",
    "verify_population_identity",
    "write_path_csv",
]
