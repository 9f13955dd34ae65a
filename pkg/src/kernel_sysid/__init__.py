"""Identification of linear discrete-time systems by kernel regression."""

from .dynamics import LinearSystem, NoiseSpec, PerturbationSpec, Trajectory, simulate_autonomous, simulate_controlled
from .errors import (
    ConvergenceError,
    DimensionError,
    IllConditionedError,
    TrajectoryOverflowError,
    UndefinedSigmaError,
)
from .kernels import KernelSpec, RidgeProblem, RidgeSolution, gram, kernel_eval, ridge_solve
from .lqr import LqrProblem, closed_loop_analysis, lqr_cost, lqr_gain, solve_dare
from .metrics import compare_trajectories, matrix_distance
from .modelsel import CvConfig, CvReport, cross_validate
from .spectral import (
    Spectrum,
    eigenvalues,
    is_schur_stable,
    spectral_radius,
    topological_entropy_bowen,
    topological_entropy_paper,
)
from .bounds import BoundInputs, alpha, alpha_inverse, sample_error_bound
from .sysid import IdentConfig, IdentResult, compute_sigma, estimate_A, estimate_AB, predict, rescale_trajectory

__version__ = "0.1.0"
