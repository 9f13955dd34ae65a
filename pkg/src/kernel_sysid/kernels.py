"""Mercer kernels, Gram matrices and the regularized kernel least-squares solve.

The regression problem for one state component is

    minimize (1/N) sum_k (y(k) - f(x(k)))**2 + gamma * ||f||_K**2

whose kernel-expansion coefficients solve ``(N*gamma*I + K) c = y``.  Two
expansions are supported:

``representer``
    expansion over the evaluation (input) points, so ``K`` is a symmetric
    PSD Gram matrix.
``paper-literal``
    expansion over the successor states ``x(1..N)`` evaluated at
    ``x(0..N-1)``; ``K`` is a generally non-symmetric cross-Gram matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.spatial.distance import cdist

from .errors import DimensionError, IllConditionedError

MODES = ("representer", "paper-literal")
MAX_CONDITION = 1e14
PIVOT_RTOL = 1e-14
REFINE_STEPS = 3


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "linear"
    degree: int = 2
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "polynomial", "gaussian"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "polynomial" and (int(self.degree) != self.degree or self.degree < 1):
            raise ValueError("polynomial degree must be a positive integer")
        if self.kind == "gaussian" and not self.width > 0:
            raise ValueError("gaussian width must be positive")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    @classmethod
    def polynomial(cls, degree: int) -> "KernelSpec":
        return cls("polynomial", degree=degree)

    @classmethod
    def gaussian(cls, width: float) -> "KernelSpec":
        return cls("gaussian", width=width)


LINEAR = KernelSpec.linear()


def _points(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        p = p.reshape(-1, 1)
    if p.ndim != 2:
        raise DimensionError(f"points must be a 2-D array (count x dim), got shape {p.shape}")
    return p


def gram(spec: KernelSpec, rows, cols) -> np.ndarray:
    """Matrix of kernel values ``K(rows[i], cols[j])``."""
    R, C = _points(rows), _points(cols)
    if R.shape[1] != C.shape[1]:
        raise DimensionError(f"point dimensions differ: {R.shape[1]} vs {C.shape[1]}")
    if spec.kind == "linear":
        return R @ C.T
    if spec.kind == "polynomial":
        return (1.0 + R @ C.T) ** int(spec.degree)
    return np.exp(-cdist(R, C, "sqeuclidean") / spec.width**2)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DimensionError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(gram(spec, x[None, :], y[None, :])[0, 0])


@dataclass
class RidgeProblem:
    """Data of one (or several stacked) kernel ridge regressions.

    ``targets`` may be a vector or an ``(N, r)`` array of ``r`` right-hand
    sides sharing the same points and ``gamma``.
    """

    evaluation_points: np.ndarray
    targets: np.ndarray
    gamma: float
    expansion_points: Optional[np.ndarray] = None
    sample_count: Optional[int] = None

    def __post_init__(self):
        self.evaluation_points = _points(self.evaluation_points)
        self.targets = np.asarray(self.targets, dtype=float)
        if self.targets.shape[0] != self.evaluation_points.shape[0]:
            raise DimensionError(
                f"{self.evaluation_points.shape[0]} evaluation points but "
                f"{self.targets.shape[0]} targets"
            )
        if self.expansion_points is not None:
            self.expansion_points = _points(self.expansion_points)
            if self.expansion_points.shape[1] != self.evaluation_points.shape[1]:
                raise DimensionError("expansion and evaluation points differ in dimension")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.sample_count is None:
            self.sample_count = self.evaluation_points.shape[0]

    @property
    def N(self) -> int:
        return self.evaluation_points.shape[0]


@dataclass
class RidgeSolution:
    coefficients: np.ndarray
    expansion_points: np.ndarray
    kernel: KernelSpec
    gamma: float
    condition_estimate: float

    def __call__(self, points) -> np.ndarray:
        """Evaluate the fitted expansion ``sum_j c_j K(e_j, x)`` at ``points``."""
        return gram(self.kernel, points, self.expansion_points) @ self.coefficients

    def linear_weights(self) -> np.ndarray:
        """Coefficients ``a`` with ``f(x) = a . x`` (linear kernel only)."""
        if self.kernel.kind != "linear":
            raise ValueError("linear weights only exist for the linear kernel")
        return self.expansion_points.T @ self.coefficients


def regularized_system(problem: RidgeProblem, kernel: KernelSpec, mode: str = "representer"):
    """Return ``(N*gamma*I + K, expansion_points)`` for ``problem``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "representer":
        E = problem.evaluation_points
    else:
        if problem.expansion_points is None:
            raise ValueError("paper-literal mode needs explicit expansion points")
        E = problem.expansion_points
    if E.shape[0] != problem.N:
        raise DimensionError(
            f"need as many expansion points as samples ({E.shape[0]} vs {problem.N})"
        )
    if problem.N < 1:
        raise ValueError("need at least one sample")
    K = gram(kernel, problem.evaluation_points, E)
    M = K + problem.sample_count * problem.gamma * np.eye(problem.N)
    return M, K, E


def _refine(M, y, c, solve, steps: int = REFINE_STEPS):
    """Iterative refinement with residuals accumulated in extended precision.

    Keeps the forward error near machine precision for condition numbers up
    to roughly 1/eps instead of eps*cond; stops as soon as a step no longer
    shrinks the residual.
    """
    Ml, yl = M.astype(np.longdouble), np.asarray(y, dtype=np.longdouble)
    res = lambda v: yl - Ml @ v.astype(np.longdouble)
    r = res(c)
    rn = np.max(np.abs(r))
    for _ in range(steps):
        if rn == 0:
            break
        trial = c + solve(r.astype(float))
        rt = res(trial)
        rtn = np.max(np.abs(rt))
        if not rtn < rn:
            break
        c, r, rn = trial, rt, rtn
    return c


def ridge_solve(
    problem: RidgeProblem,
    kernel: KernelSpec = LINEAR,
    mode: str = "representer",
    max_condition: float = MAX_CONDITION,
) -> RidgeSolution:
    """Solve ``(N*gamma*I + K) c = y`` by LU with partial pivoting.

    Falls back to Householder QR when an LU pivot is tiny relative to
    ``||K||``.  Raises :class:`IllConditionedError` when the 1-norm condition
    estimate exceeds ``max_condition``.
    """
    M, K, E = regularized_system(problem, kernel, mode)
    if not np.all(np.isfinite(M)):
        raise IllConditionedError(np.inf, "system matrix is not finite")
    with warnings.catch_warnings():
        # exact singularity is reported through the condition estimate below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    anorm = np.linalg.norm(M, 1)
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 or info != 0 else 1.0 / rcond
    if not cond <= max_condition:
        raise IllConditionedError(cond, "try a larger gamma or trajectory rescaling")
    y = problem.targets
    if np.min(np.abs(np.diag(lu))) < PIVOT_RTOL * np.linalg.norm(K, 1):
        Q, R = sla.qr(M)
        c = sla.solve_triangular(R, Q.T @ y)
    else:
        c = sla.lu_solve((lu, piv), y, check_finite=False)
        c = _refine(M, y, c, lambda r: sla.lu_solve((lu, piv), r, check_finite=False))
    return RidgeSolution(
        coefficients=c,
        expansion_points=E,
        kernel=kernel,
        gamma=problem.gamma,
        condition_estimate=float(cond),
    )
