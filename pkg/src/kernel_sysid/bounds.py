"""Finite-sample error bound for weighted kernel least squares.

With expansion set ``t``, sample set ``x``, weights ``w`` and the operator
``O = K_tx D_w K_xt + gamma K_tt`` the sample error is bounded by

    eps = kappa * s2 * alpha_inv(2 ||K_tt L|| ||L|| B**2 / (kappa * s2) * log(1/delta))

where ``L = O^-1 K_tx D_w^(1/2)``, ``kappa = ||K_tt|| ||O^-1||**2``,
``B = (sum w M**2)**(1/2)`` and ``s2 = sum w sigma_x**2``; ``alpha(u) = (u-1) log u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, IllConditionedError
from .kernels import LINEAR, KernelSpec, RidgeProblem, gram

SVD_LIMIT = 500
POWER_RTOL = 1e-10


def alpha(u: float) -> float:
    if not u > 1:
        raise ValueError(f"alpha is defined for u > 1, got {u}")
    # log1p keeps the (u-1)**2 behaviour near 1
    return (u - 1.0) * math.log1p(u - 1.0)


def alpha_inverse(v: float) -> float:
    """The ``u >= 1`` with ``alpha(u) = v``, by bracketing bisection."""
    if v < 0 or not math.isfinite(v):
        raise ValueError(f"alpha_inverse needs a finite v >= 0, got {v}")
    if v == 0:
        return 1.0
    lo, hi = 1.0, max(2.0, v / math.log(2.0) + 2.0)
    while alpha(hi) < v:
        lo, hi = hi, 2.0 * hi
    tol = 1e-12 * max(1.0, v)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        a = alpha(mid)
        if abs(a - v) <= tol * 1e-3:
            return mid
        if a < v:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def spectral_norm(M) -> float:
    """Largest singular value; power iteration on ``M'M`` for large matrices."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0.0
    if max(M.shape) <= SVD_LIMIT:
        return float(np.linalg.svd(M, compute_uv=False)[0])
    v = np.random.Generator(np.random.PCG64(0)).standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(10_000):
        w = M.T @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        new = math.sqrt(nw)
        v = w / nw
        if abs(new - est) <= POWER_RTOL * new:
            return new
        est = new
    return est


@dataclass
class BoundInputs:
    K_tt: np.ndarray
    K_tx: np.ndarray
    weights: np.ndarray
    gamma: float
    noise_bounds: np.ndarray
    sigma_w2: float
    delta: float

    def __post_init__(self):
        self.K_tt = np.atleast_2d(np.asarray(self.K_tt, dtype=float))
        self.K_tx = np.atleast_2d(np.asarray(self.K_tx, dtype=float))
        t, m = self.K_tx.shape
        if self.K_tt.shape != (t, t):
            raise DimensionError(f"K_tt must be {t}x{t}, got {self.K_tt.shape}")
        self.weights = np.broadcast_to(np.asarray(self.weights, dtype=float), (m,)).copy()
        self.noise_bounds = np.broadcast_to(np.asarray(self.noise_bounds, dtype=float), (m,)).copy()
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.sigma_w2 < 0:
            raise ValueError("sigma_w2 must be nonnegative")
        if not np.isfinite(self.B_w):
            raise ValueError("B_w is not finite")

    @property
    def B_w(self) -> float:
        return float(math.sqrt(np.sum(self.weights * self.noise_bounds**2)))


@dataclass
class BoundResult:
    epsilon: float
    kappa: float
    L_norm: float
    KL_norm: float
    B_w: float
    sigma_w2: float
    argument: float
    degenerate: bool = False

    def table(self) -> list:
        return [
            ("kappa", self.kappa),
            ("||L_w||", self.L_norm),
            ("B_w", self.B_w),
            ("sigma_w^2", self.sigma_w2),
            ("eps_samp", self.epsilon),
        ]


def sample_error_bound(inp: BoundInputs) -> BoundResult:
    D = inp.weights
    O = (inp.K_tx * D) @ inp.K_tx.T + inp.gamma * inp.K_tt
    try:
        O_inv = np.linalg.inv(O)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(np.inf, "regularized operator is singular") from exc
    cond = np.linalg.cond(O)
    if not np.isfinite(cond) or cond > 1e16:
        raise IllConditionedError(float(cond), "regularized operator is singular")
    L = O_inv @ (inp.K_tx * np.sqrt(D))
    L_norm = spectral_norm(L)
    KL_norm = spectral_norm(inp.K_tt @ L)
    kappa = spectral_norm(inp.K_tt) * spectral_norm(O_inv) ** 2
    B_w = inp.B_w
    if inp.sigma_w2 == 0 or kappa == 0:
        return BoundResult(0.0, kappa, L_norm, KL_norm, B_w, inp.sigma_w2, math.inf, True)
    scale = kappa * inp.sigma_w2
    arg = 2.0 * KL_norm * L_norm * B_w**2 / scale * math.log(1.0 / inp.delta)
    eps = scale * alpha_inverse(arg)
    return BoundResult(eps, kappa, L_norm, KL_norm, B_w, inp.sigma_w2, arg)


def bound_inputs_from_problem(
    problem: RidgeProblem,
    noise_amplitude: float,
    delta: float,
    kernel: KernelSpec = LINEAR,
    expansion_points: Optional[np.ndarray] = None,
) -> BoundInputs:
    """Defaults: ``t`` = expansion points, ``x`` = evaluation points, ``w = 1/m``,
    ``M_x`` = noise amplitude and ``sigma_x**2 = M**2/3`` (uniform noise)."""
    X = problem.evaluation_points
    T = expansion_points if expansion_points is not None else problem.expansion_points
    if T is None:
        T = X
    m = X.shape[0]
    w = np.full(m, 1.0 / m)
    M = np.full(m, float(noise_amplitude))
    return BoundInputs(
        K_tt=gram(kernel, T, T),
        K_tx=gram(kernel, T, X),
        weights=w,
        gamma=problem.gamma,
        noise_bounds=M,
        sigma_w2=float(np.sum(w * M**2 / 3.0)),
        delta=delta,
    )
