"""Discrete algebraic Riccati equation and LQR state feedback.

The DARE ``P = A'(P - PB(R + B'PB)^-1 B'P)A + Q`` is solved by value
iteration from ``P0 = Q``.  The optimal input is ``u(k) = -F x(k)`` with
``F = (R + B'PB)^-1 B'PA``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError
from .spectral import Spectrum, eigenvalues


@dataclass
class LqrProblem:
    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        self.B = B.reshape(-1, 1) if B.ndim == 1 else np.atleast_2d(B)
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        self.R = np.atleast_2d(np.asarray(self.R, dtype=float))
        n, m = self.B.shape
        if self.A.shape != (n, n):
            raise DimensionError(f"A must be {n}x{n} to match B, got {self.A.shape}")
        if self.Q.shape != (n, n) or self.R.shape != (m, m):
            raise DimensionError("Q must be n x n and R m x m")
        if not np.allclose(self.Q, self.Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(self.Q).max())):
            raise ValueError("Q must be symmetric")
        if not np.allclose(self.R, self.R.T, rtol=0, atol=1e-12 * max(1.0, np.abs(self.R).max())):
            raise ValueError("R must be symmetric")
        if np.linalg.eigvalsh(self.Q).min() < -1e-10:
            raise ValueError("Q must be positive semidefinite")
        if np.linalg.eigvalsh(self.R).min() <= 0:
            raise ValueError("R must be positive definite")

    @classmethod
    def identity_weights(cls, A, B) -> "LqrProblem":
        B = np.asarray(B, dtype=float)
        B = B.reshape(-1, 1) if B.ndim == 1 else np.atleast_2d(B)
        return cls(A, B, np.eye(B.shape[0]), np.eye(B.shape[1]))


@dataclass
class DareResult:
    P: np.ndarray
    F: np.ndarray
    closed_loop: np.ndarray
    spectrum: Spectrum
    residual: float
    iterations: int


def riccati_map(prob: LqrProblem, P: np.ndarray) -> np.ndarray:
    A, B = prob.A, prob.B
    S = prob.R + B.T @ P @ B
    PB = P @ B
    try:
        inner = P - PB @ np.linalg.solve(S, PB.T)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("R + B'PB is singular") from exc
    return A.T @ inner @ A + prob.Q


def dare_residual(prob: LqrProblem, P: np.ndarray) -> float:
    """Frobenius norm of ``riccati_map(P) - P``."""
    return float(np.linalg.norm(riccati_map(prob, P) - P, "fro"))


def lqr_gain(prob: LqrProblem, P) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    S = prob.R + prob.B.T @ P @ prob.B
    try:
        return np.linalg.solve(S, prob.B.T @ P @ prob.A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("R + B'PB is singular") from exc


POLISH_STEPS = 200


def _fro(M: np.ndarray) -> float:
    # scaled so that iterates near 1e154 do not overflow the sum of squares
    s = np.max(np.abs(M))
    return float(s * np.linalg.norm(M / s, "fro")) if s > 0 and np.isfinite(s) else float(s)


def solve_dare(prob: LqrProblem, tol: float = 1e-12, max_iter: int = 100_000, callback=None) -> DareResult:
    """Value iteration ``P <- riccati_map(P)`` from ``P = Q``, symmetrized every step.

    ``callback(k, P_k)``, if given, sees every iterate.
    """
    P = prob.Q.copy()
    for it in range(1, max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            P_next = riccati_map(prob, P)
        P_next = 0.5 * (P_next + P_next.T)
        if not np.all(np.isfinite(P_next)):
            raise ConvergenceError(
                f"Riccati iteration diverged after {it} steps; (A, B) is likely not stabilizable", it
            )
        step = _fro(P_next - P)
        P = P_next
        if callback is not None:
            callback(it, P)
        if step <= tol * max(1.0, _fro(P)):
            break
    else:
        raise ConvergenceError(
            f"Riccati iteration did not converge in {max_iter} steps "
            f"(last step {step:.3e}); (A, B) may not be stabilizable",
            max_iter,
        )
    # keep stepping while the update still shrinks: pushes the residual
    # from tol*||P|| down to round-off at the cost of a few iterations
    for _ in range(POLISH_STEPS):
        P_next = riccati_map(prob, P)
        P_next = 0.5 * (P_next + P_next.T)
        new_step = _fro(P_next - P)
        if not new_step < step:
            break
        P, step, it = P_next, new_step, it + 1
        if callback is not None:
            callback(it, P)
    F = lqr_gain(prob, P)
    closed = prob.A - prob.B @ F
    return DareResult(
        P=P,
        F=F,
        closed_loop=closed,
        spectrum=eigenvalues(closed),
        residual=dare_residual(prob, P),
        iterations=it,
    )


@dataclass
class ClosedLoop:
    spectrum: Spectrum
    stable: bool


def closed_loop_analysis(A, B, F) -> ClosedLoop:
    """Spectrum of ``A - B F`` and whether it is Schur stable."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    B = B.reshape(-1, 1) if B.ndim == 1 else np.atleast_2d(B)
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if B.shape[0] != A.shape[0] or F.shape != (B.shape[1], A.shape[0]):
        raise DimensionError(f"incompatible shapes A{A.shape}, B{B.shape}, F{F.shape}")
    spec = eigenvalues(A - B @ F)
    return ClosedLoop(spec, spec.radius < 1.0)


@dataclass
class CostResult:
    cost: float
    diverged: bool


def lqr_cost(prob: LqrProblem, x0, F, horizon: int) -> CostResult:
    """Finite-horizon cost ``sum_{k<horizon} x'Qx + u'Ru`` under ``u = -F x``.

    An unstable closed loop returns ``cost=inf`` with ``diverged=True``.
    """
    x = np.asarray(x0, dtype=float).ravel()
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if x.shape[0] != prob.A.shape[0] or F.shape != (prob.B.shape[1], prob.A.shape[0]):
        raise DimensionError("x0 or F has the wrong shape")
    closed = prob.A - prob.B @ F
    if eigenvalues(closed).radius >= 1.0:
        return CostResult(np.inf, True)
    # x'Qx + u'Ru with u = -Fx
    W = prob.Q + F.T @ prob.R @ F
    total = 0.0
    for _ in range(horizon):
        total += x @ W @ x
        x = closed @ x
    return CostResult(float(total), False)
