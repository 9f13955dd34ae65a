"""Error trajectories, error energies, decay fits and matrix distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .spectral import Spectrum, eigenvalues

LOG_FLOOR = 1e-300
FIT_START = 10


def _states(traj) -> np.ndarray:
    s = getattr(traj, "states", traj)
    s = np.asarray(s, dtype=float)
    return s.reshape(-1, 1) if s.ndim == 1 else s


def _energy(err: np.ndarray, lo: int, hi: int) -> float:
    seg = err[lo : hi + 1]
    if seg.size == 0:
        return 0.0
    scale = np.max(np.abs(seg))
    if scale == 0 or not np.isfinite(scale):
        return float(scale)
    return float(scale * np.sqrt(np.sum((seg / scale) ** 2)))


@dataclass
class ErrorReport:
    errors: np.ndarray  # e(k) = x(k) - xhat(k), k = 0..K
    full_energy: float
    tail_energy: float
    tail_start: int
    component_full: np.ndarray
    component_tail: np.ndarray
    decay_rate: float

    @property
    def K(self) -> int:
        return self.errors.shape[0] - 1

    def tail_energy_from(self, k0: int) -> float:
        return _energy(self.errors, k0, self.K)

    def to_dict(self) -> dict:
        return {
            "full_energy": self.full_energy,
            "tail_energy": self.tail_energy,
            "tail_start": self.tail_start,
            "component_full": self.component_full.tolist(),
            "component_tail": self.component_tail.tolist(),
            "decay_rate": self.decay_rate,
            "final_error_norm": float(np.linalg.norm(self.errors[-1])),
        }


def decay_rate(err: np.ndarray, start: int = FIT_START) -> float:
    """``exp`` of the slope of ``log max(||e(k)||, 1e-300)`` against ``k`` for ``k >= start``.

    Short series fall back to the last two samples so a rate is always defined.
    """
    err = np.asarray(err, dtype=float)
    err = err.reshape(err.shape[0], -1)
    K = err.shape[0] - 1
    if K < 1:
        return float("nan")
    start = min(start, K - 1)
    k = np.arange(start, K + 1, dtype=float)
    norms = np.array([_energy(err[i : i + 1], 0, 0) for i in range(start, K + 1)])
    y = np.log(np.maximum(norms, LOG_FLOOR))
    slope = np.polyfit(k, y, 1)[0]
    return float(np.exp(slope))


def compare_trajectories(true_traj, pred_traj, tail_start: int) -> ErrorReport:
    X, Xh = _states(true_traj), _states(pred_traj)
    if X.shape != Xh.shape:
        raise DimensionError(f"trajectory shapes differ: {X.shape} vs {Xh.shape}")
    K = X.shape[0] - 1
    if not 0 <= tail_start <= K:
        raise ValueError(f"tail_start must lie in [0, {K}], got {tail_start}")
    e = X - Xh
    return ErrorReport(
        errors=e,
        full_energy=_energy(e, 1, K),
        tail_energy=_energy(e, tail_start, K),
        tail_start=tail_start,
        component_full=np.array([_energy(e[:, [i]], 1, K) for i in range(e.shape[1])]),
        component_tail=np.array([_energy(e[:, [i]], tail_start, K) for i in range(e.shape[1])]),
        decay_rate=decay_rate(e),
    )


@dataclass
class MatrixDistance:
    max_abs: float
    frobenius: float
    error_spectrum: Spectrum

    def to_dict(self) -> dict:
        return {
            "max_abs": self.max_abs,
            "frobenius": self.frobenius,
            "error_spectrum": self.error_spectrum.as_pairs(),
        }


def matrix_distance(A, A_hat) -> MatrixDistance:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    A_hat = np.atleast_2d(np.asarray(A_hat, dtype=float))
    if A.shape != A_hat.shape:
        raise DimensionError(f"shape mismatch: {A.shape} vs {A_hat.shape}")
    D = A - A_hat
    spec = eigenvalues(D) if D.shape[0] == D.shape[1] else Spectrum(np.array([], dtype=complex))
    return MatrixDistance(float(np.max(np.abs(D))), float(np.linalg.norm(D, "fro")), spec)
