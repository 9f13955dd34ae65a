"""Kernel-regression identification of ``A`` (and ``B``) from trajectories.

Each state component ``i`` is fitted separately: with the linear kernel the
regression ``x_i(k+1) ~ f_i(x(k))`` has the expansion
``f_i(x) = sum_j c_ij <e_j, x>``, so the estimated row is
``a_i = sum_j c_ij e_j``.

Growing trajectories are first mapped to data of the auxiliary system
``A / sigma`` via ``y(k) = x(k) / sigma**(k-1)``; the estimate is then
multiplied back by ``sigma``.  Controlled systems are handled by regressing
on the extended state ``(x(k), u(k))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .dynamics import LinearSystem, Trajectory, simulate_autonomous
from .errors import DimensionError, IllConditionedError, UndefinedSigmaError
from .kernels import LINEAR, MAX_CONDITION, MODES, KernelSpec, RidgeProblem, ridge_solve

RESCALE_THRESHOLD = 1.05


@dataclass(frozen=True)
class IdentConfig:
    """How to identify.

    ``gamma`` is a scalar, a per-row sequence, or ``"cv"`` for hold-out
    cross-validation (see :mod:`kernel_sysid.modelsel`).
    """

    gamma: Union[float, Sequence[float], str] = "cv"
    mode: str = "representer"
    rescale: str = "auto"
    rescale_threshold: float = RESCALE_THRESHOLD
    scale_initial: bool = True
    kernel: KernelSpec = LINEAR
    max_condition: float = MAX_CONDITION
    cv: Optional[object] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.rescale not in ("auto", "never", "always"):
            raise ValueError("rescale must be 'auto', 'never' or 'always'")
        if self.kernel.kind != "linear":
            raise ValueError("matrix extraction requires the linear kernel")
        if isinstance(self.gamma, str):
            if self.gamma != "cv":
                raise ValueError(f"gamma must be numeric or 'cv', got {self.gamma!r}")
        elif np.any(np.asarray(self.gamma, dtype=float) < 0):
            raise ValueError("gamma must be nonnegative")


@dataclass
class IdentResult:
    A_hat: np.ndarray
    B_hat: Optional[np.ndarray]
    gammas: np.ndarray
    sigma: float
    mode: str
    condition_estimates: np.ndarray
    rescaled: bool = False
    cv_report: Optional[object] = None
    extras: dict = field(default_factory=dict)


def _row_norms(P: np.ndarray) -> np.ndarray:
    # scaled to avoid overflow of squares for states near 1e160 and above
    scale = np.max(np.abs(P), axis=1)
    out = np.zeros(P.shape[0])
    nz = scale > 0
    out[nz] = scale[nz] * np.linalg.norm(P[nz] / scale[nz, None], axis=1)
    return out


def _extended_points(traj: Trajectory, count: int) -> np.ndarray:
    if traj.inputs is None:
        return traj.states[:count]
    return np.hstack([traj.states[:count], traj.inputs[:count]])


def compute_sigma(traj: Trajectory, extended: bool = False) -> float:
    """Largest successive norm ratio ``||x(k+1)|| / ||x(k)||``.

    With ``extended=True`` the norms are taken over ``(x(k), u(k))`` for the
    indices where the input is known.
    """
    if extended and traj.inputs is not None:
        P = _extended_points(traj, min(traj.N + 1, traj.inputs.shape[0]))
    else:
        P = traj.states
    if P.shape[0] < 2:
        raise UndefinedSigmaError("need at least two states to compute sigma")
    norms = _row_norms(P)
    den = norms[:-1]
    ok = den > 0
    if not np.any(ok):
        raise UndefinedSigmaError("sigma is undefined for an all-zero trajectory")
    return float(np.max(norms[1:][ok] / den[ok]))


def _scales(count: int, sigma: float, scale_initial: bool) -> np.ndarray:
    k = np.arange(count, dtype=float)
    # noisy data can give a large sigma; late samples then scale to 0
    with np.errstate(over="ignore"):
        s = 1.0 / np.power(sigma, k - 1.0)
    if not scale_initial:
        s[0] = 1.0
    return s


def rescale_trajectory(traj: Trajectory, sigma: float, scale_initial: bool = True) -> Trajectory:
    """Map data to the auxiliary system ``A/sigma``: ``y(k) = x(k) / sigma**(k-1)``.

    Inputs are scaled the same way, so ``y(k+1) = (A/sigma) y(k) + (B/sigma) v(k)``
    holds for every ``k >= 0``.  With ``scale_initial=False`` the initial
    state is kept as ``y(0) = x(0)``, which breaks that relation for the
    first sample pair.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    s = _scales(traj.N + 1, sigma, scale_initial)
    inputs = None
    if traj.inputs is not None:
        inputs = traj.inputs * s[: traj.inputs.shape[0], None]
    return Trajectory(
        states=traj.states * s[:, None],
        inputs=inputs,
        noise_amplitude=traj.noise_amplitude,
        noise_seed=traj.noise_seed,
        prng=traj.prng,
        meta={**traj.meta, "sigma": sigma},
    )


def _choose_sigma(traj: Trajectory, cfg: IdentConfig, extended: bool) -> float:
    if cfg.rescale == "never":
        return 1.0
    sigma = compute_sigma(traj, extended=extended)
    if cfg.rescale == "always":
        if sigma <= 0:
            raise UndefinedSigmaError("sigma is zero; the trajectory collapses to the origin")
        return sigma
    return sigma if sigma > cfg.rescale_threshold else 1.0


@dataclass
class RegressionData:
    """Sample pairs after optional rescaling.

    ``points[k]`` is the (extended) regressor at time ``k``, ``targets[k]``
    the successor state, and ``successors[k]`` the (extended) successor
    used as expansion point in paper-literal mode.
    """

    points: np.ndarray
    targets: np.ndarray
    successors: Optional[np.ndarray]
    sigma: float
    n: int


def regression_data(traj: Trajectory, sigma: float, mode: str, scale_initial: bool = True) -> RegressionData:
    t = traj if sigma == 1.0 else rescale_trajectory(traj, sigma, scale_initial)
    N = t.N
    points = _extended_points(t, N)
    targets = t.states[1:]
    successors = None
    if mode == "paper-literal":
        if t.inputs is None:
            successors = t.states[1:]
        else:
            if t.inputs.shape[0] < N + 1:
                raise DimensionError(
                    "paper-literal mode on controlled data needs the input u(N) "
                    "(pass final_input to simulate_controlled)"
                )
            successors = np.hstack([t.states[1:], t.inputs[1 : N + 1]])
    return RegressionData(points, targets, successors, sigma, traj.n)


def fit_rows(
    data: RegressionData,
    gammas: np.ndarray,
    mode: str,
    kernel: KernelSpec = LINEAR,
    rows: Optional[slice] = None,
    max_condition: float = MAX_CONDITION,
):
    """Fit every state row; returns ``(Theta, conds)`` with ``Theta`` of shape ``(n, n+m)``.

    ``rows`` restricts the sample pairs used (e.g. a training split).
    """
    sl = slice(None) if rows is None else rows
    Z = data.points[sl]
    T = data.targets[sl]
    E = None if data.successors is None else data.successors[sl]
    n = data.n
    theta = np.zeros((n, Z.shape[1]))
    conds = np.zeros(n)
    for g in np.unique(gammas):
        idx = np.flatnonzero(gammas == g)
        prob = RidgeProblem(evaluation_points=Z, targets=T[:, idx], gamma=float(g), expansion_points=E)
        sol = ridge_solve(prob, kernel, mode, max_condition=max_condition)
        theta[idx] = sol.linear_weights().T
        conds[idx] = sol.condition_estimate
    return theta, conds


def _gammas(cfg: IdentConfig, n: int) -> np.ndarray:
    g = np.asarray(cfg.gamma, dtype=float).ravel()
    if g.size == 1:
        g = np.full(n, g[0])
    if g.size != n:
        raise DimensionError(f"need one gamma per state row ({n}), got {g.size}")
    return g


def _identify(traj: Trajectory, cfg: IdentConfig, controlled: bool) -> IdentResult:
    if isinstance(cfg.gamma, str):
        from .modelsel import cross_validate

        result, _ = cross_validate(traj, cfg.cv, cfg)
        return result
    n = traj.n
    sigma = _choose_sigma(traj, cfg, extended=controlled)
    data = regression_data(traj, sigma, cfg.mode, cfg.scale_initial)
    gammas = _gammas(cfg, n)
    try:
        theta, conds = fit_rows(data, gammas, cfg.mode, cfg.kernel, max_condition=cfg.max_condition)
    except IllConditionedError as exc:
        if sigma == 1.0:
            raise IllConditionedError(
                exc.condition, "increase gamma or enable trajectory rescaling (rescale='always')"
            ) from exc
        raise
    theta = theta * sigma
    return IdentResult(
        A_hat=theta[:, :n],
        B_hat=theta[:, n:] if controlled else None,
        gammas=gammas,
        sigma=sigma,
        mode=cfg.mode,
        condition_estimates=conds,
        rescaled=sigma != 1.0,
    )


def estimate_A(traj: Trajectory, cfg: IdentConfig = IdentConfig()) -> IdentResult:
    """Estimate ``A`` from an autonomous trajectory ``x(0..N)``."""
    if traj.inputs is not None:
        raise ValueError("trajectory has inputs; use estimate_AB")
    if traj.N < traj.n + 1:
        raise ValueError(f"need at least n+1={traj.n + 1} sample pairs, got N={traj.N}")
    return _identify(traj, cfg, controlled=False)


def estimate_AB(traj: Trajectory, cfg: IdentConfig = IdentConfig()) -> IdentResult:
    """Estimate ``(A, B)`` by regressing ``x(k+1)`` on ``(x(k), u(k))``."""
    if traj.inputs is None:
        raise ValueError("estimate_AB needs a trajectory with inputs")
    if traj.N < traj.n + traj.m + 1:
        raise ValueError(f"need at least n+m+1={traj.n + traj.m + 1} sample pairs, got N={traj.N}")
    return _identify(traj, cfg, controlled=True)


def predict(A_hat, x0, N: int) -> Trajectory:
    """Noiseless rollout ``xhat(k+1) = A_hat xhat(k)``."""
    return simulate_autonomous(LinearSystem(A_hat), x0, N)
