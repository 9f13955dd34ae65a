"""Hold-out cross-validation of the per-row regularization parameter."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import IllConditionedError
from .sysid import IdentConfig, RegressionData, _choose_sigma, _identify, fit_rows, regression_data


# validation errors below this fraction of the prediction scale are round-off
RESOLUTION_RTOL = 1e-13


def default_grid(lo: int = -50, hi: int = 50) -> np.ndarray:
    return np.power(2.0, np.arange(lo, hi + 1))


@dataclass(frozen=True)
class CvConfig:
    grid: tuple = tuple(default_grid())
    holdout_fraction: float = 0.3
    split: str = "random"
    seed: int = 0

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0:
            raise ValueError("gamma grid is empty")
        if np.any(g < 0) or np.any(np.diff(g) <= 0):
            raise ValueError("gamma grid must be nonnegative and strictly increasing")
        if not 0 < self.holdout_fraction < 1:
            raise ValueError("holdout_fraction must lie in (0, 1)")
        if self.split not in ("tail", "random"):
            raise ValueError("split must be 'tail' or 'random'")
        object.__setattr__(self, "grid", tuple(float(v) for v in g))

    @classmethod
    def powers_of_two(cls, lo: int = -50, hi: int = 50, **kw) -> "CvConfig":
        return cls(grid=tuple(default_grid(lo, hi)), **kw)


@dataclass
class CvReport:
    grid: np.ndarray
    chosen_gamma: np.ndarray
    validation_mse: np.ndarray  # (n_rows, n_grid); inf where ill-conditioned, 0 below resolution
    raw_mse: np.ndarray
    condition: np.ndarray  # (n_rows, n_grid)
    train_index: np.ndarray
    holdout_index: np.ndarray
    split: str
    sigma: float

    def describe_split(self) -> dict:
        return {
            "split": self.split,
            "train": int(self.train_index.size),
            "holdout": int(self.holdout_index.size),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.validation_mse.shape[0]
        w.writerow(["gamma"] + [f"row{i + 1}" for i in range(n)])
        for j, g in enumerate(self.grid):
            w.writerow([repr(float(g))] + [repr(float(v)) for v in self.validation_mse[:, j]])
        return buf.getvalue()


def split_indices(count: int, cfg: CvConfig):
    n_val = int(round(cfg.holdout_fraction * count))
    n_val = min(max(n_val, 1), count - 1)
    if cfg.split == "tail":
        idx = np.arange(count)
    else:
        idx = np.random.Generator(np.random.PCG64(cfg.seed)).permutation(count)
    train, val = np.sort(idx[: count - n_val]), np.sort(idx[count - n_val :])
    return train, val


def cross_validate(traj, cfg: Optional[CvConfig] = None, ident_cfg: IdentConfig = IdentConfig()):
    """Choose ``gamma_i`` per state row by hold-out one-step prediction error.

    Every grid value is fitted on the training pairs and scored by the mean
    squared one-step error on the held-out pairs; the argmin (smallest gamma
    on ties) is then refitted on all pairs.  Errors below the floating-point
    resolution of the held-out predictions count as exact ties at zero.  If
    the refit at the winning gamma is ill-conditioned, the row falls back to
    its next-best finite candidate.

    Returns ``(IdentResult, CvReport)``.
    """
    cfg = cfg or CvConfig()
    controlled = traj.inputs is not None
    sigma = _choose_sigma(traj, ident_cfg, extended=controlled)
    data = regression_data(traj, sigma, ident_cfg.mode, ident_cfg.scale_initial)
    count, dim = data.points.shape
    train, val = split_indices(count, cfg)
    if min(train.size, val.size) < dim + 1:
        raise ValueError(
            f"degenerate split: {train.size} training / {val.size} held-out pairs, "
            f"each part needs at least {dim + 1}"
        )
    grid = np.asarray(cfg.grid)
    n = data.n
    raw = np.full((n, grid.size), np.inf)
    floor = np.zeros((n, grid.size))
    cond = np.full((n, grid.size), np.inf)
    Zv, Tv = data.points[val], data.targets[val]
    zscale = np.mean(np.sum(Zv**2, axis=1))
    for j, g in enumerate(grid):
        try:
            theta, c = fit_rows(
                data, np.full(n, g), ident_cfg.mode, ident_cfg.kernel, rows=train,
                max_condition=ident_cfg.max_condition,
            )
        except IllConditionedError as exc:
            cond[:, j] = exc.condition
            continue
        resid = Tv - Zv @ theta.T
        raw[:, j] = np.mean(resid**2, axis=0)
        # all rows share one solve, so round-off scales with the whole coefficient matrix
        floor[:, j] = RESOLUTION_RTOL**2 * np.sum(theta**2) * zscale
        cond[:, j] = c
    mse = np.where(raw <= floor, 0.0, raw)
    if not np.all(np.any(np.isfinite(mse), axis=1)):
        listing = ", ".join(f"{g:.3g}: {c:.2e}" for g, c in zip(grid, cond[0]))
        raise IllConditionedError(float(np.min(cond)), f"every grid value failed ({listing})")
    chosen = _refittable_choice(data, grid, mse, ident_cfg)
    report = CvReport(grid, chosen, mse, raw, cond, train, val, cfg.split, sigma)
    result = _identify(traj, replace(ident_cfg, gamma=tuple(chosen)), controlled)
    result.cv_report = report
    return result, report


def _refittable_choice(data: RegressionData, grid, mse, ident_cfg: IdentConfig) -> np.ndarray:
    chosen = np.empty(data.n)
    for i in range(data.n):
        # stable sort keeps grid order among equal scores: ties -> smallest gamma
        order = [j for j in np.argsort(mse[i], kind="stable") if np.isfinite(mse[i, j])]
        row = RegressionData(
            data.points, data.targets[:, [i]],
            None if data.successors is None else data.successors, data.sigma, 1,
        )
        last = None
        for j in order:
            try:
                fit_rows(row, np.array([grid[j]]), ident_cfg.mode, ident_cfg.kernel,
                         max_condition=ident_cfg.max_condition)
            except IllConditionedError as exc:
                last = exc
                continue
            chosen[i] = grid[j]
            break
        else:
            raise IllConditionedError(
                last.condition if last else np.inf,
                f"no grid value gives a well-conditioned refit for row {i + 1}",
            )
    return chosen
