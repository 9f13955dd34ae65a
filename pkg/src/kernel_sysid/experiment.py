"""Config schema, pipeline and JSON report for batch experiments."""

from __future__ import annotations

import json
import math
import os
import re
import tempfile
import time
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import bounds, lqr, metrics, spectral
from .dynamics import LinearSystem, NoiseSpec, PerturbationSpec, Trajectory, simulate_autonomous, simulate_controlled
from .kernels import KernelSpec, RidgeProblem
from .modelsel import CvConfig
from .sysid import IdentConfig, estimate_A, estimate_AB, predict, regression_data

TASKS = ("identify", "entropy", "stabilize", "bound", "compare")
_CONST = re.compile(r"^constant\((?P<c>[-+0-9.eE]+)\)$")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


class SystemCfg(_Strict):
    A: List[List[float]]
    B: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _shapes(self):
        n = len(self.A)
        if n == 0 or any(len(r) != n for r in self.A):
            raise ValueError("A must be a non-empty square array of arrays")
        if self.B is not None:
            if len(self.B) != n or len({len(r) for r in self.B}) != 1 or len(self.B[0]) == 0:
                raise ValueError(f"B must have {n} rows of equal nonzero length")
        return self


class NoiseCfg(_Strict):
    amplitude: float = Field(ge=0)
    seed: int = Field(default=0, ge=0)


class PerturbationCfg(_Strict):
    epsilon: float


class IdentCfg(_Strict):
    mode: Literal["representer", "paper-literal"] = "representer"
    rescale: Literal["auto", "never", "always"] = "auto"
    gamma: Union[Literal["cv"], float, List[float]] = "cv"


class CvCfg(_Strict):
    lo: int = -50
    hi: int = 50
    holdout_fraction: float = 0.3
    split: Literal["random", "tail"] = "random"
    seed: int = Field(default=0, ge=0)


class LqrCfg(_Strict):
    Q: Optional[List[List[float]]] = None
    R: Optional[List[List[float]]] = None


class CompareCfg(_Strict):
    horizon: int = Field(default=300, ge=1)
    tail_start: int = Field(default=100, ge=0)
    x0: Optional[List[float]] = None


class KernelCfg(_Strict):
    kind: Literal["linear", "polynomial", "gaussian"] = "linear"
    degree: int = 2
    width: float = 1.0


class BoundCfg(_Strict):
    delta: float = 0.05
    gamma: Optional[float] = None
    kernel: KernelCfg = KernelCfg()
    # number of leading sample points used as expansion set; None = all
    # points for nonlinear kernels and the state dimension for the linear one
    expansion_count: Optional[int] = None


class ExperimentConfig(_Strict):
    name: str = "experiment"
    system: SystemCfg
    x0: List[float]
    N: int = Field(ge=1)
    input_signal: Optional[str] = None
    noise: Optional[NoiseCfg] = None
    perturbation: Optional[PerturbationCfg] = None
    ident: IdentCfg = IdentCfg()
    cv: CvCfg = CvCfg()
    lqr: LqrCfg = LqrCfg()
    compare: CompareCfg = CompareCfg()
    bound: BoundCfg = BoundCfg()
    tasks: List[Literal["identify", "entropy", "stabilize", "bound", "compare"]] = ["identify"]

    @field_validator("input_signal")
    @classmethod
    def _signal(cls, v):
        if v is None or v in ("zero", "sin_plus_cos") or _CONST.match(v):
            return v
        raise ValueError("input_signal must be one of zero, sin_plus_cos, constant(c)")

    @model_validator(mode="after")
    def _consistent(self):
        n = len(self.system.A)
        if len(self.x0) != n:
            raise ValueError(f"x0 has length {len(self.x0)}, system has dimension {n}")
        if self.system.B is not None and self.input_signal is None:
            raise ValueError("a controlled system needs input_signal")
        if self.system.B is None and self.input_signal is not None:
            raise ValueError("input_signal given but system has no B")
        if "stabilize" in self.tasks and self.system.B is None:
            raise ValueError("task 'stabilize' needs a controlled system")
        if self.compare.x0 is not None and len(self.compare.x0) != n:
            raise ValueError("compare.x0 has the wrong length")
        return self

    @property
    def n(self) -> int:
        return len(self.system.A)

    @property
    def controlled(self) -> bool:
        return self.system.B is not None

    def linear_system(self) -> LinearSystem:
        B = None if self.system.B is None else np.array(self.system.B, dtype=float)
        return LinearSystem(np.array(self.system.A, dtype=float), B)

    def ident_config(self) -> IdentConfig:
        g = self.ident.gamma
        cv = CvConfig.powers_of_two(
            self.cv.lo, self.cv.hi, holdout_fraction=self.cv.holdout_fraction,
            split=self.cv.split, seed=self.cv.seed,
        )
        return IdentConfig(
            gamma=g if isinstance(g, str) else (tuple(g) if isinstance(g, list) else float(g)),
            mode=self.ident.mode, rescale=self.ident.rescale, cv=cv,
        )


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.model_validate_json(fh.read())


def input_sequence(tag: str, count: int) -> np.ndarray:
    k = np.arange(count, dtype=float)
    if tag == "zero":
        return np.zeros(count)
    if tag == "sin_plus_cos":
        return np.sin(k) + np.cos(k)
    return np.full(count, float(_CONST.match(tag)["c"]))


def simulate(cfg: ExperimentConfig) -> Trajectory:
    sys = cfg.linear_system()
    noise = None if cfg.noise is None else NoiseSpec(cfg.noise.amplitude, cfg.noise.seed)
    if cfg.controlled:
        u = input_sequence(cfg.input_signal, cfg.N + 1)
        return simulate_controlled(sys, cfg.x0, u[: cfg.N], noise=noise, final_input=u[cfg.N])
    pert = None if cfg.perturbation is None else PerturbationSpec(cfg.perturbation.epsilon)
    return simulate_autonomous(sys, cfg.x0, cfg.N, noise=noise, perturb=pert)


def _mat(M):
    return None if M is None else np.asarray(M, dtype=float).tolist()


def _cx(spec: spectral.Spectrum):
    return spec.as_pairs()


def run(cfg: ExperimentConfig, traj: Optional[Trajectory] = None, tasks=None) -> dict:
    """Run the configured tasks and return a JSON-ready report."""
    tasks = list(cfg.tasks if tasks is None else tasks)
    timings = {}
    t0 = time.perf_counter()
    if traj is None:
        traj = simulate(cfg)
    timings["simulate"] = time.perf_counter() - t0
    sys = cfg.linear_system()
    report = {"config": cfg.model_dump(mode="json"), "tasks": tasks}
    ident = None
    need_ident = any(t in tasks for t in ("identify", "stabilize", "compare")) or (
        "entropy" in tasks and "identify" in cfg.tasks
    )
    if need_ident:
        t0 = time.perf_counter()
        icfg = cfg.ident_config()
        ident = estimate_AB(traj, icfg) if cfg.controlled else estimate_A(traj, icfg)
        timings["identify"] = time.perf_counter() - t0
        report["identification"] = {
            "A_hat": _mat(ident.A_hat),
            "B_hat": _mat(ident.B_hat),
            "gammas": ident.gammas.tolist(),
            "sigma": ident.sigma,
            "rescaled": ident.rescaled,
            "mode": ident.mode,
            "condition_estimates": ident.condition_estimates.tolist(),
            "matrix_error": metrics.matrix_distance(sys.A, ident.A_hat).to_dict(),
        }
        if cfg.controlled:
            report["identification"]["B_error"] = float(np.max(np.abs(sys.B - ident.B_hat)))
        if ident.cv_report is not None:
            cv = ident.cv_report
            report["cv"] = {
                **cv.describe_split(),
                "grid_exponents": [cfg.cv.lo, cfg.cv.hi],
                "chosen_gamma": cv.chosen_gamma.tolist(),
                "validation_mse": cv.validation_mse.tolist(),
            }
        report["spectra"] = {
            "A": _cx(spectral.eigenvalues(sys.A)),
            "A_hat": _cx(spectral.eigenvalues(ident.A_hat)),
        }
    if "entropy" in tasks:
        fns = {
            "paper": lambda M: spectral.topological_entropy_paper(M, "printed"),
            "paper_literal": lambda M: spectral.topological_entropy_paper(M, "literal"),
            "bowen": spectral.topological_entropy_bowen,
        }
        ent = {k: {"A": f(sys.A)} for k, f in fns.items()}
        if ident is not None:
            for k, f in fns.items():
                ent[k]["A_hat"] = f(ident.A_hat)
        report["entropy"] = ent
    if "stabilize" in tasks:
        t0 = time.perf_counter()
        report["stabilize"] = _stabilize(cfg, sys, ident)
        timings["stabilize"] = time.perf_counter() - t0
    if "compare" in tasks:
        x0 = cfg.compare.x0 if cfg.compare.x0 is not None else cfg.x0
        H = cfg.compare.horizon
        if cfg.controlled:
            u = input_sequence(cfg.input_signal, H)
            true = simulate_controlled(sys, x0, u).states
            pred = simulate_controlled(LinearSystem(ident.A_hat, ident.B_hat), x0, u).states
        else:
            true = simulate_autonomous(LinearSystem(sys.A), x0, H).states
            pred = predict(ident.A_hat, x0, H).states
        report["compare"] = metrics.compare_trajectories(true, pred, min(cfg.compare.tail_start, H)).to_dict()
    if "bound" in tasks:
        report["bound"] = _bound(cfg, traj, ident)
    report["timings"] = timings
    return report


def _weights(cfg: ExperimentConfig, m: int):
    Q = np.eye(cfg.n) if cfg.lqr.Q is None else np.array(cfg.lqr.Q, dtype=float)
    R = np.eye(m) if cfg.lqr.R is None else np.array(cfg.lqr.R, dtype=float)
    return Q, R


def _stabilize(cfg, sys, ident) -> dict:
    Q, R = _weights(cfg, sys.m)
    true = lqr.solve_dare(lqr.LqrProblem(sys.A, sys.B, Q, R))
    est = lqr.solve_dare(lqr.LqrProblem(ident.A_hat, ident.B_hat, Q, R))
    on_plant = lqr.closed_loop_analysis(sys.A, sys.B, est.F)
    return {
        "Q": Q.tolist(),
        "R": R.tolist(),
        "true_design": {
            "P": true.P.tolist(),
            "F": true.F.tolist(),
            "closed_loop": _cx(true.spectrum),
            "residual": true.residual,
            "iterations": true.iterations,
        },
        "estimate_design": {
            "P_hat": est.P.tolist(),
            "F_hat": est.F.tolist(),
            "residual": est.residual,
            "iterations": est.iterations,
            "estimated_closed_loop": _cx(est.spectrum),
            "true_closed_loop": _cx(on_plant.spectrum),
            "true_closed_loop_radius": on_plant.spectrum.radius,
            "stabilizes_plant": bool(on_plant.stable),
        },
    }


def _bound(cfg, traj, ident) -> dict:
    b = cfg.bound
    sigma = ident.sigma if ident is not None else 1.0
    data = regression_data(traj, sigma, "representer")
    X = data.points
    kern = KernelSpec(b.kernel.kind, b.kernel.degree, b.kernel.width)
    count = b.expansion_count
    if count is None:
        count = X.shape[1] if kern.kind == "linear" else X.shape[0]
    gamma = b.gamma
    if gamma is None:
        gamma = float(np.min(ident.gammas)) if ident is not None else 1e-6
    amp = cfg.noise.amplitude if cfg.noise is not None else 0.0
    prob = RidgeProblem(X, data.targets[:, 0], gamma)
    inp = bounds.bound_inputs_from_problem(prob, amp, b.delta, kern, expansion_points=X[:count])
    res = bounds.sample_error_bound(inp)
    out = {k: v for k, v in res.table()}
    out.update({"delta": b.delta, "gamma": gamma, "degenerate": res.degenerate, "argument": res.argument})
    return out


def dumps(report: dict) -> str:
    # Python float repr is shortest round-trip (<= 17 significant digits)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_atomic(path, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def diff_reports(a, b, rtol: float = 1e-12, atol: float = 0.0, path: str = "", ignore=("timings",)) -> list:
    """Field-wise differences between two parsed reports."""
    out = []
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            if k in ignore:
                continue
            p = f"{path}.{k}" if path else k
            if k not in a or k not in b:
                out.append((p, "missing on one side"))
            else:
                out.extend(diff_reports(a[k], b[k], rtol, atol, p, ignore))
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append((path, f"length {len(a)} vs {len(b)}"))
        else:
            for i, (x, y) in enumerate(zip(a, b)):
                out.extend(diff_reports(x, y, rtol, atol, f"{path}[{i}]", ignore))
    elif isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool):
        fa, fb = float(a), float(b)
        if fa == fb or (math.isnan(fa) and math.isnan(fb)):
            return out
        if not abs(fa - fb) <= atol + rtol * max(abs(fa), abs(fb)):
            out.append((path, f"{fa!r} vs {fb!r}"))
    elif a != b:
        out.append((path, f"{a!r} vs {b!r}"))
    return out
