"""Bundled example configurations and their pass/fail checks."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Dict, List, Optional

import numpy as np

from .experiment import ExperimentConfig, run

EXAMPLE_IDS = ("1", "3", "4", "4b", "5", "6", "7", "8", "9", "10", "11", "12", "13", "14")


@dataclass
class Check:
    name: str
    value: float
    target: str
    tol: float
    passed: bool

    def __post_init__(self):
        self.value = float(self.value)
        self.passed = bool(self.passed)


def load_bundle(example_id: str) -> Dict[str, ExperimentConfig]:
    if example_id not in EXAMPLE_IDS:
        raise KeyError(f"unknown example id {example_id!r}; choose from {', '.join(EXAMPLE_IDS)}")
    text = resources.files(__package__).joinpath("repro_configs", f"example_{example_id}.json").read_text()
    raw = json.loads(text)
    return {k: ExperimentConfig.model_validate(v) for k, v in raw["experiments"].items()}


def _A(rep):
    return np.array(rep["identification"]["A_hat"])


def _B(rep):
    return np.array(rep["identification"]["B_hat"])


def _spec(pairs):
    return np.array([complex(p["re"], p["im"]) for p in pairs])


def spectrum_mismatch(got, want) -> float:
    """Largest distance under the best one-to-one matching of two eigenvalue lists."""
    got, want = np.asarray(got, dtype=complex), np.asarray(want, dtype=complex)
    if got.size != want.size:
        return math.inf
    return min(
        float(np.max(np.abs(got[list(p)] - want))) for p in itertools.permutations(range(got.size))
    )


def nearest_distance(got, targets) -> float:
    """Largest distance from each target to its closest eigenvalue."""
    got = np.asarray(got, dtype=complex)
    return float(max(np.min(np.abs(got - t)) for t in targets))


def _leq(name, value, tol, target="<= tol"):
    return Check(name, float(value), target, tol, bool(value <= tol))


def _checks_1(r):
    return [
        _leq("fixed gamma: |a_hat - 0.4997|", abs(_A(r["fixed"])[0, 0] - 0.4997), 1e-3),
        _leq("cv: |a_hat - 0.5|", abs(_A(r["cv"])[0, 0] - 0.5), 1e-3),
        _leq("cv: tail error energy k=100..300", r["cv"]["compare"]["tail_energy"], 1e-20),
    ]


def _checks_3(r):
    A = np.array(r["cv"]["config"]["system"]["A"])
    return [
        _leq("||A_hat - A||_max", np.max(np.abs(_A(r["cv"]) - A)), 1e-2),
        _leq("tail error energy k=100..300", r["cv"]["compare"]["tail_energy"], 1e-8),
    ]


def _checks_4(r):
    out = [_leq("|sigma - 11.46|", abs(r["cv"]["identification"]["sigma"] - 11.46), 1e-12)]
    for k in ("fixed", "cv"):
        a = _A(r[k])[0, 0]
        out.append(Check(f"{k}: a_hat in [11.40, 11.47]", a, "[11.40, 11.47]", 0.0, 11.40 <= a <= 11.47))
    return out


def _max_err(name, tol):
    def f(r):
        out = []
        for key, rep in r.items():
            A = np.array(rep["config"]["system"]["A"])
            out.append(_leq(f"{key}: ||A_hat - A||_max", np.max(np.abs(_A(rep) - A)), tol))
        return out
    return f


def _spec_check(target):
    def f(r):
        got = _spec(r["cv"]["spectra"]["A_hat"])
        return [_leq("spec(A_hat) vs printed spectrum", spectrum_mismatch(got, target), 1e-2)]
    return f


def _checks_8(r):
    out = []
    for key, true_h, est_h in (("ex6", 34.80, 34.7999), ("ex7", 55.30, 55.3008)):
        ent = r[key]["entropy"]
        out.append(_leq(f"{key}: |h_paper(A) - {true_h}|", abs(ent["paper"]["A"] - true_h), 1e-6))
        out.append(_leq(f"{key}: |h_paper(A_hat) - {est_h}|", abs(ent["paper"]["A_hat"] - est_h), 1e-2))
        ev = np.abs(_spec(r[key]["spectra"]["A_hat"]))
        oracle = float(sum(math.log(v) for v in ev if v > 1))
        out.append(_leq(f"{key}: h_bowen(A_hat) vs direct log-sum", abs(ent["bowen"]["A_hat"] - oracle), 1e-10))
    return out


def _ctrl_err(tol, spec_targets=None, spec_tol=None):
    def f(r):
        rep = r["cv"]
        A = np.array(rep["config"]["system"]["A"])
        B = np.array(rep["config"]["system"]["B"])
        out = [
            _leq("||A_hat - A||_max", np.max(np.abs(_A(rep) - A)), tol),
            _leq("||B_hat - B||_max", np.max(np.abs(_B(rep) - B)), tol),
        ]
        if spec_targets is not None:
            got = _spec(rep["spectra"]["A_hat"])
            out.append(_leq("spec(A_hat) near {-20, 1, 20}", nearest_distance(got, spec_targets), spec_tol))
        return out
    return f


def _checks_12(r):
    st = r["cv"]["stabilize"]
    true_cl = _spec(st["true_design"]["closed_loop"])[0].real
    est_cl = _spec(st["estimate_design"]["estimated_closed_loop"])[0].real
    return [
        _leq("a - bF (true design) vs -0.0643", abs(true_cl + 0.0643), 5e-4),
        _leq("A_hat - B_hat F_hat vs -0.0643", abs(est_cl + 0.0643), 1e-3),
    ]


def _checks_13(r):
    st = r["cv"]["stabilize"]["estimate_design"]
    got = _spec(st["estimated_closed_loop"])
    return [
        _leq("spec(A_hat - B_hat F_hat) vs {-0.6172, 0.4049, -0.0018}",
             spectrum_mismatch(got, [-0.6172, 0.4049, -0.0018]), 1e-3),
        Check("A - B F_hat stabilized", st["true_closed_loop_radius"], "< 1", 1.0, bool(st["stabilizes_plant"])),
    ]


def _checks_14(r):
    st = r["cv"]["stabilize"]["estimate_design"]
    got = _spec(st["true_closed_loop"])
    return [
        Check("A - B F_hat NOT stabilized", st["true_closed_loop_radius"], ">= 1", 1.0,
              not st["stabilizes_plant"]),
        _leq("spec(A - B F_hat) vs {-0.1234 +- 2.0777i, 0.5279}",
             spectrum_mismatch(got, [-0.1234 + 2.0777j, -0.1234 - 2.0777j, 0.5279]), 1e-2),
    ]


CHECKS: Dict[str, Callable[[dict], List[Check]]] = {
    "1": _checks_1,
    "3": _checks_3,
    "4": _checks_4,
    "4b": _max_err("4b", 1e-3),
    "5": _max_err("5", 1e-3),
    "6": _spec_check([-21.9, 10.4, -1.5, 1.0]),
    "7": _spec_check([-40.0, 15.3, 0.5, -0.4]),
    "8": _checks_8,
    "9": _ctrl_err(1e-4),
    "10": _ctrl_err(1e-3),
    "11": _ctrl_err(0.5, [-20, 1, 20], 0.3),
    "12": _checks_12,
    "13": _checks_13,
    "14": _checks_14,
}


def run_example(example_id: str, overrides: Optional[Callable] = None, tol: Optional[float] = None):
    """Run every experiment of a bundled example; returns ``(reports, checks)``.

    ``overrides`` maps a config to a modified config (CLI flags); ``tol``
    replaces every numeric tolerance.
    """
    bundle = load_bundle(example_id)
    reports = {}
    for key, cfg in bundle.items():
        if overrides is not None:
            cfg = overrides(cfg)
        reports[key] = run(cfg)
    checks = CHECKS[example_id](reports)
    if tol is not None:
        for c in checks:
            if c.target == "<= tol":
                c.tol = tol
                c.passed = bool(c.value <= tol)
    return reports, checks
