"""Acceptance criteria, one check per criterion.

Each ``criterion_*`` function returns ``(passed, detail)``; the tests assert on
it and the terminal summary prints one PASS/FAIL line per criterion.  Run the
file directly to print the lines without pytest.
"""

import itertools
import math

import numpy as np
import pytest
import scipy.linalg as sla

from kernel_sysid import (
    CvConfig,
    IdentConfig,
    LqrProblem,
    NoiseSpec,
    RidgeProblem,
    BoundInputs,
    alpha,
    alpha_inverse,
    closed_loop_analysis,
    compare_trajectories,
    compute_sigma,
    eigenvalues,
    estimate_A,
    estimate_AB,
    predict,
    ridge_solve,
    sample_error_bound,
    solve_dare,
    topological_entropy_bowen,
    topological_entropy_paper,
)
from kernel_sysid.lqr import dare_residual

from conftest import A3, A4B, A5A, A5B, A6, A7, A10, A11, B10, B11, X0_4, autonomous_traj, controlled_traj, random_stable

MODES = ("representer", "paper-literal")
RESULTS = {}


def cfg(mode, gamma="cv"):
    return IdentConfig(gamma=gamma, mode=mode)


def max_err(A, B):
    return float(np.max(np.abs(np.asarray(A) - np.asarray(B))))


def matched(got, want):
    """Largest eigenvalue distance under the best one-to-one matching."""
    got, want = np.asarray(got, complex), np.asarray(want, complex)
    return min(float(np.max(np.abs(got[list(p)] - want))) for p in itertools.permutations(range(got.size)))


def tail_energy(A, A_hat, x0, K=300, k0=100):
    return compare_trajectories(autonomous_traj(A, x0, K), predict(A_hat, x0, K), k0)


def verdict(checks):
    """``checks``: list of (label, value, ok)."""
    ok = all(c[2] for c in checks)
    detail = "; ".join(f"{lbl}={v:.4g}{'' if good else ' (FAIL)'}" for lbl, v, good in checks)
    return ok, detail


def criterion_1(mode):
    A, x0 = np.array([[0.5]]), [-0.5]
    tr = autonomous_traj(A, x0)
    a_fix = estimate_A(tr, cfg(mode, 1e-6)).A_hat[0, 0]
    a_cv = estimate_A(tr, cfg(mode)).A_hat[0, 0]
    return verdict([
        ("|a_fixed-0.4997|", abs(a_fix - 0.4997), abs(a_fix - 0.4997) <= 1e-3),
        ("|a_cv-0.5|", abs(a_cv - 0.5), abs(a_cv - 0.5) <= 1e-3),
    ])


def criterion_2(mode):
    x0 = [-0.9, 0.1, 15, 0.2]
    A_hat = estimate_A(autonomous_traj(A3, x0), cfg(mode)).A_hat
    e = max_err(A_hat, A3)
    t = tail_energy(A3, A_hat, x0).tail_energy
    return verdict([("max err", e, e <= 1e-2), ("tail energy", t, t <= 1e-8)])


def criterion_3(mode):
    A = np.array([[11.46]])
    tr = autonomous_traj(A, [-0.5])
    s = compute_sigma(tr)
    a_fix = estimate_A(tr, cfg(mode, 1e-6)).A_hat[0, 0]
    a_cv = estimate_A(tr, cfg(mode)).A_hat[0, 0]
    return verdict([
        ("|sigma-11.46|", abs(s - 11.46), abs(s - 11.46) <= 1e-12),
        ("a_fixed", a_fix, 11.40 <= a_fix <= 11.47),
        ("a_cv", a_cv, 11.40 <= a_cv <= 11.47),
    ])


def criterion_4(mode):
    e = max_err(estimate_A(autonomous_traj(A4B, X0_4), cfg(mode)).A_hat, A4B)
    return verdict([("max err", e, e <= 1e-3)])


def criterion_5(mode):
    out = []
    for label, A in (("diag(20,-0.1)", A5A), ("diag(-0.5,25)", A5B)):
        e = max_err(estimate_A(autonomous_traj(A, [-1.9, 1.0]), cfg(mode)).A_hat, A)
        out.append((label, e, e <= 1e-3))
    return verdict(out)


def criterion_6(mode):
    out = []
    for label, A, want in (("ex6", A6, [-21.9, 10.4, -1.5, 1.0]), ("ex7", A7, [-40.0, 15.3, 0.5, -0.4])):
        got = eigenvalues(estimate_A(autonomous_traj(A, X0_4), cfg(mode)).A_hat).eigenvalues
        d = matched(got, want)
        out.append((f"{label} spectrum", d, d <= 1e-2))
    return verdict(out)


def criterion_7(mode):
    out = []
    for label, A, h_true, h_est in (("ex6", A6, 34.80, 34.7999), ("ex7", A7, 55.30, 55.3008)):
        A_hat = estimate_A(autonomous_traj(A, X0_4), cfg(mode)).A_hat
        # the tabulated values sum |lambda| over |lambda| >= 1
        ht = topological_entropy_paper(A, "printed")
        he = topological_entropy_paper(A_hat, "printed")
        hb = topological_entropy_bowen(A_hat)
        oracle = sum(math.log(abs(z)) for z in np.linalg.eigvals(A_hat) if abs(z) > 1)
        out += [
            (f"{label} |h(A)-{h_true}|", abs(ht - h_true), abs(ht - h_true) <= 1e-6),
            (f"{label} |h(A_hat)-{h_est}|", abs(he - h_est), abs(he - h_est) <= 1e-2),
            (f"{label} bowen vs log-sum", abs(hb - oracle), abs(hb - oracle) <= 1e-10),
        ]
    return verdict(out)


def criterion_8(mode):
    out = []
    for label, A, B, tol in (("ex9", [[-0.9]], [[3.5]], 1e-4), ("ex10", A10, B10, 1e-3), ("ex11", A11, B11, 0.5)):
        A, B = np.array(A), np.array(B)
        res = estimate_AB(controlled_traj(A, B), cfg(mode))
        e = max(max_err(res.A_hat, A), max_err(res.B_hat, B))
        out.append((f"{label} max err", e, e <= tol))
        if label == "ex11":
            ev = np.linalg.eigvals(res.A_hat)
            d = max(float(np.min(np.abs(ev - t))) for t in (-20, 1, 20))
            out.append(("ex11 spectrum near {-20,1,20}", d, d <= 0.3))
    return verdict(out)


def _designs(A, B, mode):
    res = estimate_AB(controlled_traj(A, B), cfg(mode))
    true = solve_dare(LqrProblem.identity_weights(A, B))
    est = solve_dare(LqrProblem.identity_weights(res.A_hat, res.B_hat))
    return true, est


def criterion_9(mode):
    A, B = np.array([[-0.9]]), np.array([[3.5]])
    true, est = _designs(A, B, mode)
    a = true.closed_loop[0, 0]
    b = est.closed_loop[0, 0]
    return verdict([
        ("|a-bF + 0.0643|", abs(a + 0.0643), abs(a + 0.0643) <= 5e-4),
        ("|A_hat-B_hat F_hat + 0.0643|", abs(b + 0.0643), abs(b + 0.0643) <= 1e-3),
    ])


def criterion_10(mode):
    _, est = _designs(A10, B10, mode)
    d = matched(est.spectrum.eigenvalues, [-0.6172, 0.4049, -0.0018])
    cl = closed_loop_analysis(A10, B10, est.F)
    return verdict([
        ("spec(A_hat-B_hat F_hat) dist", d, d <= 1e-3),
        ("radius(A-B F_hat)", cl.spectrum.radius, cl.stable),
    ])


def criterion_11(mode):
    _, est = _designs(A11, B11, mode)
    cl = closed_loop_analysis(A11, B11, est.F)
    d = matched(cl.spectrum.eigenvalues, [-0.1234 + 2.0777j, -0.1234 - 2.0777j, 0.5279])
    return verdict([
        ("radius(A-B F_hat), want >= 1", cl.spectrum.radius, not cl.stable),
        ("spec(A-B F_hat) dist", d, d <= 1e-2),
    ])


def criterion_12():
    A, x0 = np.array([[0.5]]), [-0.5]
    ok1 = 0
    for seed in range(20):
        A_hat = estimate_A(autonomous_traj(A, x0, noise=NoiseSpec(0.1, seed))).A_hat
        rep = tail_energy(A, A_hat, x0)
        ok1 += rep.tail_energy <= 1e-6 * rep.full_energy
    ok2 = 0
    for seed in range(20):
        A_hat = estimate_A(autonomous_traj(A4B, X0_4, noise=NoiseSpec(5e-5, seed))).A_hat
        ok2 += np.max(np.abs(np.linalg.eigvals(A4B - A_hat))) < 1
    return verdict([
        ("ex1 noisy runs with tail <= 1e-6 full (of 20)", ok1, ok1 >= 18),
        ("ex4b noisy runs with spec(A-A_hat) in disk (of 20)", ok2, ok2 >= 18),
    ])


def _random_ridge(rng):
    d = int(rng.integers(1, 7))
    N = int(rng.integers(d + 1, 201))
    X = rng.standard_normal((N, d))
    y = rng.standard_normal(N)
    g = 10.0 ** rng.uniform(-6, 1)
    return X, y, g


def _random_lqr(rng):
    n = int(rng.integers(1, 5))
    m = int(rng.integers(1, n + 1))
    C = rng.standard_normal((n, n))
    D = rng.standard_normal((m, m))
    return LqrProblem(
        rng.standard_normal((n, n)) * rng.uniform(0.5, 1.5), rng.standard_normal((n, m)),
        C @ C.T + 0.1 * np.eye(n), D @ D.T + 0.1 * np.eye(m),
    )


def criterion_13():
    rng = np.random.Generator(np.random.PCG64(2024))
    worst_dp = 0.0
    for _ in range(50):
        X, y, g = _random_ridge(rng)
        a = ridge_solve(RidgeProblem(X, y, gamma=g)).linear_weights()
        ref = np.linalg.solve(X.T @ X + X.shape[0] * g * np.eye(X.shape[1]), X.T @ y)
        worst_dp = max(worst_dp, float(np.linalg.norm(a - ref) / np.linalg.norm(ref)))
    worst_res, worst_scipy = 0.0, 0.0
    for _ in range(50):
        prob = _random_lqr(rng)
        P = solve_dare(prob).P
        worst_res = max(worst_res, dare_residual(prob, P))
        ref = sla.solve_discrete_are(prob.A, prob.B, prob.Q, prob.R)
        worst_scipy = max(worst_scipy, float(np.max(np.abs(P - ref)) / max(1.0, np.max(np.abs(ref)))))
    worst_rt = max(abs(alpha_inverse(alpha(u)) - u) for u in np.concatenate([[1.1, 3, 50], 1 + 10 ** rng.uniform(-3, 3, 200)]))
    eps = sample_error_bound(BoundInputs([[1.0]], [[1.0]], [1.0], 1.0, [1.0], 1.0, 1 / math.e)).epsilon
    return verdict([
        ("dual/primal rel err", worst_dp, worst_dp <= 1e-8),
        ("DARE residual", worst_res, worst_res <= 1e-10),
        ("DARE vs scipy (rel)", worst_scipy, worst_scipy <= 1e-8),
        ("alpha_inverse round trip", worst_rt, worst_rt <= 1e-9),
        ("1-point bound vs 0.5865", eps, abs(eps - 0.5865) <= 1e-3),
    ])


def criterion_14():
    worst, failed = 0.0, 0
    for seed in range(50):
        rng = np.random.Generator(np.random.PCG64(seed))
        n = int(rng.integers(1, 7))
        A = random_stable(rng, n, 0.9)
        e = max_err(estimate_A(autonomous_traj(A, rng.standard_normal(n), 100), IdentConfig(gamma=1e-12)).A_hat, A)
        worst = max(worst, e)
        failed += e > 1e-6
    return verdict([("worst max err", worst, worst <= 1e-6), ("systems over 1e-6 (of 50)", failed, failed == 0)])


PER_MODE = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
            7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11}
GLOBAL = {12: criterion_12, 13: criterion_13, 14: criterion_14}


def _record(key, fn, *args):
    try:
        ok, detail = fn(*args)
    except Exception as exc:  # report the failure line, then re-raise in the test
        RESULTS[key] = (False, f"error: {type(exc).__name__}: {exc}")
        raise
    RESULTS[key] = (ok, detail)
    return ok, detail


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("number", sorted(PER_MODE))
def test_criterion(number, mode):
    ok, detail = _record(f"criterion {number:>2} [{mode}]", PER_MODE[number], mode)
    assert ok, detail


@pytest.mark.parametrize("number", sorted(GLOBAL))
def test_global_criterion(number):
    ok, detail = _record(f"criterion {number:>2}", GLOBAL[number])
    assert ok, detail


def report_lines():
    return [f"{'PASS' if ok else 'FAIL'}  {key}: {detail}" for key, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for n, fn in PER_MODE.items():
        for m in MODES:
            try:
                _record(f"criterion {n:>2} [{m}]", fn, m)
            except Exception:
                pass
    for n, fn in GLOBAL.items():
        try:
            _record(f"criterion {n:>2}", fn)
        except Exception:
            pass
    print("\n".join(report_lines()))
