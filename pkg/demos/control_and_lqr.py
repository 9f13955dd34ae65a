# identify (A, B) from input/output data, design LQR on the estimate, check on the plant
import numpy as np
from kernel_sysid import (
    LinearSystem, LqrProblem, closed_loop_analysis, estimate_AB, lqr_cost, simulate_controlled, solve_dare,
)

A = np.array([[-0.9, 1, 0], [0, -0.1, 1], [0, 0, 0.8]])
B = np.array([[-2.5], [-3.5], [4.5]])
k = np.arange(101)
u = (np.sin(k) + np.cos(k))[:, None]
traj = simulate_controlled(LinearSystem(A, B), np.zeros(3), u)

est = estimate_AB(traj)
print("max |A_hat - A|", np.abs(est.A_hat - A).max(), " max |B_hat - B|", np.abs(est.B_hat - B).max())

prob = LqrProblem.identity_weights(est.A_hat, est.B_hat)
res = solve_dare(prob)
print("iterations", res.iterations, "residual", res.residual)
print("spec(A_hat - B_hat F_hat)", np.round(res.spectrum.eigenvalues, 4))

cl = closed_loop_analysis(A, B, res.F)
print("plant closed loop radius", cl.spectrum.radius, "stable", cl.stable)

# finite-horizon cost approaches x0' P x0
x0 = np.array([1.0, 0, 0])
print(lqr_cost(LqrProblem.identity_weights(A, B), x0, res.F, 500).cost, x0 @ res.P @ x0)
