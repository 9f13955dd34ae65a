# growing data: rescale by sigma so the regression stays well posed
import numpy as np
from kernel_sysid import IdentConfig, LinearSystem, compute_sigma, estimate_A, rescale_trajectory, simulate_autonomous

traj = simulate_autonomous(LinearSystem([[11.46]]), [1.0], 100)
print("last sample", traj.states[-1, 0])  # ~1e106
sigma = compute_sigma(traj)
y = rescale_trajectory(traj, sigma)
print("sigma", sigma, "rescaled range", y.states.min(), y.states.max())

for rescale in ("never", "auto"):
    try:
        res = estimate_A(traj, IdentConfig(gamma=1e-6, rescale=rescale))
        print(rescale, res.A_hat[0, 0], "cond", res.condition_estimates)
    except Exception as e:  # raw data is hopelessly conditioned
        print(rescale, type(e).__name__, e)

# 4x4 diagonal, eigenvalues far outside the unit disk
A = np.diag([20.0, -10.0, 15.0, -25.0])
res = estimate_A(simulate_autonomous(LinearSystem(A), [-0.9, 15, 1.5, 2.5], 100))
print(np.round(res.A_hat, 4))
print("sigma", res.sigma, "rescaled", res.rescaled)
