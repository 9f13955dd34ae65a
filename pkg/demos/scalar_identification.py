# identify x(k+1) = 0.5 x(k) from one trajectory, fixed gamma vs cross-validation
import numpy as np
from kernel_sysid import IdentConfig, LinearSystem, NoiseSpec, compare_trajectories, estimate_A, predict, simulate_autonomous

sys = LinearSystem([[0.5]])
traj = simulate_autonomous(sys, [-0.5], 100)

fixed = estimate_A(traj, IdentConfig(gamma=1e-6))
cv = estimate_A(traj)  # gamma picked on a hold-out split
print("alpha_hat, gamma=1e-6:", fixed.A_hat[0, 0])
print("alpha_hat, cv        :", cv.A_hat[0, 0], "gamma", cv.gammas[0])

# error of the long rollout: energy from step 100 on
true = simulate_autonomous(sys, [-0.5], 300)
rep = compare_trajectories(true, predict(cv.A_hat, [-0.5], 300), 100)
print("tail energy", rep.tail_energy, "decay rate", rep.decay_rate)

# noisy data: the signal sinks under the noise after a few steps, so cv often
# regularizes hard; the rollout error still dies off exponentially
for seed in range(5):
    noisy = simulate_autonomous(sys, [-0.5], 100, NoiseSpec(0.1, seed))
    a = estimate_A(noisy).A_hat
    rep = compare_trajectories(true, predict(a, [-0.5], 300), 100)
    print(seed, a[0, 0], "full", rep.full_energy, "tail", rep.tail_energy)
