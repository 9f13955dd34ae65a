# topological entropy of true vs identified matrix, and the sample-error bound
import numpy as np
from kernel_sysid import (
    LinearSystem, alpha_inverse, estimate_A, sample_error_bound, simulate_autonomous,
    topological_entropy_bowen, topological_entropy_paper,
)
from kernel_sysid.bounds import BoundInputs

A = np.array([[-0.85, 0.45, -0.45, -77.85], [-1.35, 0.95, 14.35, -11.65], [0, 0, 15.3, -55.3], [0, 0, 0, -40.0]])
A_hat = estimate_A(simulate_autonomous(LinearSystem(A), [-0.9, 15, 1.5, 2.5], 100)).A_hat
print("spec(A_hat)", np.round(np.linalg.eigvals(A_hat), 4))

for M, name in ((A, "A"), (A_hat, "A_hat")):
    print(name,
          "literal", round(topological_entropy_paper(M), 4),
          "printed", round(topological_entropy_paper(M, "printed"), 4),
          "bowen", round(topological_entropy_bowen(M), 4))

# one-point hand case: operator 2, kappa 1/4, argument 2
res = sample_error_bound(BoundInputs([[1.0]], [[1.0]], [1.0], 1.0, [1.0], 1.0, 1 / np.e))
print("alpha^-1(2) =", alpha_inverse(2.0), " eps_samp =", res.epsilon)
for row in res.table():
    print(row)
