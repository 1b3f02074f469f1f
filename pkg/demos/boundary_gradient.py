"""
The log-likelihood gradient diverges at the hull boundary
==========================================================

Walking toward the edge of the square along (1 - 2^-k, 0), log EL falls
without bound and the norm of its gradient grows roughly like 2^k.  This
steep wall is what keeps HMC trajectories inside the support.
"""

import numpy as np

from bayesel import SQUARE_DATA, grad_log_el, log_el, mean_model

model = mean_model(2)

print(f"{'k':>3} {'log EL':>12} {'|grad|':>12}")
for k in (1, 2, 4, 8, 12, 16, 20):
    theta = np.array([1 - 2.0 ** -k, 0.0])
    value, sol = log_el(model, theta, SQUARE_DATA)
    grad = grad_log_el(model, theta, SQUARE_DATA, sol)
    print(f"{k:>3} {value:>12.4f} {np.linalg.norm(grad):>12.4e}")

# just outside the hull the solver reports infeasibility
value, sol = log_el(model, np.array([1.5, 0.0]), SQUARE_DATA)
print("theta = (1.5, 0):", value, "feasible:", sol.feasible)
