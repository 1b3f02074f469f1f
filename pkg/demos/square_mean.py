"""
Posterior for a bivariate mean on eight points of a square
============================================================

The data are the corners and edge midpoints of the square [-1, 1]^2.
The empirical likelihood of a mean vanishes outside the convex hull of
the data, so the posterior lives on the open square.  HMC never leaves it.
"""

import numpy as np

from bayesel import HMCConfig, SQUARE_DATA, mean_model, normal_prior, run_chain, summarize

# one moment condition per coordinate: g(x, theta) = x - theta
model = mean_model(2)
prior = normal_prior(0.0, 1.0)

config = HMCConfig(n_samples=1000, lf_steps=15, epsilon=0.06, seed=1)
chain = run_chain([0.9, 0.95], model, prior, SQUARE_DATA, config)

summary = summarize(chain, burn_in=100)
print("acceptance rate:", round(summary.acceptance_rate, 3))
print("posterior mean:", summary.mean.round(3))
print("posterior sd:  ", summary.sd.round(3))
print("ESS:           ", summary.ess.round(1))

# every draw is strictly inside the support
inside = np.all(np.abs(chain.samples) < 1, axis=1)
print("fraction of draws inside the square:", inside.mean())
