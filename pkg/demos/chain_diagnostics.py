"""
Reading chain diagnostics
=========================

Autocorrelation and effective sample size for a one-dimensional mean with
a flat prior.  Short trajectories mix slowly and long ones mix quickly,
which shows up directly in the ACF and the ESS.
"""

import numpy as np

from bayesel import HMCConfig, flat_prior, mean_model, run_chain, summarize

rng = np.random.default_rng(3)
data = rng.normal(size=60)
model = mean_model(1)

for lf_steps in (1, 5, 20):
    cfg = HMCConfig(n_samples=1500, lf_steps=lf_steps, epsilon=0.03, seed=4)
    chain = run_chain([data.mean()], model, flat_prior(), data, cfg)
    s = summarize(chain, burn_in=200, max_lag=20)
    print(f"T={lf_steps:>2}  acceptance={s.acceptance_rate:.3f}  "
          f"lag-1 ACF={s.acf[0, 1]:.3f}  lag-10 ACF={s.acf[0, 10]:.3f}  ESS={s.ess[0]:.0f}")

# the mean of a long chain sits near the sample mean
print("sample mean:", round(data.mean(), 4), "posterior mean:", round(float(s.mean[0]), 4))
