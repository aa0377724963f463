"""
From sample paths back to information
=====================================

Simulate the signal/response pair with the exact Gaussian step, then
estimate the decomposition from sample covariances and compare it with
the exact curve. Plug-in errors shrink like one over the square root of
the effective sample size.
"""

import math

import numpy as np

from causalflow import blrm, estimate, simulate
from causalflow.measures import decompose

p = blrm.BlrmParams(alpha=0.1, beta=0.2, t_rel=10.0, d=10.0)
net = p.network()
dt = 1.0

ens = simulate.generate(net, "exact", dt=dt, steps=200_000, n_traj=8, seed=7)
print(f"{ens.n_traj} paths x {ens.steps} steps, effective samples {estimate.effective_sample_size(ens):.3g}")

lags = [0, 1, 3, 6, 12, 25]
emp = estimate.empirical_curve(ens, "x", "y", lags)
print("   tau   i_lag(est)  i_lag(exact)    c(est)   c(exact)")
for k, pt in zip(lags, emp.points):
    ex = decompose(net, "x", "y", k * dt)
    print(f"{k * dt:6.1f} {pt.i_lag:11.5f} {ex.i_lag:13.5f} {pt.c:9.5f} {ex.c:10.5f}")

# the reverse direction should show no influence beyond sampling noise
rev = estimate.empirical_curve(ens, "y", "x", lags[1:])
print(f"max |C_y->x| estimated: {np.abs(rev.column('c')).max():.1e}")

# error against sample size, a few replicates per size
exact = decompose(net, "x", "y", 3 * dt).i_lag
for steps in (2_000, 20_000, 200_000):
    errs = [estimate.empirical_decomposition(simulate.generate(net, "exact", dt, steps, 2, seed=100 + r),
                                             "x", "y", 3).i_lag - exact for r in range(8)]
    print(f"steps {steps:7d}: rms error {math.sqrt(np.mean(np.square(errs))):.2e}")
