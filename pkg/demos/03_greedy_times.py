# Greedy times: tiling a horizon into equal-budget intervals
#
# The next greedy time after tau solves
#     (t - tau)^lambda + |||w|||_{p-var,[tau,t]} = mu.
# Rough stretches of the driver force short intervals, quiet stretches
# allow long ones, and the number of intervals inside [a,b] is bounded
# by  2^{p'-1} mu^{-p'} ((b-a)^{p' lambda} + |||w|||^{p'}).

import numpy as np

from youngflow import FbmSpec, analytic_driver, count_bound, fbm_sample, greedy_sequence

# unit-slope ramp: |||w|||_{p-var,[s,t]} = t - s, so with lambda = 1 and
# mu = 1/2 each step solves 2*step = 1/2
ramp = analytic_driver("linear", {}, np.linspace(0, 1, 201))
seq = greedy_sequence(ramp, 0.0, 1.0, lam=1.0, mu=0.5, p=1.5)
print("ramp greedy times:", seq.times)
print("residuals        :", np.max(np.abs(seq.residuals)))

cb = count_bound(ramp, (0.0, 1.0), lam=1.0, mu=0.5, p=1.5, p_prime=1.5)
print(f"count {cb.actual} <= bound {cb.bound:.2f}: {cb.satisfied}")

# on a fractional Brownian driver the tiling adapts to local roughness
drv = fbm_sample(FbmSpec(hurst=0.75, horizon=1.0, samples=2049, seed=8))
seq = greedy_sequence(drv, 0.0, 1.0, lam=0.75, mu=0.3, p=1.5)
lengths = np.diff(seq.times)
print(f"fBm tiling: {seq.n_intervals} intervals, min/max length "
      f"{lengths.min():.4f}/{lengths.max():.4f}")
cb = count_bound(drv, (0.0, 1.0), lam=0.75, mu=0.3, p=1.5, p_prime=1.5)
print(f"count {cb.actual} <= bound {np.ceil(cb.bound):.0f}: {cb.satisfied}")

# halving the budget can only refine the tiling
for mu in (0.6, 0.3, 0.15):
    n = greedy_sequence(drv, 0.0, 1.0, lam=0.75, mu=mu, p=1.5).n_intervals
    print(f"mu = {mu:5.2f} -> {n} intervals")
