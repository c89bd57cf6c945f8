# p-variation of sampled paths
#
# A sampled path stands for its piecewise-linear interpolant.  Its
# p-variation is the supremum of (sum |increments|^p)^(1/p) over all
# sub-partitions of the sample points, computed exactly by dynamic
# programming.  This script walks through the basic facts: the rougher
# the path, the slower the seminorm decays in p, and restricting to
# fewer points can only lose variation.

import numpy as np

from youngflow import (
    ControlFunction,
    SampledPath,
    holder_norm,
    p_variation,
    p_variation_bruteforce,
)

# a tiny zigzag: for p = 1 every point matters, for p = 2 the single
# big jump 0 -> 1 -> 0 dominates
zigzag = SampledPath([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
print("zigzag 1-var :", p_variation(zigzag, 1.0))   # 2.0
print("zigzag 2-var :", p_variation(zigzag, 2.0))   # sqrt(2)

# the DP agrees with brute-force enumeration over all sub-partitions
rng = np.random.default_rng(1)
path = SampledPath(np.linspace(0, 1, 10), rng.standard_normal((10, 2)))
for p in (1.0, 1.3, 1.7):
    print(f"p={p}: dp={p_variation(path, p):.6f}  brute={p_variation_bruteforce(path, p):.6f}")

# monotonicity in the exponent
ps = [1.0, 1.2, 1.5, 2.0]
print("monotone in p:", [round(p_variation(path, p), 4) for p in ps])

# p-variation against the Hoelder seminorm: whenever p*alpha >= 1,
#   |||x|||_{p-var,[a,b]} <= |||x|||_{alpha-Hol,[a,b]} (b-a)^alpha
alpha, p = 0.5, 2.0
lhs = p_variation(path, p)
rhs = holder_norm(path, alpha) * (path.domain.length) ** alpha
print(f"pvar {lhs:.4f} <= holder bound {rhs:.4f}")

# (s,t) -> |||x|||^p is superadditive with zero diagonal: a control
ctrl = ControlFunction.from_p_variation(path, 1.5)
print("superadditivity defect:", ctrl.superadditivity_defect(path.times))
