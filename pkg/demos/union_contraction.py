"""Uniform contraction of a packing, watched through its union volume.

A lambda-separated configuration P is replaced by a configuration Q of
diameter at most lambda.  Every distance shrank, and the union of radius-r
balls around Q never has larger area than the one around P.  The script sweeps r
and prints both exact areas next to the closed-form bounds that separate them.
"""

import numpy as np

from ballcontract import bounds
from ballcontract.ball_bodies import molecule
from ballcontract.instances import gen_instance
from ballcontract.norms import parse_norm
from ballcontract.volumetry import exact_area_2d

K = parse_norm("l1", 2)
lam, N = 1.0, 9
base = gen_instance(2, N, lam, K, "super", seed=7, strategy="lattice")
VK = K.unit_volume.value

print(f"N = {N} points, lambda = {lam}, norm l1, unit-ball area {VK}")
print(f"{'r':>6} {'V(Q_r)':>10} {'upper':>10} {'lower':>10} {'V(P_r)':>10}")
for r in np.linspace(0.5, 2.5, 9):
    vq = exact_area_2d(molecule(base.Q, r, K)).value
    vp = exact_area_2d(molecule(base.P, r, K)).value
    up = bounds.union_upper(r, lam, 2, VK)
    lo = bounds.union_lower(r, lam, 2, N, VK)
    print(f"{r:6.2f} {vq:10.4f} {up:10.4f} {lo:10.4f} {vp:10.4f}")

print("\nWith N = 2^d the two closed forms coincide, so the chain closes exactly:")
print("  union_upper(1, 1, 2) =", bounds.union_upper(1.0, 1.0, 2, VK),
      " union_lower(1, 1, 2, 4) =", bounds.union_lower(1.0, 1.0, 2, 4, VK))
