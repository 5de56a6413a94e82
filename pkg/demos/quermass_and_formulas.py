"""Mean widths by Kubota's formula and the dimension-free formula layer.

Quermassintegrals of euclidean ball unions are averages of projection
volumes.  For a single ball they have a closed form, which makes a
convenient sanity check.  The closing lines evaluate the numeric anchor and the
packing thresholds that control when the final inequalities apply.
"""

import numpy as np

from ballcontract import bounds
from ballcontract.ball_bodies import molecule
from ballcontract.norms import NormBody, omega
from ballcontract.volumetry import quermass_kubota

E = NormBody.euclidean(3)
print("Single unit ball in R^3, W_k = omega_3 for every k:")
for k in range(4):
    est = quermass_kubota(molecule(np.zeros((1, 3)), 1.0, E), k, direction_samples=64,
                          vol_samples=200_000, seed=k)
    print(f"  W_{k}: {est.value:.4f} in [{est.lo:.4f}, {est.hi:.4f}]  (closed form {omega(3):.4f})")

cube = np.array([[i, j, l] for i in (0, 1) for j in (0, 1) for l in (0, 1)], dtype=float)
r = 1.0
w1 = quermass_kubota(molecule(cube, r, E), 1, direction_samples=128, vol_samples=40_000, seed=9)
print(f"\nEight unit-separated centers, r = {r}: W_1 ~ {w1.value:.3f}")
print(f"  bounds: upper {bounds.quermass_union_upper(r, 1.0, 3, 1):.3f} for a contracted copy, "
      f"lower {bounds.quermass_union_lower(r, 1.0, 3, 8, 1):.3f} for the packing")

print(f"\nanchor value at x = {bounds.ANCHOR_X}: {bounds.anchor_value():.6f}")
for d in (2, 3, 5, 10):
    print(f"  d = {d:>2}: Jung radius {bounds.jung_radius(1.0, d):.4f}, "
          f"Bohnenblust radius {bounds.bohnenblust_radius(1.0, d):.4f}, "
          f"N must reach {bounds.ANCHOR_BOUND ** d:.1f}")
