"""Gauges, support functions and the three kinds of ball bodies in the plane.

Run with ``python demos/norms_and_ball_bodies.py``.
"""

import numpy as np

from ballcontract.ball_bodies import molecule, polyhedron, r_hull
from ballcontract.norms import gauge, parse_norm, support
from ballcontract.volumetry import exact_area_2d, mc_volume

x = np.array([3.0, -4.0])
print("The same vector measured in three norms:")
for name in ("euclid", "l1", "linf"):
    K = parse_norm(name, 2)
    print(f"  {name:>6}: gauge {gauge(K, x):.3f}, support {support(K, x):.3f}, "
          f"unit-ball area {K.unit_volume.value:.4f}")

# Three unit-ish squares: their union, their intersection and the r-ball hull
# of their centers.  Polytopal norms give exact planar areas.
K = parse_norm("linf", 2)
X = np.array([[0.0, 0.0], [0.8, 0.3], [0.2, 0.9]])
r = 1.0
print("\nCenters", X.tolist(), "radius", r, "in the max norm:")
for label, region in (("union", molecule(X, r, K)), ("intersection", polyhedron(X, r, K)),
                      ("r-ball hull", r_hull(X, r, K))):
    exact = exact_area_2d(region).value
    est = mc_volume(region, 200_000, seed=1)
    print(f"  {label:>12}: exact {exact:.6f}; Monte Carlo {est.value:.4f} "
          f"in [{est.lo:.4f}, {est.hi:.4f}]")

# Curved norms have no exact area routine, so only the Monte Carlo interval is reported.
E = parse_norm("lp:3", 2)
est = mc_volume(molecule(X, r, E), 200_000, seed=2)
print(f"\nSame union in the l3 norm: {est.value:.4f} in [{est.lo:.4f}, {est.hi:.4f}]")
