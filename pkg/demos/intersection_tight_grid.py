"""The intersection side, on the instance where the upper bound is attained.

Nine points of the integer grid in the max norm form a 1-separated packing.
The intersection of radius-3 squares around them has area 16, which equals the
closed-form upper bound.  Contracting all nine points to one spot leaves
a single square of area 36.
"""

import numpy as np

from ballcontract import bounds
from ballcontract.ball_bodies import polyhedron
from ballcontract.instances import UniformContractionInstance
from ballcontract.norms import parse_norm
from ballcontract.verify import MCParams, check_intersection_theorem
from ballcontract.volumetry import exact_area_2d

K = parse_norm("linf", 2)
P = np.array([[i, j] for i in range(3) for j in range(3)], dtype=float)
inst = UniformContractionInstance(K, 1.0, 3.0, P, np.zeros((9, 2)), "super", 0)

print("V(P^3)             =", exact_area_2d(polyhedron(P, 3.0, K)).value)
print("intersection_upper =", bounds.intersection_upper(3.0, 1.0, 2, 9, K.unit_volume.value))
print("V(Q^3)             =", exact_area_2d(polyhedron(inst.Q, 3.0, K)).value)

print("\nEvery intersection check on this instance:")
for c in check_intersection_theorem(inst, MCParams(seed=0)):
    lhs = "-" if c.lhs is None else f"{c.lhs.value:.6g}"
    rhs = "-" if c.rhs is None else f"{c.rhs.value:.6g}"
    print(f"  {c.check_id:<28} {c.verdict:<13} {lhs:>10} {c.relation} {rhs:<10} [{c.mode}]")
