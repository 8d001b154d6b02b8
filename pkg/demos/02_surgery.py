"""
Derived-from-Anosov surgery
===========================

Inside a disc of radius ``r`` around the branch points ``(0,0)`` and
``(1/2,1/2)`` the expanding direction is pulled down to ``mu < 1``.  Each
of those points becomes a sink and spawns a saddle on its unstable line.
"""

import numpy as np

from lattes_da import A, PerturbedMap, SurgeryProfile, find_saddles
from lattes_da.surgery import equivariance_discrepancy

P = PerturbedMap(A, SurgeryProfile(r=0.2, mu=0.5))
rep = find_saddles(P)
print(f"lambda_u={rep.lambda_u:.6f} lambda_s={rep.lambda_s:.6f} u*={rep.u_star:.6f}")

# sinks: multipliers (lambda_s, mu)
for a in rep.attractors:
    print("attractor", a.point, "multipliers", np.round(a.multipliers, 6))

# saddles: one multiplier below 1, one above
for s in rep.saddles:
    print("saddle", s.point, "multipliers", np.round(s.multipliers, 6), f"residual {s.residual:.1e}")

# the perturbed map still commutes with x -> -x, so it lives on the sphere
x = np.random.default_rng(0).random((10_000, 2))
print("equivariance defect:", float(np.max(equivariance_discrepancy(P, x))))
