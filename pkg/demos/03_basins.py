"""
Basins of the two sinks and the repeller between them
=====================================================

Every pixel is labelled by where its forward orbit ends up.  Pixels that
never provably reach a sink form the candidate repeller ``K``.  The
picture is written as a binary PPM next to this script.
"""

from pathlib import Path

from lattes_da import A, BasinLabel, PerturbedMap, SurgeryProfile, compute_basins
from lattes_da.repeller import KSet, invariance_check, render_ppm, sample_kset

P = PerturbedMap(A, SurgeryProfile(0.2, 0.5))
grid = compute_basins(P, 256)
counts = grid.counts()
for lab in BasinLabel:
    print(f"{lab.text:>12} {counts[lab]}")
print("symmetric agreement:", grid.symmetric_agreement())

# K should be completely invariant: forward images and both preimages of
# a K point stay near K
kset = KSet.from_grid(grid)
rep = invariance_check(sample_kset(grid, 1000), kset, P, 2.0 / grid.width)
print(f"forward {rep.forward_rate:.3f}  backward {rep.backward_rate:.3f}  pass={rep.passed}")

path = render_ppm(grid, Path(__file__).with_name("basins_256.ppm"))
print("wrote", path)
