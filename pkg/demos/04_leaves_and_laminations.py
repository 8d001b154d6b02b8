"""
Dense leaves and two model laminations
======================================

An unstable leaf of a saddle wraps around the sphere and comes close to
every point of ``K``.  The symbolic side compares the shift, whose
suspension has a dense leaf, with a Cantor map ``h`` whose suspension has
none.
"""

from lattes_da import A, H_SYSTEM, SHIFT_SYSTEM, PerturbedMap, SurgeryProfile, compute_basins, find_saddles
from lattes_da import indecomposability_verdict, trace_unstable_leaf
from lattes_da.lamination import h_orbit_certificate
from lattes_da.repeller import KSet, density_statistic

P = PerturbedMap(A, SurgeryProfile(0.2, 0.5))
kset = KSet.from_grid(compute_basins(P, 256))
p1 = find_saddles(P).saddles[0].point

# the fraction of K within 0.05 of the leaf rises to 1 with arc length
for length in (5, 20, 50, 200):
    trace = trace_unstable_leaf(P, p1, length)
    print(f"leaf length {length:>4}: density {density_statistic(trace, kset, 0.05):.3f}")

# a de Bruijn point visits every depth-6 cylinder of the full shift
print(indecomposability_verdict(SHIFT_SYSTEM, 6, 128))

# no h-orbit visits more than 2k of the 2^k cylinders
print(indecomposability_verdict(H_SYSTEM, 6, 10_000))
for k in range(3, 9):
    c = h_orbit_certificate(k, 10_000)
    print(f"k={k}: at most {c.max_visited} of {c.cylinders} cylinders")
