"""
The Lattès map of the pillowcase
================================

The matrix ``A = [[4,1],[2,1]]`` has determinant 2, so ``x -> A x`` is a
2:1 cover of the torus.  It commutes with ``x -> -x`` and descends to a
degree-2 map ``f`` of the pillowcase sphere.
"""

from lattes_da import A, periodic_census, verify_lattes
from lattes_da.pillowcase import BRANCH_POINTS, sphere_fixed_points

# the four branch points of the quotient are the 2-torsion points
print("branch points:", ", ".join(map(str, sorted(BRANCH_POINTS))))

# f folds near the two points that A sends onto branch points
rep = verify_lattes(A)
print("critical points:", ", ".join(map(str, rep.crit_f)))
print("critical values:", ", ".join(map(str, rep.crit_values_f)))
for orbit in rep.postcritical_orbits:
    print("critical orbit:", orbit)
print("lemma flags:", rep.flags)

# five fixed points, two of them branch points
fixed = sorted(sphere_fixed_points(A, 1))
print("fixed points:", ", ".join(map(str, fixed)))

# N_n grows like 2^n (in fact like lambda_u^n)
for row in periodic_census(A, 8):
    print(f"n={row.n}  N_n={row.sphere_count:>6}  log(N_n)/n={row.log_rate:.4f}")
