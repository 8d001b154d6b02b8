"""The pillowcase sphere ``S^2 = T^2 / (x ~ -x)`` and the induced Lattès map.

A class ``[x]`` is stored by its canonical lift: the lexicographically
smaller of ``x`` and ``-x mod 1``.  Exact points carry a
:class:`~lattes_da.lattice.RationalTorusPoint`; numeric points carry a
pair of floats and are produced by :func:`project_numeric`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .lattice import (
    TWO_TORSION,
    NotHyperbolic,
    IntMatrix2,
    RationalTorusPoint,
    apply,
    congruence_count,
    preimages,
    solve_congruence,
)


class UnsupportedDegree(ValueError):
    """Critical-point extraction is implemented for ``|det| = 2`` only."""


@dataclass(frozen=True, order=True)
class SpherePoint:
    """A point of the pillowcase, identified by its canonical lift ``rep``."""

    rep: Union[RationalTorusPoint, tuple[float, float]]

    @property
    def exact(self) -> bool:
        return isinstance(self.rep, RationalTorusPoint)

    def as_floats(self) -> tuple[float, float]:
        if self.exact:
            return self.rep.as_floats()
        return self.rep

    def __str__(self) -> str:
        if self.exact:
            return f"pi{self.rep}"
        return f"pi({self.rep[0]:.12g},{self.rep[1]:.12g})"


def project(x: RationalTorusPoint) -> SpherePoint:
    return SpherePoint(min(x, -x))


def fiber(s: SpherePoint) -> frozenset[RationalTorusPoint]:
    """``pi^{-1}(s)``: one point at a branch point, two elsewhere."""
    if not s.exact:
        raise TypeError("fiber() needs an exact sphere point")
    return frozenset({s.rep, -s.rep})


def canonical_numeric(x: np.ndarray) -> np.ndarray:
    """Canonical lifts of an array of torus points, shape ``(..., 2)``."""
    x = np.asarray(x, dtype=float)
    y = np.mod(x, 1.0)
    # coordinates too small to survive 1 - y count as 0, so that y and -y
    # stay exact negatives of each other and the map is idempotent
    y = np.where((y >= 1.0) | (1.0 - y == 1.0), 0.0, y)
    ny = np.mod(-y, 1.0)
    ny = np.where(ny >= 1.0, 0.0, ny)
    keep = (y[..., 0] < ny[..., 0]) | ((y[..., 0] == ny[..., 0]) & (y[..., 1] <= ny[..., 1]))
    return np.where(keep[..., None], y, ny)


def project_numeric(x1: float, x2: float) -> SpherePoint:
    c = canonical_numeric(np.array([x1, x2]))
    return SpherePoint((float(c[0]), float(c[1])))


def sphere_distance(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Quotient distance ``min(|p - q|_T, |p + q|_T)`` between lifts."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)

    def torus(z):
        z = z - np.round(z)
        return np.hypot(z[..., 0], z[..., 1])

    return np.minimum(torus(p - q), torus(p + q))


BRANCH_POINTS: frozenset[SpherePoint] = frozenset(project(x) for x in TWO_TORSION)


def induced_apply(M: IntMatrix2, s: SpherePoint) -> SpherePoint:
    """The Lattès map ``f`` with ``f(pi(x)) = pi(M x)``."""
    return project(apply(M, s.rep))


def sphere_preimages(M: IntMatrix2, s: SpherePoint) -> frozenset[SpherePoint]:
    return frozenset(project(x) for x in preimages(M, s.rep))


def _require_degree_two(M: IntMatrix2) -> None:
    if abs(M.det) != 2:
        raise UnsupportedDegree(f"|det {M}| = {abs(M.det)}, expected 2")


def critical_points_f(M: IntMatrix2) -> frozenset[SpherePoint]:
    """Critical points of ``f``: non-branch points mapped onto branch points.

    At such a point ``pi`` is a local homeomorphism upstairs but folds
    downstairs, so ``f`` is locally 2:1.  Riemann-Hurwitz gives exactly two.
    """
    _require_degree_two(M)
    out = set()
    for b in TWO_TORSION:
        for x in preimages(M, b):
            if not x.is_two_torsion():
                out.add(project(x))
    return frozenset(out)


def critical_values_f(M: IntMatrix2) -> frozenset[SpherePoint]:
    return frozenset(induced_apply(M, c) for c in critical_points_f(M))


def homology_hyperbolic(M: IntMatrix2) -> bool:
    """True iff no eigenvalue of ``M`` lies on the unit circle (exact test).

    Real unit eigenvalues are +-1, i.e. roots of ``1 -+ t + det``; a complex
    pair lies on the circle iff the discriminant is negative and ``det = 1``.
    """
    t, det = M.trace, M.det
    if 1 - t + det == 0 or 1 + t + det == 0:
        return False
    return not (t * t - 4 * det < 0 and det == 1)


# --- orbits and the lemma verifiers ----------------------------------------


@dataclass(frozen=True)
class FiniteOrbit:
    """``points[0] -> points[1] -> ...``; the map sends ``points[-1]`` to
    ``points[cycle_start]``."""

    points: tuple[SpherePoint, ...]
    cycle_start: int

    @property
    def cycle(self) -> tuple[SpherePoint, ...]:
        return self.points[self.cycle_start:]

    @property
    def periodic(self) -> bool:
        return self.cycle_start == 0

    def __str__(self) -> str:
        parts = []
        for i, p in enumerate(self.points):
            parts.append(f"[{p}" if i == self.cycle_start else str(p))
        return " -> ".join(parts) + "]"


def forward_orbit(M: IntMatrix2, s: SpherePoint, limit: int = 10_000) -> FiniteOrbit:
    """Exact forward orbit of a rational point, up to the first repetition."""
    seen: dict[SpherePoint, int] = {}
    pts = []
    while s not in seen:
        if len(pts) >= limit:
            raise RuntimeError(f"orbit of {s} longer than {limit}")
        seen[s] = len(pts)
        pts.append(s)
        s = induced_apply(M, s)
    return FiniteOrbit(tuple(pts), seen[s])


@dataclass(frozen=True)
class LattesReport:
    matrix: IntMatrix2
    crit_f: tuple[SpherePoint, ...]
    crit_values_f: tuple[SpherePoint, ...]
    postcritical_orbits: tuple[FiniteOrbit, ...]
    branch_orbit_table: tuple[tuple[SpherePoint, SpherePoint], ...]
    ram: bool
    crit: bool
    inv: bool
    nonperiodic: bool
    thurston: bool
    homology_hyperbolic: bool
    totally_invariant_points: tuple[SpherePoint, ...] = field(default=())

    @property
    def topological_polynomial(self) -> bool:
        """True iff some point ``p`` has ``f^{-1}(p) = {p}``."""
        return bool(self.totally_invariant_points)

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "ram": self.ram,
            "crit": self.crit,
            "inv": self.inv,
            "nonperiodic": self.nonperiodic,
            "thurston": self.thurston,
            "homology_hyperbolic": self.homology_hyperbolic,
        }

    @property
    def all_passed(self) -> bool:
        return all(self.flags.values()) and not self.topological_polynomial


def verify_lattes(M: IntMatrix2) -> LattesReport:
    """Check the combinatorial constraints every Lattès map must satisfy.

    * ``ram``: critical values of ``f`` are branch values of ``pi``;
    * ``crit``: no branch value of ``pi`` is a critical point of ``f``;
    * ``inv``: ``f`` maps the branch values into themselves;
    * ``nonperiodic``: no critical point of ``f`` is periodic;
    * ``thurston``: every critical orbit is finite.

    All checks are exact set computations on rational points.
    """
    _require_degree_two(M)
    hyperbolic = homology_hyperbolic(M)
    if not hyperbolic:
        raise NotHyperbolic(f"{M} has an eigenvalue on the unit circle")

    crit = critical_points_f(M)
    values = frozenset(induced_apply(M, c) for c in crit)
    branch_images = {b: induced_apply(M, b) for b in sorted(BRANCH_POINTS)}

    orbits = tuple(forward_orbit(M, c) for c in sorted(crit))
    totally_invariant = tuple(
        v for v in sorted(values) if sphere_preimages(M, v) == frozenset({v})
    )
    return LattesReport(
        matrix=M,
        crit_f=tuple(sorted(crit)),
        crit_values_f=tuple(sorted(values)),
        postcritical_orbits=orbits,
        branch_orbit_table=tuple(branch_images.items()),
        ram=values <= BRANCH_POINTS,
        crit=not (crit & BRANCH_POINTS),
        inv=set(branch_images.values()) <= BRANCH_POINTS,
        nonperiodic=not any(o.periodic for o in orbits),
        thurston=all(len(o.points) < 10_000 for o in orbits),
        homology_hyperbolic=hyperbolic,
        totally_invariant_points=totally_invariant,
    )


# --- periodic points on the sphere -----------------------------------------


def fixed_point_sets(M: IntMatrix2, n: int) -> tuple[frozenset, frozenset]:
    """``(Fix+, Fix-)``: torus solutions of ``M^n x = x`` and ``M^n x = -x``."""
    return solve_congruence(M, n, 1), solve_congruence(M, n, -1)


def sphere_fixed_points(M: IntMatrix2, n: int) -> frozenset[SpherePoint]:
    plus, minus = fixed_point_sets(M, n)
    return frozenset(project(x) for x in plus | minus)


def sphere_fixed_count(M: IntMatrix2, n: int) -> int:
    """Number of fixed points of ``f^n`` on the sphere.

    ``[x]`` is fixed iff ``M^n x = +-x``.  Both solution sets are closed
    under negation, their intersection consists of 2-torsion points, and
    each non-2-torsion class is counted twice upstairs, hence
    ``(|Fix+| + |Fix-| - |Fix+ & Fix-| - t) / 2 + t``.
    """
    plus = congruence_count(M, n, 1)
    minus = congruence_count(M, n, -1)
    Mn = M**n
    # M^n x = x and M^n x = -x force 2x = 0
    both = sum(1 for x in TWO_TORSION if apply(Mn, x) == x and apply(Mn, x) == -x)
    t = sum(1 for x in TWO_TORSION if apply(Mn, x) in (x, -x))
    union = plus + minus - both
    return (union - t) // 2 + t


@dataclass(frozen=True)
class CensusRow:
    n: int
    det_minus: int
    det_plus: int
    torus_count: int
    sphere_count: int
    log_rate: float


CENSUS_COLUMNS = ("n", "det_minus", "det_plus", "torus_count", "sphere_count", "log_rate")


def periodic_census(M: IntMatrix2, n_max: int) -> list[CensusRow]:
    """Rows ``n = 1..n_max``: ``det(M^n - I)``, ``det(M^n + I)``, the torus
    fixed-point count of ``M^n``, ``N_n f`` and ``log(N_n f) / n``."""
    rows = []
    for n in range(1, n_max + 1):
        Mn = M**n
        count = sphere_fixed_count(M, n)
        rows.append(
            CensusRow(
                n=n,
                det_minus=Mn.shifted(1).det,
                det_plus=Mn.shifted(-1).det,
                torus_count=abs(Mn.shifted(1).det),
                sphere_count=count,
                log_rate=math.log(count) / n,
            )
        )
    return rows
