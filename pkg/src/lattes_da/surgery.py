"""Equivariant derived-from-Anosov surgery on the Lattès map.

The lift ``G`` of the perturbed map is

    G(x) = M x - s * h(|x - c|^2) * P_u (x - c)

where ``c`` is the nearest point of the center lattice
``Z^2 u ((1/2, 1/2) + Z^2)``, ``h`` is a C^1 bump supported in the disc of
radius ``r``, ``P_u`` projects onto the unstable eigenline along the stable
one, and ``s = lambda_u - mu``.  The center set is symmetric under
``x -> -x`` and ``P_u`` is linear, so ``G(-x) = -G(x)`` and ``G`` descends to
the pillowcase.  At each center the derivative is ``M - s P_u`` with
eigenvalues ``mu`` and ``lambda_s``: both fixed branch points become sinks
and a saddle appears on the unstable axis at distance ``u*`` on each side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import A, IntMatrix2, RationalTorusPoint, coset_representatives, eigenframe
from .pillowcase import SpherePoint, canonical_numeric, project

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
FD_STEP = 1e-7

CENTERS = ((0.0, 0.0), (0.5, 0.5))


class InvalidProfile(ValueError):
    pass


class SaddleNotFound(RuntimeError):
    pass


class NewtonDiverged(RuntimeError):
    def __init__(self, message: str, traces=None):
        super().__init__(message)
        self.traces = traces


@dataclass(frozen=True)
class SurgeryProfile:
    """Bump radius ``r`` and the attracting multiplier ``mu`` along ``e_u``.

    ``r = 0`` is accepted and means "no surgery" (the map is the bare
    Lattès map, used as a negative control).
    """

    r: float = 0.2
    mu: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 0.3:
            raise InvalidProfile(f"r must lie in [0, 0.3] so supports stay disjoint, got {self.r}")
        if not 0.0 < self.mu < 1.0:
            raise InvalidProfile(f"mu must lie in (0, 1) to create an attractor, got {self.mu}")

    @property
    def active(self) -> bool:
        return self.r > 0.0


def bump(t, r: float):
    """``(1 - t/r^2)^2`` on ``[0, r^2]`` and 0 beyond; ``t`` is a squared distance."""
    t = np.asarray(t, dtype=float)
    if r == 0.0:
        return np.zeros_like(t)
    q = 1.0 - t / (r * r)
    return np.where(t < r * r, q * q, 0.0)


def bump_derivative(t, r: float):
    t = np.asarray(t, dtype=float)
    if r == 0.0:
        return np.zeros_like(t)
    q = 1.0 - t / (r * r)
    return np.where(t < r * r, -2.0 * q / (r * r), 0.0)


def _nearest_center(x: np.ndarray) -> np.ndarray:
    c0 = np.round(x)
    c1 = np.floor(x) + 0.5
    d0 = (x[..., 0] - c0[..., 0]) ** 2 + (x[..., 1] - c0[..., 1]) ** 2
    d1 = (x[..., 0] - c1[..., 0]) ** 2 + (x[..., 1] - c1[..., 1]) ** 2
    return np.where((d1 < d0)[..., None], c1, c0)


class PerturbedMap:
    """The surgered map ``F`` together with its lift ``G``.

    Instances are immutable after construction and every method is a pure
    function of its arguments, so one map may be shared across threads.
    """

    def __init__(self, matrix: IntMatrix2 = A, profile: SurgeryProfile | None = None):
        profile = profile if profile is not None else SurgeryProfile()
        frame = eigenframe(matrix)
        if abs(matrix.det) < 2:
            raise InvalidProfile(f"{matrix} is invertible; a branched covering needs |det| >= 2")
        strength = frame.lambda_u - profile.mu
        if profile.active and not 0.0 < (frame.lambda_u - 1.0) / strength < 1.0:
            raise InvalidProfile(
                f"(lambda_u - 1)/s = {(frame.lambda_u - 1.0) / strength:.6g} is outside (0, 1)"
            )
        self.matrix = matrix
        self.profile = profile
        self.frame = frame
        self.strength = strength
        self._m = (float(matrix.a), float(matrix.b), float(matrix.c), float(matrix.d))
        eu, es = frame.e_u, frame.e_s
        cross = eu[0] * es[1] - eu[1] * es[0]
        # coefficient of e_u in the (e_u, e_s) basis is n . z
        self._n = (es[1] / cross, -es[0] / cross)
        self._eu = eu

    def __repr__(self) -> str:
        return f"PerturbedMap({self.matrix}, r={self.profile.r}, mu={self.profile.mu})"

    @property
    def attractors(self) -> tuple[SpherePoint, ...]:
        if not self.profile.active:
            return ()
        return tuple(project(RationalTorusPoint.of(*c)) for c in ((0, 0), ("1/2", "1/2")))

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self._eu, self._n)

    def _linear(self, x: np.ndarray) -> np.ndarray:
        a, b, c, d = self._m
        return np.stack([a * x[..., 0] + b * x[..., 1], c * x[..., 0] + d * x[..., 1]], axis=-1)

    def lift_apply(self, x) -> np.ndarray:
        """``G(x)`` on ``R^2``; ``x`` has shape ``(..., 2)``."""
        x = np.asarray(x, dtype=float)
        y = self._linear(x)
        if not self.profile.active:
            return y
        z = x - _nearest_center(x)
        d2 = z[..., 0] ** 2 + z[..., 1] ** 2
        coef = self.strength * bump(d2, self.profile.r) * (self._n[0] * z[..., 0] + self._n[1] * z[..., 1])
        return np.stack([y[..., 0] - coef * self._eu[0], y[..., 1] - coef * self._eu[1]], axis=-1)

    def jacobian(self, x) -> np.ndarray:
        """Analytic ``DG(x)``, shape ``(..., 2, 2)``."""
        x = np.asarray(x, dtype=float)
        a, b, c, d = self._m
        J = np.broadcast_to(np.array([[a, b], [c, d]]), x.shape[:-1] + (2, 2)).copy()
        if not self.profile.active:
            return J
        z = x - _nearest_center(x)
        d2 = z[..., 0] ** 2 + z[..., 1] ** 2
        h = bump(d2, self.profile.r)
        hp = bump_derivative(d2, self.profile.r)
        coef = self._n[0] * z[..., 0] + self._n[1] * z[..., 1]
        s = self.strength
        for i in range(2):
            for j in range(2):
                J[..., i, j] -= s * self._eu[i] * (h * self._n[j] + 2.0 * hp * coef * z[..., j])
        return J

    def torus_apply(self, x) -> np.ndarray:
        y = np.mod(self.lift_apply(x), 1.0)
        return np.where(y >= 1.0, 0.0, y)

    def sphere_apply(self, s):
        """``F`` on canonical lifts; accepts a :class:`SpherePoint` or an array."""
        if isinstance(s, SpherePoint):
            y = canonical_numeric(self.lift_apply(np.array(s.as_floats())))
            return SpherePoint((float(y[0]), float(y[1])))
        return canonical_numeric(self.lift_apply(s))

    def unperturbed(self, x) -> np.ndarray:
        return self._linear(np.asarray(x, dtype=float))


def lift_apply(P: PerturbedMap, x) -> np.ndarray:
    return P.lift_apply(x)


def sphere_apply(P: PerturbedMap, s):
    return P.sphere_apply(s)


# --- numerics ---------------------------------------------------------------


def fd_jacobian(func, x: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Central finite-difference Jacobian of ``func`` at points ``x`` (..., 2)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(2):
        e = np.zeros(2)
        e[j] = step
        cols.append((func(x + e) - func(x - e)) / (2.0 * step))
    return np.stack(cols, axis=-1)


def _solve2(J: np.ndarray, r: np.ndarray) -> np.ndarray:
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    return np.stack(
        [
            (J[..., 1, 1] * r[..., 0] - J[..., 0, 1] * r[..., 1]) / det,
            (J[..., 0, 0] * r[..., 1] - J[..., 1, 0] * r[..., 0]) / det,
        ],
        axis=-1,
    )


def newton(func, x0, tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER, step: float = FD_STEP):
    """Batched Newton iteration on ``func(x) = 0`` with FD Jacobians.

    Returns ``(x, residual, converged, traces)``; ``traces[k]`` is the
    residual vector after ``k`` steps.  Once every row is below ``tol`` two
    polishing steps are attempted and kept row-wise only if they help.
    """
    x = np.array(x0, dtype=float, ndmin=2)
    res = np.linalg.norm(func(x), axis=-1)
    traces = [res.copy()]
    for _ in range(max_iter):
        if np.all(res < tol):
            break
        r = func(x)
        x = x - _solve2(fd_jacobian(func, x, step), r)
        res = np.linalg.norm(func(x), axis=-1)
        traces.append(res.copy())
    if np.all(res < tol):
        for _ in range(2):
            cand = x - _solve2(fd_jacobian(func, x, step), func(x))
            cres = np.linalg.norm(func(cand), axis=-1)
            better = cres < res
            x = np.where(better[:, None], cand, x)
            res = np.where(better, cres, res)
    return x, res, res < tol, traces


def _bisect(func, lo: float, hi: float, tol: float = 1e-15, max_iter: int = 200) -> float:
    flo = func(lo)
    if flo * func(hi) >= 0:
        raise SaddleNotFound(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def saddle_offset(P: PerturbedMap) -> float:
    """Distance ``u*`` from a center to the created saddle along ``e_u``.

    On the unstable axis ``c + u e_u`` the map acts as
    ``u -> (lambda_u - s h(u^2)) u``; the saddle solves
    ``lambda_u - s h(u^2) = 1``, bracketed by ``(0, r)``.
    """
    if not P.profile.active:
        raise SaddleNotFound("no surgery (r = 0), so no saddles")
    lam, s, r = P.frame.lambda_u, P.strength, P.profile.r
    return _bisect(lambda u: lam - s * float(bump(u * u, r)) - 1.0, 0.0, r)


def _float_fixed_point(P: PerturbedMap, x: np.ndarray, reach: int = 8) -> np.ndarray | None:
    """A float vector within ``reach`` ulps of ``x`` that the torus map fixes
    bit-for-bit, or None."""
    offsets = np.arange(-reach, reach + 1)
    cands = []
    for coord in (0, 1):
        vals = [x[coord]]
        up = down = x[coord]
        for _ in range(reach):
            up = np.nextafter(up, np.inf)
            down = np.nextafter(down, -np.inf)
            vals.append(up)
            vals.insert(0, down)
        cands.append(np.array(vals))
    grid = np.stack(np.meshgrid(cands[0], cands[1], indexing="ij"), axis=-1).reshape(-1, 2)
    hit = np.all(P.torus_apply(grid) == grid, axis=-1)
    if not hit.any():
        return None
    ii, jj = np.meshgrid(offsets, offsets, indexing="ij")
    cost = (np.abs(ii) + np.abs(jj)).reshape(-1)
    best = np.argmin(np.where(hit, cost, np.iinfo(np.int64).max))
    return grid[best]


@dataclass(frozen=True)
class FixedPointInfo:
    point: SpherePoint
    multipliers: tuple[float, float]
    residual: float = 0.0
    newton_trace: tuple[float, ...] = ()
    float_exact: bool = False

    @property
    def kind(self) -> str:
        big = sum(abs(m) > 1 for m in self.multipliers)
        return {0: "attractor", 1: "saddle", 2: "repeller"}[big]


@dataclass(frozen=True)
class SurgeryReport:
    profile: SurgeryProfile
    lambda_u: float
    lambda_s: float
    strength: float
    u_star: float
    attractors: tuple[FixedPointInfo, ...]
    saddles: tuple[FixedPointInfo, ...]
    pair_discrepancy: tuple[float, ...] = field(default=())

    @property
    def max_residual(self) -> float:
        return max(s.residual for s in self.saddles)


def _multipliers(P: PerturbedMap, x: np.ndarray) -> tuple[float, float]:
    J = fd_jacobian(P.lift_apply, x)
    ev = np.linalg.eigvals(J)
    if np.max(np.abs(ev.imag)) > 1e-12:
        raise RuntimeError(f"complex multipliers {ev} at {x}")
    ev = sorted(ev.real, key=abs)
    return (float(ev[0]), float(ev[1]))


def find_saddles(P: PerturbedMap) -> SurgeryReport:
    """Locate the two attractors and the two saddles created by the surgery.

    The saddle offset comes from bisection on the unstable axis; each
    candidate ``c + u* e_u`` is refined by 2D Newton on ``G(x) - x - k = 0``
    (``k`` the integer translation ``G`` induces at that fixed point) and, if
    possible, snapped to a float vector the torus map fixes exactly.  The
    mirror candidate ``c - u* e_u`` is refined too and must project to the
    same sphere point.
    """
    u_star = saddle_offset(P)
    eu = np.array(P.frame.e_u)
    attractors, saddles, pair = [], [], []
    for c in CENTERS:
        c = np.array(c)
        attractors.append(FixedPointInfo(project_numeric_array(c), _multipliers(P, c)))
        refined = []
        for sign in (1.0, -1.0):
            x0 = c + sign * u_star * eu
            k = np.round(P.lift_apply(x0) - x0)

            def residual_fn(x, k=k):
                return P.lift_apply(x) - x - k

            x, res, ok, traces = newton(residual_fn, x0)
            if not ok[0]:
                raise NewtonDiverged(
                    f"saddle refinement near {x0} stalled at residual {res[0]:.3g}",
                    [float(t[0]) for t in traces],
                )
            refined.append((x[0], float(res[0]), tuple(float(t[0]) for t in traces)))
        (x, res, trace), (xm, _, _) = refined
        rep = canonical_numeric(x)
        exact = _float_fixed_point(P, rep)
        float_exact = exact is not None
        if float_exact:
            rep = exact
        pair.append(float(np.max(np.abs(canonical_numeric(xm) - canonical_numeric(x)))))
        saddles.append(
            FixedPointInfo(
                SpherePoint((float(rep[0]), float(rep[1]))),
                _multipliers(P, rep),
                residual=res,
                newton_trace=trace,
                float_exact=float_exact,
            )
        )
    return SurgeryReport(
        profile=P.profile,
        lambda_u=P.frame.lambda_u,
        lambda_s=P.frame.lambda_s,
        strength=P.strength,
        u_star=u_star,
        attractors=tuple(attractors),
        saddles=tuple(saddles),
        pair_discrepancy=tuple(pair),
    )


def project_numeric_array(x: np.ndarray) -> SpherePoint:
    c = canonical_numeric(x)
    return SpherePoint((float(c[0]), float(c[1])))


# --- preimages ----------------------------------------------------------------


def preimages_batch(P: PerturbedMap, y) -> np.ndarray:
    """Both ``F``-preimages of each canonical lift in ``y`` (shape ``(N, 2)``).

    Returns canonical lifts of shape ``(N, 2, 2)`` (point, branch, coord).
    Newton is seeded at the exact linear preimages ``M^{-1}(y + k)``; the
    surgery displaces images by a bounded amount, so the seeds lie in the
    right basin of convergence.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    M = P.matrix
    minv = np.array([[M.d, -M.b], [-M.c, M.a]], dtype=float) / M.det
    reps = coset_representatives(M)
    out = np.empty((len(y), len(reps), 2))
    failures = []
    for branch, k in enumerate(reps):
        target = y + np.array(k, dtype=float)
        seed = target @ minv.T

        def residual_fn(x, target=target):
            return P.lift_apply(x) - target

        x, res, ok, traces = newton(residual_fn, seed)
        if not ok.all():
            bad = np.flatnonzero(~ok)
            failures.append((branch, bad, [t[bad] for t in traces]))
        out[:, branch] = canonical_numeric(x)
    if failures:
        parts = [f"branch {b}: points {idx.tolist()[:10]}" for b, idx, _ in failures]
        raise NewtonDiverged("preimage Newton failed for " + "; ".join(parts), failures)
    return out


def preimages_perturbed(P: PerturbedMap, y: SpherePoint) -> tuple[SpherePoint, ...]:
    pts = preimages_batch(P, np.array(y.as_floats()))[0]
    return tuple(SpherePoint((float(p[0]), float(p[1]))) for p in pts)


# --- diagnostics ------------------------------------------------------------------


def equivariance_discrepancy(P: PerturbedMap, x) -> np.ndarray:
    """``|F via x| - |F via -x|`` after canonicalization, per point."""
    x = np.asarray(x, dtype=float)
    a = P.sphere_apply(x)
    b = P.sphere_apply(np.mod(-x, 1.0))
    return np.max(np.abs(a - b), axis=-1)


def periodicity_discrepancy(P: PerturbedMap, x, k) -> np.ndarray:
    """``|G(x + k) - G(x) - M k|`` per point, ``k`` integer vectors."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    return np.max(np.abs(P.lift_apply(x + k) - P.lift_apply(x) - P.unperturbed(k)), axis=-1)


def fd_scale_defect(P: PerturbedMap, x, steps: tuple[float, float] = (1e-4, 1e-5)) -> np.ndarray:
    """Max-entry gap between central-difference Jacobians at two step sizes.

    Computed in lift charts (inputs and outputs unreduced), where the map
    is C^1 everywhere; a kink would show up as an O(1) gap.
    """
    x = np.asarray(x, dtype=float)
    J1 = fd_jacobian(P.lift_apply, x, steps[0])
    J2 = fd_jacobian(P.lift_apply, x, steps[1])
    return np.max(np.abs(J1 - J2), axis=(-2, -1))


def branch_chart_defect(P: PerturbedMap, branch_lift, h: float = 1e-6, directions: int = 16) -> float:
    """Non-linearity of ``F`` at a branch point in orbifold charts.

    Near a 2-torsion point ``b`` the sphere has the chart ``w = z^2`` with
    ``z = x - b`` read as a complex number.  In such charts ``F`` is
    homogeneous of degree one at ``b``, so it is differentiable there iff
    ``w -> F(w)`` is real-linear.  Returns the largest relative violation of
    additivity over pairs of orthogonal directions; it vanishes when the
    local linear part is conformal.
    """
    b = np.asarray(branch_lift, dtype=float)
    fb = P.lift_apply(b)

    def chart_map(w: complex) -> complex:
        z = np.sqrt(w)
        x = b + np.array([z.real, z.imag])
        dz = P.lift_apply(x) - fb
        return complex(dz[0], dz[1]) ** 2

    worst = 0.0
    for t in np.linspace(0.0, math.pi, directions, endpoint=False):
        w1 = h * complex(math.cos(t), math.sin(t))
        w2 = 1j * w1
        lhs = chart_map(w1 + w2)
        rhs = chart_map(w1) + chart_map(w2)
        scale = max(abs(chart_map(w1)), abs(chart_map(w2)), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst
