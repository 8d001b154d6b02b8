"""Basins of the two sinks, the repeller ``K`` and its stable and unstable leaves.

Classification runs on canonical lifts.  Pixel-center escape time alone
cannot see ``K``: a float orbit never stays on a hyperbolic repeller, so
every center is eventually captured.  The default kernel therefore tracks
a first-order footprint of the pixel, ``rho_n = |DF^n| * rho_0``, and only
commits to a basin when the whole footprint sits inside an attractor ball.
A pixel whose footprint grows too large first is split into quadrants a
few times; if it still cannot be certified it meets both basins at pixel
scale, or nearly so, and is labeled ``K_CANDIDATE``.  With ``radius = 0``
the kernel reduces to plain escape time.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .pillowcase import SpherePoint, canonical_numeric, sphere_distance
from .surgery import PerturbedMap, saddle_offset, fd_jacobian

ATTRACTOR_LIFTS = (np.array([0.0, 0.0]), np.array([0.5, 0.5]))


class BasinLabel(IntEnum):
    UNDECIDED = 0
    B1 = 1
    B2 = 2
    K_CANDIDATE = 3

    @property
    def text(self) -> str:
        return {0: "undecided", 1: "B1", 2: "B2", 3: "K_candidate"}[int(self)]


DEFAULT_PALETTE = {
    BasinLabel.B1: (0, 90, 200),
    BasinLabel.B2: (200, 60, 0),
    BasinLabel.K_CANDIDATE: (0, 0, 0),
    BasinLabel.UNDECIDED: (128, 128, 128),
}


class AttractorBallNotInvariant(RuntimeError):
    pass


class SegmentCollapse(RuntimeError):
    pass


# --- attractor balls ----------------------------------------------------------

_verified: set = set()


def verify_attractor_balls(P: PerturbedMap, eps: float, samples: int = 1000) -> float:
    """Check that each ``eps``-ball around a sink maps into itself.

    Samples the boundary circle and three interior circles.  Returns the
    worst ratio ``|F(x) - a| / eps``; raises if it reaches 1.
    """
    if not P.profile.active:
        return 0.0
    t = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    ring = np.stack([np.cos(t), np.sin(t)], axis=-1)
    worst = 0.0
    for a in ATTRACTOR_LIFTS:
        for frac in (1.0, 0.75, 0.5, 0.25):
            pts = a + frac * eps * ring
            d = sphere_distance(P.sphere_apply(pts), a)
            worst = max(worst, float(np.max(d)) / eps)
    if worst >= 1.0:
        raise AttractorBallNotInvariant(
            f"eps_attract={eps} ball is not forward-invariant (ratio {worst:.3f}); shrink eps_attract"
        )
    return worst


def _ensure_verified(P: PerturbedMap, eps: float) -> None:
    key = (P.matrix, P.profile, eps)
    if key not in _verified:
        verify_attractor_balls(P, eps)
        _verified.add(key)


# --- classification kernel ------------------------------------------------------


def default_tau(P: PerturbedMap) -> float:
    """Footprint size at which a pixel is declared to straddle basins.

    A quarter of the immediate-basin half-width ``u*``: larger footprints are
    distorted enough by the bump that the linear estimate occasionally
    certifies a pixel that a supersampled check shows meeting both basins.
    """
    return 0.25 * saddle_offset(P) if P.profile.active else math.inf


def classify_points(
    P: PerturbedMap,
    x,
    max_iter: int = 5000,
    eps_attract: float = 1e-3,
    radius=0.0,
    tau: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Labels and capture times for an array of lifts ``x`` of shape ``(N, 2)``.

    ``radius`` is the initial footprint (scalar or per point).  Capture
    times are ``-1`` for points that are not captured.  Each point's result
    depends only on that point, so any partition of the input gives the
    same answer.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if eps_attract <= 0:
        raise ValueError("eps_attract must be > 0")
    x = canonical_numeric(np.atleast_2d(np.asarray(x, dtype=float)))
    n = len(x)
    labels = np.full(n, BasinLabel.K_CANDIDATE, dtype=np.uint8)
    iters = np.full(n, -1, dtype=np.int32)
    if not P.profile.active or n == 0:
        return labels, iters
    _ensure_verified(P, eps_attract)
    tau = default_tau(P) if tau is None else tau
    rho0 = np.broadcast_to(np.asarray(radius, dtype=float), (n,)).copy()
    track = bool(np.any(rho0 > 0))

    idx = np.arange(n)
    j00, j01, j10, j11 = np.ones(n), np.zeros(n), np.zeros(n), np.ones(n)
    rho = rho0.copy()
    for step in range(max_iter + 1):
        d1 = sphere_distance(x, ATTRACTOR_LIFTS[0])
        d2 = sphere_distance(x, ATTRACTOR_LIFTS[1])
        in1 = d1 + rho < eps_attract
        in2 = d2 + rho < eps_attract
        done = in1 | in2
        labels[idx[in1]] = BasinLabel.B1
        labels[idx[in2]] = BasinLabel.B2
        iters[idx[done]] = step
        if track:
            done |= rho > tau
        if step == max_iter:
            break
        keep = ~done
        x, idx, rho0 = x[keep], idx[keep], rho0[keep]
        if track:
            J = P.jacobian(x)
            j00, j01, j10, j11 = (
                J[:, 0, 0] * j00[keep] + J[:, 0, 1] * j10[keep],
                J[:, 0, 0] * j01[keep] + J[:, 0, 1] * j11[keep],
                J[:, 1, 0] * j00[keep] + J[:, 1, 1] * j10[keep],
                J[:, 1, 0] * j01[keep] + J[:, 1, 1] * j11[keep],
            )
            # largest singular value of a 2x2 matrix in closed form
            fro = j00 * j00 + j01 * j01 + j10 * j10 + j11 * j11
            det = j00 * j11 - j01 * j10
            disc = np.sqrt(np.maximum(fro * fro - 4.0 * det * det, 0.0))
            rho = np.sqrt(0.5 * (fro + disc)) * rho0
        else:
            rho = rho[keep]
        nxt = P.sphere_apply(x)
        # a float fixed point never moves and is never captured
        moving = np.any(nxt != x, axis=-1)
        x, idx, rho, rho0 = nxt[moving], idx[moving], rho[moving], rho0[moving]
        if track:
            j00, j01, j10, j11 = j00[moving], j01[moving], j10[moving], j11[moving]
        if len(x) == 0:
            break
    return labels, iters


def classify_point(
    x: SpherePoint,
    P: PerturbedMap,
    max_iter: int = 5000,
    eps_attract: float = 1e-3,
    radius: float = 0.0,
) -> BasinLabel:
    labels, _ = classify_points(P, np.array([x.as_floats()]), max_iter, eps_attract, radius)
    return BasinLabel(int(labels[0]))


# --- rasters --------------------------------------------------------------------


def pixel_centers(width: int, height: int) -> np.ndarray:
    """Pixel centers, shape ``(height, width, 2)``, top row first."""
    x1 = (np.arange(width) + 0.5) / width
    x2 = 1.0 - (np.arange(height) + 0.5) / height
    g1, g2 = np.meshgrid(x1, x2)
    return np.stack([g1, g2], axis=-1)


@dataclass
class RasterGrid:
    width: int
    height: int
    labels: np.ndarray
    iterations: np.ndarray
    meta: dict = field(default_factory=dict)

    def centers(self) -> np.ndarray:
        return pixel_centers(self.width, self.height)

    def counts(self) -> dict[BasinLabel, int]:
        return {lab: int(np.sum(self.labels == lab)) for lab in BasinLabel}

    def fraction(self, label: BasinLabel) -> float:
        return float(np.mean(self.labels == label))

    def symmetric_mismatch(self) -> np.ndarray:
        """Mask of pixels whose label differs from the pixel of ``-x``."""
        return self.labels != self.labels[::-1, ::-1]

    def symmetric_agreement(self) -> float:
        return 1.0 - float(np.mean(self.symmetric_mismatch()))

    def points(self, label: BasinLabel) -> np.ndarray:
        return self.centers()[self.labels == label]


_QUADRANTS = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]])


def classify_cells(
    P: PerturbedMap,
    centers,
    half_w: float,
    half_h: float,
    max_iter: int = 5000,
    eps_attract: float = 1e-3,
    refine: int = 2,
    tau: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Classify rectangular cells ``center +- (half_w, half_h)``.

    A cell whose footprint outgrows ``tau`` is split into four quadrants,
    up to ``refine`` times.  It is assigned a basin only when every quadrant
    is certified into that same basin; capture time is then the latest of
    the quadrants.  Everything else is ``K_CANDIDATE``.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    lab, it = classify_points(P, centers, max_iter, eps_attract, math.hypot(half_w, half_h), tau)
    if refine == 0 or not P.profile.active:
        return lab, it
    open_ = np.flatnonzero(lab == BasinLabel.K_CANDIDATE)
    if len(open_) == 0:
        return lab, it
    offsets = 0.5 * _QUADRANTS * np.array([half_w, half_h])
    sub = (centers[open_, None, :] + offsets[None]).reshape(-1, 2)
    sl, si = classify_cells(P, sub, 0.5 * half_w, 0.5 * half_h, max_iter, eps_attract, refine - 1, tau)
    sl, si = sl.reshape(-1, 4), si.reshape(-1, 4)
    for basin in (BasinLabel.B1, BasinLabel.B2):
        hit = np.all(sl == basin, axis=1)
        lab[open_[hit]] = basin
        it[open_[hit]] = si[hit].max(axis=1)
    return lab, it


def compute_basins(
    P: PerturbedMap,
    width: int,
    height: int | None = None,
    max_iter: int = 5000,
    eps_attract: float = 1e-3,
    footprint: bool = True,
    refine: int = 2,
    workers: int | None = None,
    chunk_rows: int = 8,
) -> RasterGrid:
    """Classify every pixel of a ``width x height`` raster of ``[0,1)^2``.

    With ``footprint`` (the default) each pixel is treated as a cell and
    classified by :func:`classify_cells`; without it the pixel center alone
    is iterated.  Rows are split into fixed-size chunks that are classified
    independently, so the result does not depend on ``workers``.
    """
    height = width if height is None else height
    if width < 16 or height < 16:
        raise ValueError(f"raster must be at least 16x16, got {width}x{height}")
    centers = pixel_centers(width, height)
    half_w, half_h = (0.5 / width, 0.5 / height) if footprint else (0.0, 0.0)
    refine = refine if footprint else 0
    labels = np.empty((height, width), dtype=np.uint8)
    iters = np.empty((height, width), dtype=np.int32)
    if P.profile.active:
        _ensure_verified(P, eps_attract)

    def run(r0: int) -> None:
        block = centers[r0 : r0 + chunk_rows].reshape(-1, 2)
        lab, it = classify_cells(P, block, half_w, half_h, max_iter, eps_attract, refine)
        rows = len(block) // width
        labels[r0 : r0 + rows] = lab.reshape(rows, width)
        iters[r0 : r0 + rows] = it.reshape(rows, width)

    starts = range(0, height, chunk_rows)
    workers = workers if workers is not None else min(8, os.cpu_count() or 1)
    if workers <= 1:
        for r0 in starts:
            run(r0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    meta = {
        "matrix": str(P.matrix),
        "r": P.profile.r,
        "mu": P.profile.mu,
        "max_iter": max_iter,
        "eps_attract": eps_attract,
        "footprint": footprint,
        "refine": refine,
    }
    return RasterGrid(width, height, labels, iters, meta)


# --- K as a point set -------------------------------------------------------


class KSet:
    """Finite sample of ``K`` with nearest-neighbour queries in the sphere metric.

    Both ``q`` and ``-q`` are stored in a periodic tree, which realizes
    ``min(|p - q|_T, |p + q|_T)``.
    """

    def __init__(self, points):
        pts = canonical_numeric(np.atleast_2d(np.asarray(points, dtype=float)))
        if len(pts) == 0:
            raise ValueError("K sample is empty")
        self.points = pts
        both = np.concatenate([pts, canonical_torus(-pts)])
        self._tree = cKDTree(both, boxsize=1.0)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_grid(cls, grid: RasterGrid) -> "KSet":
        return cls(grid.points(BasinLabel.K_CANDIDATE))

    def distance(self, q) -> np.ndarray:
        q = canonical_torus(np.atleast_2d(np.asarray(q, dtype=float)))
        d, _ = self._tree.query(q)
        return d


def canonical_torus(x: np.ndarray) -> np.ndarray:
    y = np.mod(x, 1.0)
    return np.where(y >= 1.0, 0.0, y)


@dataclass(frozen=True)
class InvarianceReport:
    eps: float
    samples: int
    forward_rate: float
    backward_rate: float
    forward_violators: tuple[tuple[float, float], ...]
    backward_violators: tuple[tuple[float, float], ...]
    threshold: float = 0.99

    @property
    def passed(self) -> bool:
        return self.forward_rate >= self.threshold and self.backward_rate >= self.threshold


def invariance_check(samples, kset: KSet, P: PerturbedMap, eps: float) -> InvarianceReport:
    """Sampled complete invariance: ``F(k)`` and both preimages of ``k`` must
    land within ``eps`` of the reference set ``kset``."""
    from .surgery import preimages_batch

    samples = canonical_numeric(np.atleast_2d(np.asarray(samples, dtype=float)))
    if len(samples) == 0:
        raise ValueError("no samples")
    fwd = kset.distance(P.sphere_apply(samples)) <= eps
    pre = preimages_batch(P, samples)
    bwd = (kset.distance(pre[:, 0]) <= eps) & (kset.distance(pre[:, 1]) <= eps)
    as_tuples = lambda a: tuple((float(p[0]), float(p[1])) for p in a)
    return InvarianceReport(
        eps=eps,
        samples=len(samples),
        forward_rate=float(np.mean(fwd)),
        backward_rate=float(np.mean(bwd)),
        forward_violators=as_tuples(samples[~fwd]),
        backward_violators=as_tuples(samples[~bwd]),
    )


def sample_kset(grid: RasterGrid, count: int, seed: int = 42) -> np.ndarray:
    pts = grid.points(BasinLabel.K_CANDIDATE)
    if len(pts) == 0:
        raise ValueError("raster has no K_candidate pixels")
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(len(pts), size=min(count, len(pts)), replace=False))
    return pts[pick]


# --- unstable leaves ------------------------------------------------------------


@dataclass(frozen=True)
class LeafTrace:
    """A traced unstable leaf.

    ``lifts`` is a continuous polyline in the plane, ``points`` the
    corresponding canonical sphere lifts; ``generations`` counts how many
    times the fundamental segment was pushed forward.
    """

    lifts: np.ndarray
    arc_length: float
    generations: int
    delta: float

    @property
    def points(self) -> np.ndarray:
        return canonical_numeric(self.lifts)

    def __len__(self) -> int:
        return len(self.lifts)

    def max_gap(self) -> float:
        if len(self.lifts) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(np.diff(self.lifts, axis=0), axis=1)))


def _fixed_lift(P: PerturbedMap, x: np.ndarray, tol: float = 1e-6):
    """``(sign, k)`` with ``sign * G(x) - k == x`` up to ``tol``."""
    y = P.lift_apply(x)
    for sign in (1.0, -1.0):
        k = np.round(sign * y - x)
        if np.max(np.abs(sign * y - k - x)) < tol:
            return sign, k
    raise ValueError(f"seed {x} is not a fixed point of F (tolerance {tol})")


def _push(G, seg: np.ndarray, delta: float, budget: int) -> np.ndarray:
    """Image of a polyline, refined so consecutive images are <= delta apart."""
    src = seg
    img = G(src)
    while True:
        gaps = np.linalg.norm(np.diff(img, axis=0), axis=1)
        bad = np.flatnonzero(gaps > delta)
        if len(bad) == 0:
            return img
        if len(img) + len(bad) > budget:
            raise SegmentCollapse(f"subdivision exceeded the point budget of {budget}")
        mid = 0.5 * (src[bad] + src[bad + 1])
        src = np.insert(src, bad + 1, mid, axis=0)
        img = np.insert(img, bad + 1, G(mid), axis=0)


def _polyline_length(p: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1)))


def _grow_branch(G, x, v, limit, delta, seed_offset, budget, stop_when_stalled):
    """Push the fundamental segment ``[a, G(a)]``, ``a = x + seed_offset v``,
    forward until the branch is ``limit`` long (or stops moving)."""
    a = x + seed_offset * v
    b = G(a[None, :])[0]
    t = np.linspace(0.0, 1.0, max(2, int(np.ceil(np.linalg.norm(b - a) / delta)) + 1))
    seg = a + t[:, None] * (b - a)
    pieces = [x[None, :], seg]
    length = float(np.linalg.norm(a - x)) + _polyline_length(seg)
    total = len(seg) + 1
    gens = 0
    while length < limit:
        nxt = _push(G, seg, delta, budget)
        seg_len = _polyline_length(nxt)
        gens += 1
        pieces.append(nxt[1:])
        length += seg_len
        total += len(nxt) - 1
        if total > budget:
            raise SegmentCollapse(f"leaf exceeded the point budget of {budget}")
        if stop_when_stalled and seg_len < 1e-12:
            break
        seg = nxt
    return np.concatenate(pieces), length, gens


def _seed_frame(P: PerturbedMap, start: SpherePoint):
    x = np.array(start.as_floats(), dtype=float)
    sign, k = _fixed_lift(P, x)

    def G(p):
        return sign * P.lift_apply(p) - k

    ev, vecs = np.linalg.eig(fd_jacobian(G, x))
    if np.max(np.abs(ev.imag)) > 0:
        raise SegmentCollapse(f"seed has complex multipliers {ev}")
    ev = ev.real
    return x, sign, k, G, ev, vecs.real


def _truncate(poly: np.ndarray, target_length: float):
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(poly, axis=0), axis=1))])
    stop = min(int(np.searchsorted(cum, target_length)) + 1, len(poly))
    return poly[:stop], float(cum[stop - 1])


def trace_unstable_leaf(
    P: PerturbedMap,
    start: SpherePoint,
    target_length: float,
    delta: float = 1e-3,
    seed_offset: float = 1e-6,
    budget: int = 5_000_000,
) -> LeafTrace:
    """Grow the unstable manifold of a fixed point to arc-length ``target_length``.

    Works on a lift ``G_hat = sign * G - k`` that fixes the seed.  The short
    segment from the seed along the expanding eigenvector is pushed forward
    generation by generation.  The branch heading into the sink is grown
    first, until it stops moving; then the outer branch is grown until the
    target length is reached.  The polyline therefore runs from the sink
    side, through the seed, outwards, and a longer target extends a shorter
    one.
    """
    x, _, _, G, ev, vecs = _seed_frame(P, start)
    expanding = np.flatnonzero(np.abs(ev) > 1.0 + 1e-9)
    if len(expanding) != 1:
        raise SegmentCollapse(f"seed has multipliers {ev}; need exactly one expanding direction")
    v = vecs[:, expanding[0]] / np.linalg.norm(vecs[:, expanding[0]])
    step = G if ev[expanding[0]] > 0 else (lambda p: G(G(p)))

    inner, inner_len, g1 = _grow_branch(step, x, -v, math.inf, delta, seed_offset, budget, True)
    outer, _, g2 = _grow_branch(
        step, x, v, max(0.0, target_length - inner_len) + delta, delta, seed_offset, budget, False
    )
    poly, length = _truncate(np.concatenate([inner[::-1], outer[1:]]), target_length)
    return LeafTrace(poly, length, g1 + g2, delta)


def lift_inverse(P: PerturbedMap, sign: float, k: np.ndarray):
    """The inverse of ``y -> sign * G(y) - k`` on the plane.

    ``G`` is a proper local diffeomorphism of ``R^2`` (its determinant is
    positive everywhere), hence a global diffeomorphism; Newton is seeded
    at the inverse of the linear part.
    """
    M = P.matrix
    minv = np.array([[M.d, -M.b], [-M.c, M.a]], dtype=float) / M.det

    def inv(x):
        x = np.atleast_2d(x)
        target = sign * (x + k)
        y = target @ minv.T
        for _ in range(60):
            r = P.lift_apply(y) - target
            if np.max(np.abs(r)) < 1e-13:
                break
            J = P.jacobian(y)
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            y = y - np.stack(
                [
                    (J[:, 1, 1] * r[:, 0] - J[:, 0, 1] * r[:, 1]) / det,
                    (J[:, 0, 0] * r[:, 1] - J[:, 1, 0] * r[:, 0]) / det,
                ],
                axis=-1,
            )
        else:
            raise SegmentCollapse("inverse branch Newton did not converge")
        return y

    return inv


def trace_stable_leaf(
    P: PerturbedMap,
    start: SpherePoint,
    target_length: float,
    delta: float = 1e-3,
    seed_offset: float = 1e-6,
    budget: int = 5_000_000,
) -> LeafTrace:
    """Grow the stable manifold of a saddle to arc-length ``target_length``.

    Every point of the stable manifold converges to the saddle, so the
    whole leaf lies in ``K``.  Both branches are grown to half the target
    by pulling the fundamental segment back under the inverse lift.
    """
    x, sign, k, _, ev, vecs = _seed_frame(P, start)
    contracting = np.flatnonzero(np.abs(ev) < 1.0 - 1e-9)
    if len(contracting) != 1:
        raise SegmentCollapse(f"seed has multipliers {ev}; need exactly one contracting direction")
    v = vecs[:, contracting[0]] / np.linalg.norm(vecs[:, contracting[0]])
    inv = lift_inverse(P, sign, k)
    step = inv if ev[contracting[0]] > 0 else (lambda p: inv(inv(p)))
    half = 0.5 * target_length
    neg, _, g1 = _grow_branch(step, x, -v, half + delta, delta, seed_offset, budget, False)
    pos, _, g2 = _grow_branch(step, x, v, half + delta, delta, seed_offset, budget, False)
    neg, _ = _truncate(neg, half)
    pos, _ = _truncate(pos, half)
    poly = np.concatenate([neg[::-1], pos[1:]])
    return LeafTrace(poly, _polyline_length(poly), g1 + g2, delta)


def density_statistic(trace, kset: KSet, eps: float) -> float:
    """Fraction of ``kset`` points within ``eps`` of the trace's vertices.

    Vertices are at most ``delta`` apart, so this undercounts coverage of
    the polyline by at most ``delta / 2`` in distance.
    """
    pts = trace.points if isinstance(trace, LeafTrace) else np.asarray(trace, dtype=float)
    if len(pts) == 0:
        return 0.0
    ref = KSet(pts)
    return float(np.mean(ref.distance(kset.points) <= eps))


def leaf_proximity(trace: LeafTrace, kset: KSet, eps: float) -> float:
    """Fraction of trace vertices within ``eps`` of ``kset``."""
    return float(np.mean(kset.distance(trace.points) <= eps))


# --- output -------------------------------------------------------------------------


def ppm_bytes(grid: RasterGrid, palette: dict | None = None) -> bytes:
    palette = DEFAULT_PALETTE if palette is None else palette
    lut = np.zeros((256, 3), dtype=np.uint8)
    for lab, rgb in palette.items():
        lut[int(lab)] = rgb
    header = f"P6\n{grid.width} {grid.height}\n255\n".encode("ascii")
    return header + lut[grid.labels].tobytes()


def render_ppm(grid: RasterGrid, path, palette: dict | None = None) -> Path:
    path = Path(path)
    data = ppm_bytes(grid, palette)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write PPM to {path}: {exc}") from exc
    return path


def samples_csv(points, labels, iterations) -> str:
    lines = ["x1,x2,label,iterations_to_capture"]
    for p, lab, it in zip(np.asarray(points), labels, iterations):
        lines.append(f"{p[0]:.17g},{p[1]:.17g},{BasinLabel(int(lab)).text},{int(it)}")
    return "\n".join(lines) + "\n"
