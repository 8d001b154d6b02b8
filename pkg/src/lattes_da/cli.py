"""Command-line front end: ``lattes-da <command> [flags]``.

Every flag has a config-file twin (``key = value`` lines, ``#`` comments;
keys use underscores, e.g. ``max_iter``).  Flags override the file.  The
effective configuration is echoed at the top of every report.

Exit codes: 0 success, 1 acceptance failure, 2 input error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .lattice import DegenerateCongruence, IntMatrix2, NotHyperbolic
from .pillowcase import CENSUS_COLUMNS, UnsupportedDegree, periodic_census, verify_lattes
from .surgery import (
    InvalidProfile,
    NewtonDiverged,
    PerturbedMap,
    SaddleNotFound,
    SurgeryProfile,
    equivariance_discrepancy,
    find_saddles,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    matrix: IntMatrix2 = IntMatrix2(4, 1, 2, 1)
    r: float = 0.2
    mu: float = 0.5
    width: int = 512
    height: int = 512
    max_iter: int = 5000
    eps_attract: float = 1e-3
    eps: float | None = None
    eps_density: float = 0.05
    seed: int = 42
    out: Path = Path("out")
    n_max: int = 6
    samples: int = 1000
    length: float = 200.0
    example: str = "shift"
    depth: int = 6
    horizon: int | None = None
    workers: int | None = None

    @property
    def invariance_eps(self) -> float:
        return self.eps if self.eps is not None else 2.0 / self.width

    @property
    def suspension_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon
        return 2 * 2**self.depth if self.example == "shift" else 10_000

    def profile(self) -> SurgeryProfile:
        return SurgeryProfile(self.r, self.mu)

    def header(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "workers":
                continue
            if isinstance(v, IntMatrix2):
                v = f"{v.a},{v.b},{v.c},{v.d}"
            lines.append(f"# {f.name}={v}")
        return "\n".join(lines) + "\n"


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ConfigError(f"size must look like 512x512, got {text!r}") from None


_CASTS = {
    "r": float, "mu": float, "max_iter": int, "eps_attract": float, "eps": float,
    "eps_density": float, "seed": int, "n_max": int, "samples": int, "length": float,
    "depth": int, "horizon": int, "workers": int, "example": str, "out": Path,
    "width": int, "height": int,
}


def _coerce(key: str, value) -> dict:
    try:
        if key == "matrix":
            return {"matrix": value if isinstance(value, IntMatrix2) else IntMatrix2.parse(str(value))}
        if key == "size":
            w, h = value if isinstance(value, tuple) else _parse_size(str(value))
            return {"width": w, "height": h}
        if key not in _CASTS:
            raise ConfigError(f"unknown config key {key!r}")
        return {key: _CASTS[key](value)}
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None


def read_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out.update(_coerce(key.replace("-", "_"), value))
    return out


def validate(cfg: RunConfig) -> RunConfig:
    """Re-check module preconditions with actionable messages."""
    if cfg.width < 16 or cfg.height < 16:
        raise ConfigError(f"raster must be at least 16x16, got {cfg.width}x{cfg.height}")
    if cfg.max_iter < 1:
        raise ConfigError("max_iter must be >= 1")
    for name in ("eps_attract", "eps_density"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be > 0")
    if cfg.eps is not None and cfg.eps <= 0:
        raise ConfigError("eps must be > 0")
    if not 1 <= cfg.n_max <= 8:
        raise ConfigError(f"n_max must lie in 1..8, got {cfg.n_max}")
    if cfg.samples < 1 or cfg.length <= 0:
        raise ConfigError("samples and length must be positive")
    if cfg.example not in ("shift", "h", "trivial"):
        raise ConfigError(f"example must be shift, h or trivial, got {cfg.example!r}")
    if cfg.depth < 1:
        raise ConfigError("depth must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    try:
        cfg.profile()
    except InvalidProfile as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(read_config_file(args.config))
    for key in ("matrix", "size", *_CASTS):
        v = getattr(args, key, None)
        if v is not None:
            values.update(_coerce(key, v))
    return validate(replace(RunConfig(), **values))


# --- helpers ----------------------------------------------------------------------


def _write(cfg: RunConfig, name: str, text: str, header: bool = True) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / name
    path.write_text((cfg.header() if header else "") + text, newline="\n")
    return path


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# --- commands ----------------------------------------------------------------------


def cmd_verify_lattes(cfg: RunConfig) -> int:
    rep = verify_lattes(cfg.matrix)
    lines = [f"matrix {cfg.matrix}"]
    lines.append("critical points: " + ", ".join(map(str, rep.crit_f)))
    lines.append("critical values: " + ", ".join(map(str, rep.crit_values_f)))
    for o in rep.postcritical_orbits:
        lines.append(f"orbit: {o}")
    for b, fb in rep.branch_orbit_table:
        lines.append(f"branch {b} -> {fb}")
    for k, v in rep.flags.items():
        lines.append(f"{k}: {'PASS' if v else 'FAIL'}")
    lines.append(f"topological_polynomial: {rep.topological_polynomial}")
    text = "\n".join(lines) + "\n"
    _write(cfg, "lattes_report.txt", text)
    csv = "flag,value\n" + "".join(f"{k},{v}\n" for k, v in rep.flags.items())
    csv += f"topological_polynomial,{rep.topological_polynomial}\n"
    _write(cfg, "lattes_report.csv", csv, header=False)
    print(text, end="")
    return EXIT_OK if rep.all_passed else EXIT_FAIL


def census_csv(rows) -> str:
    out = [",".join(CENSUS_COLUMNS)]
    for r in rows:
        out.append(f"{r.n},{r.det_minus},{r.det_plus},{r.torus_count},{r.sphere_count},{r.log_rate:.12f}")
    return "\n".join(out) + "\n"


def cmd_count_periodic(cfg: RunConfig) -> int:
    rows = periodic_census(cfg.matrix, cfg.n_max)
    text = census_csv(rows)
    _write(cfg, "census.csv", text, header=False)
    print(text, end="")
    bound = math.log(abs(cfg.matrix.det)) - 1e-9
    ok = min(r.log_rate for r in rows) >= bound
    print(f"growth rate >= log|det|: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def surgery_checks(P: PerturbedMap, seed: int) -> tuple[str, bool]:
    rep = find_saddles(P)
    mu, ls = P.profile.mu, P.frame.lambda_s
    lines = [
        f"lambda_u {_fmt(rep.lambda_u)}",
        f"lambda_s {_fmt(rep.lambda_s)}",
        f"strength {_fmt(rep.strength)}",
        f"u_star {_fmt(rep.u_star)}",
    ]
    ok = True
    for a in rep.attractors:
        good = abs(a.multipliers[0] - ls) < 1e-3 and abs(a.multipliers[1] - mu) < 1e-3
        ok &= good
        lines.append(f"attractor {a.point} multipliers {a.multipliers[0]:.9f} {a.multipliers[1]:.9f} {'PASS' if good else 'FAIL'}")
    for s in rep.saddles:
        good = s.residual < 1e-10 and s.kind == "saddle"
        ok &= good
        lines.append(
            f"saddle {s.point} multipliers {s.multipliers[0]:.9f} {s.multipliers[1]:.9f} "
            f"residual {s.residual:.3e} newton_steps {len(s.newton_trace) - 1} "
            f"float_exact {s.float_exact} {'PASS' if good else 'FAIL'}"
        )
    ok &= len(rep.saddles) == 2
    x = np.random.default_rng(seed).random((10_000, 2))
    eq = float(np.max(equivariance_discrepancy(P, x)))
    ok &= eq < 1e-10
    lines.append(f"equivariance max discrepancy {eq:.3e} over 10000 points {'PASS' if eq < 1e-10 else 'FAIL'}")
    return "\n".join(lines) + "\n", ok


def cmd_surgery_report(cfg: RunConfig) -> int:
    P = PerturbedMap(cfg.matrix, cfg.profile())
    if not P.profile.active:
        text = "no surgery (r=0): the map is the bare Lattes map; no attractors, no saddles\n"
        _write(cfg, "surgery_report.txt", text)
        print(text, end="")
        return EXIT_FAIL
    text, ok = surgery_checks(P, cfg.seed)
    _write(cfg, "surgery_report.txt", text)
    print(text, end="")
    return EXIT_OK if ok else EXIT_FAIL


def _basins(cfg: RunConfig, workers=None):
    from .repeller import compute_basins

    P = PerturbedMap(cfg.matrix, cfg.profile())
    t = time.perf_counter()
    grid = compute_basins(
        P, cfg.width, cfg.height, cfg.max_iter, cfg.eps_attract,
        workers=cfg.workers if workers is None else workers,
    )
    _log(f"basins {cfg.width}x{cfg.height} in {time.perf_counter() - t:.2f}s")
    return P, grid


def _basin_lines(grid) -> tuple[list[str], bool]:
    from .repeller import BasinLabel

    counts = grid.counts()
    agree = grid.symmetric_agreement()
    lines = [f"{lab.text} {counts[lab]}" for lab in BasinLabel]
    lines.append(f"symmetric agreement {agree:.6f}")
    ok = all(counts[lab] > 0 for lab in (BasinLabel.B1, BasinLabel.B2, BasinLabel.K_CANDIDATE))
    return lines, ok and agree >= 0.999


def _dump_samples(cfg: RunConfig, grid, name: str) -> Path:
    from .repeller import samples_csv

    rng = np.random.default_rng(cfg.seed)
    flat = np.sort(rng.choice(grid.width * grid.height, size=min(cfg.samples, grid.width * grid.height), replace=False))
    pts = grid.centers().reshape(-1, 2)[flat]
    text = samples_csv(pts, grid.labels.reshape(-1)[flat], grid.iterations.reshape(-1)[flat])
    return _write(cfg, name, text, header=False)


def cmd_render_basins(cfg: RunConfig) -> int:
    from .repeller import render_ppm

    P, grid = _basins(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    render_ppm(grid, cfg.out / "basins.ppm")
    _dump_samples(cfg, grid, "basin_samples.csv")
    lines, ok = _basin_lines(grid)
    text = "\n".join(lines) + "\n"
    _write(cfg, "basins_report.txt", text)
    print(text, end="")
    return EXIT_OK if ok else EXIT_FAIL


def _invariance(cfg: RunConfig, P, grid):
    from .repeller import KSet, invariance_check, sample_kset

    kset = KSet.from_grid(grid)
    samples = sample_kset(grid, cfg.samples, cfg.seed)
    return kset, invariance_check(samples, kset, P, cfg.invariance_eps)


def cmd_invariance_check(cfg: RunConfig) -> int:
    P, grid = _basins(cfg)
    if not P.profile.active:
        print("no surgery (r=0): every point is K_candidate; invariance is vacuous")
        return EXIT_FAIL
    _, rep = _invariance(cfg, P, grid)
    text = (
        f"eps {_fmt(rep.eps)}\nsamples {rep.samples}\n"
        f"forward {rep.forward_rate:.4f}\nbackward {rep.backward_rate:.4f}\n"
        f"result {'PASS' if rep.passed else 'FAIL'}\n"
    )
    viol = ["direction,x1,x2"]
    viol += [f"forward,{_fmt(a)},{_fmt(b)}" for a, b in rep.forward_violators]
    viol += [f"backward,{_fmt(a)},{_fmt(b)}" for a, b in rep.backward_violators]
    _write(cfg, "invariance_report.txt", text)
    _write(cfg, "invariance_violators.csv", "\n".join(viol) + "\n", header=False)
    print(text, end="")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _leaf(cfg: RunConfig, P, kset):
    from .repeller import density_statistic, leaf_proximity, trace_unstable_leaf

    saddle = find_saddles(P).saddles[0].point
    trace = trace_unstable_leaf(P, saddle, cfg.length)
    return saddle, trace, density_statistic(trace, kset, cfg.eps_density), leaf_proximity(
        trace, kset, 3.0 / cfg.width
    )


def cmd_trace_leaf(cfg: RunConfig) -> int:
    from .repeller import KSet

    P, grid = _basins(cfg)
    if not P.profile.active:
        print("no surgery (r=0): no saddle to seed a leaf")
        return EXIT_FAIL
    saddle, trace, density, prox = _leaf(cfg, P, KSet.from_grid(grid))
    pts = trace.points
    _write(cfg, "leaf.csv", "x1,x2\n" + "".join(f"{_fmt(a)},{_fmt(b)}\n" for a, b in pts), header=False)
    ok = density >= 0.95
    text = (
        f"seed {saddle}\npoints {len(trace)}\narc_length {trace.arc_length:.6f}\n"
        f"generations {trace.generations}\nmax_gap {trace.max_gap():.3e}\n"
        f"near_K_fraction(3px) {prox:.4f}\n"
        f"density(eps={cfg.eps_density}) {density:.4f} {'PASS' if ok else 'FAIL'}\n"
    )
    _write(cfg, "leaf_report.txt", text)
    print(text, end="")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_suspension(cfg: RunConfig) -> int:
    from .lamination import SYSTEMS, indecomposability_verdict, visits_csv

    system = SYSTEMS[cfg.example]
    v = indecomposability_verdict(system, cfg.depth, cfg.suspension_horizon)
    print(v)
    if v.certificate is not None:
        c = v.certificate
        print(f"certificate: {c.classes} orbit classes, max cylinders visited {c.max_visited} of {c.cylinders}")
    _write(cfg, f"suspension_{cfg.example}_visits.csv", visits_csv(system, cfg.depth, v.search.visits), header=False)
    return EXIT_OK


def cmd_pipeline(cfg: RunConfig) -> int:
    from .lamination import H_SYSTEM, SHIFT_SYSTEM, h_injectivity_check, h_order_check, indecomposability_verdict
    from .pillowcase import critical_points_f, critical_values_f, project, sphere_fixed_points
    from .lattice import RationalTorusPoint
    from .repeller import ppm_bytes

    results: list[tuple[str, bool, str]] = []

    def record(name, ok, detail=""):
        results.append((name, bool(ok), detail))
        _log(f"{'PASS' if ok else 'FAIL'} {name} {detail}")

    M = cfg.matrix
    try:
        pt = lambda a, b: project(RationalTorusPoint.of(a, b))
        if M == IntMatrix2(4, 1, 2, 1):
            fix = sphere_fixed_points(M, 1)
            ok = (
                critical_points_f(M) == {pt("1/4", 0), pt("1/4", "1/2")}
                and critical_values_f(M) == {pt(0, "1/2"), pt("1/2", 0)}
                and {pt(0, 0), pt("1/2", "1/2")} <= fix
            )
            record("lattes combinatorics", ok)
        rep = verify_lattes(M)
        record("lemma suite", rep.all_passed)
    except (UnsupportedDegree, NotHyperbolic) as exc:
        record("lattes combinatorics", False, str(exc))
    rows = periodic_census(M, cfg.n_max)
    record("growth rate", min(r.log_rate for r in rows) >= math.log(abs(M.det)) - 1e-9)
    _write(cfg, "census.csv", census_csv(rows), header=False)

    P = PerturbedMap(M, cfg.profile())
    if not P.profile.active:
        record("surgery", False, "r=0: no surgery, no attractors; basin stages skipped")
    else:
        text, ok = surgery_checks(P, cfg.seed)
        _write(cfg, "surgery_report.txt", text)
        record("surgery", ok)

        P, grid = _basins(cfg)
        lines, ok = _basin_lines(grid)
        record("basins", ok, "; ".join(lines))
        data = ppm_bytes(grid)
        (cfg.out / "basins.ppm").write_bytes(data)
        _dump_samples(cfg, grid, "basin_samples.csv")
        _, seq = _basins(cfg, workers=1)
        record("determinism", ppm_bytes(seq) == data, "parallel vs sequential PPM bytes")

        kset, inv = _invariance(cfg, P, grid)
        record("invariance", inv.passed, f"forward {inv.forward_rate:.4f} backward {inv.backward_rate:.4f}")
        _, trace, density, prox = _leaf(cfg, P, kset)
        record("dense leaf", density >= 0.95, f"density {density:.4f} near_K {prox:.4f}")

    shift = indecomposability_verdict(SHIFT_SYSTEM, 6, 128)
    h = indecomposability_verdict(H_SYSTEM, 6, 10_000)
    structural = all(h_injectivity_check(d) and h_order_check(d) for d in range(1, 7))
    record("lamination", shift.indecomposable and not h.indecomposable and h.exhaustive and structural)

    summary = "".join(f"{'PASS' if ok else 'FAIL'} {name}{' : ' + d if d else ''}\n" for name, ok, d in results)
    _write(cfg, "summary.txt", summary)
    print(summary, end="")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAIL


COMMANDS = {
    "verify-lattes": cmd_verify_lattes,
    "count-periodic": cmd_count_periodic,
    "surgery-report": cmd_surgery_report,
    "render-basins": cmd_render_basins,
    "invariance-check": cmd_invariance_check,
    "trace-leaf": cmd_trace_leaf,
    "suspension": cmd_suspension,
    "pipeline": cmd_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--config", help="key=value config file; flags override it")
    g.add_argument("--matrix", help="integer matrix a,b,c,d (rows [[a,b],[c,d]])")
    g.add_argument("--r", type=float, help="bump radius")
    g.add_argument("--mu", type=float, help="attracting multiplier along e_u")
    g.add_argument("--size", type=_parse_size, help="raster WxH")
    g.add_argument("--max-iter", dest="max_iter", type=int)
    g.add_argument("--eps", type=float, help="invariance tolerance (default 2 pixel widths)")
    g.add_argument("--eps-attract", dest="eps_attract", type=float)
    g.add_argument("--eps-density", dest="eps_density", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="output directory")
    g.add_argument("--n-max", dest="n_max", type=int)
    g.add_argument("--samples", type=int)
    g.add_argument("--length", type=float, help="leaf arc-length")
    g.add_argument("--example", help="suspension example: shift, h or trivial")
    g.add_argument("--depth", type=int)
    g.add_argument("--horizon", type=int)
    g.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="lattes-da", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, NotHyperbolic, UnsupportedDegree, DegenerateCongruence, InvalidProfile) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SaddleNotFound, NewtonDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
