"""Command-line interface.

Subcommands: ``solve``, ``bounds``, ``sweep``, ``fuzz``, ``plot``.
Exit codes: 0 success, 1 validation error (bad input, malformed file,
degenerate ground state), 2 invariant or assertion failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .bounds import (
    chebyshev_tail_bound,
    best_s,
    theorem1_bound,
    theorem2_bound,
    verify_envelope,
    write_bound_csv,
    write_envelope_csv,
)
from .errors import (
    GapboundError,
    InsufficientData,
    InvariantViolation,
    LongRangeHopping,
    NonDecaying,
    ValidationError,
)
from .eigensolver import lowest_two, write_spectrum
from .fuzz import FAMILIES, FuzzConfig, run_fuzz
from .lattice import assemble, check_nearest_neighbor, fit_envelope
from .localization import (
    density,
    fit_localization_length,
    position_stats,
    write_fit_csv,
    write_profile_csv,
)
from .modelfile import load_model
from .svgplot import emit_plot
from .sweep import SweepConfig, default_h0_grid, read_sweep_csv, run_sweep


def _solve_pipeline(args):
    spec = load_model(args.model)
    result = lowest_two(
        assemble(spec), tol=args.tol, degeneracy_tol=args.degeneracy_tol
    )
    prof = density(result.psi0, spec)
    stats = position_stats(prof)
    return spec, result, prof, stats


def cmd_solve(args) -> int:
    spec, result, prof, stats = _solve_pipeline(args)
    print(f"model: {spec.label or args.model} (L={spec.length}, N0={spec.n0}, dim={spec.dim})")
    print(f"E0   = {result.e0:.12g}   (residual {result.residual0:.3e})")
    print(f"E1   = {result.e1:.12g}   (residual {result.residual1:.3e})")
    print(f"gap  = {result.gap:.12g}")
    print(f"<x>  = {stats.mean:.12g}")
    print(f"var  = {stats.variance:.12g}   (deltaX = {stats.delta_x:.12g})")
    if args.spectrum_out:
        write_spectrum(result, args.spectrum_out)
        print(f"spectrum written to {args.spectrum_out}")
    if args.profile_out:
        write_profile_csv(prof, args.profile_out)
        print(f"density profile written to {args.profile_out}")
    return 0


def cmd_bounds(args) -> int:
    spec, result, prof, stats = _solve_pipeline(args)
    delta_x = stats.delta_x
    center = args.center if args.center is not None else float(np.argmax(prof.p) + 1)
    print(f"model: {spec.label or args.model}  gap={result.gap:.6g}  deltaX={delta_x:.6g}")

    try:
        fit = fit_localization_length(prof, center=center)
        print(
            f"density decay fit: xi_fit={fit.xi_fit:.6g} (r^2={fit.r_squared:.6g}, "
            f"window {fit.window[0]:.3g}..{fit.window[1]:.3g}, center={center:g})"
        )
    except (InsufficientData, NonDecaying) as exc:
        fit = None
        print(f"density decay fit unavailable: {exc}")

    envelope = fit_envelope(spec, args.mu)
    print(f"fitted hopping envelope: cv={envelope.cv:.6g}, mu={envelope.mu:g}")
    b1 = theorem1_bound(envelope, result.gap, args.s, delta_x)
    bounds = [b1]
    print(
        f"theorem1: xi1={b1.xi1:.6g}, r1={b1.r1:.6g}, prefactor={b1.prefactor:.6g}, "
        f"c1={b1.c1:.6g}"
    )
    try:
        nn = check_nearest_neighbor(spec)
        b2 = theorem2_bound(nn.v0, result.gap, args.s, delta_x)
        bounds.append(b2)
        print(f"theorem2: xi2={b2.xi2:.6g}, r1={b2.r1:.6g}, prefactor={b2.prefactor:.6g}")
    except LongRangeHopping:
        b2 = None
        print("theorem2: not applicable (hopping beyond nearest neighbors)")
    except ValidationError as exc:
        b2 = None
        print(f"theorem2: not applicable ({exc})")

    checks = []
    failed = 0
    for b in bounds:
        chk = verify_envelope(prof, stats.mean, b, grid_step=args.grid_step)
        checks.append((b, chk))
        n_bad = int(chk.violations.size)
        failed += n_bad
        print(
            f"envelope check [{b.kind}]: {chk.r_grid.size} radii, "
            f"{n_bad} violation(s)"
        )

    # toolkit convenience, not a claim: pointwise minimum with the power law
    r_max = max(stats.mean - 1.0, spec.length - stats.mean)
    probes = sorted({min(b1.r1 + b1.xi1, r_max), r_max})
    for r_probe in probes:
        if r_probe <= max(b1.r1, 0.0):
            continue
        cheb = chebyshev_tail_bound(envelope, spec.length, result.gap, r_probe)
        vals = {"chebyshev": cheb, "theorem1": b1.evaluate(r_probe)}
        if b2 is not None and r_probe >= b2.r1:
            vals["theorem2"] = b2.evaluate(r_probe)
        best_kind = min(vals, key=vals.get)
        joined = ", ".join(f"{k}={v:.3e}" for k, v in vals.items())
        print(f"combined bound at R={r_probe:.4g}: min is {best_kind} ({joined})")

    if args.scan_s is not None:
        s_opt, b_opt = best_s(
            "theorem1", result.gap, delta_x, args.scan_s, envelope=envelope
        )
        print(f"s scan (theorem1) at R={args.scan_s:g}: best s={s_opt:.2f}, "
              f"bound={b_opt.evaluate(args.scan_s):.6g}")

    if args.out_prefix:
        write_bound_csv(bounds, f"{args.out_prefix}_bounds.csv")
        for b, chk in checks:
            write_envelope_csv(chk, f"{args.out_prefix}_envelope_{b.kind}.csv")
        if fit is not None:
            write_fit_csv(fit, f"{args.out_prefix}_fit.csv")
        print(f"reports written with prefix {args.out_prefix}")

    return 2 if failed else 0


def _sweep_config(args) -> SweepConfig:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        unknown = set(cfg) - {"L", "h0_min", "h0_max", "points", "s", "mu", "grid_step", "out"}
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")

    def pick(flag, key, fallback):
        return flag if flag is not None else cfg.get(key, fallback)

    grid = default_h0_grid(
        points=int(pick(args.points, "points", 100)),
        lo=float(pick(args.h0_min, "h0_min", -1.0)),
        hi=float(pick(args.h0_max, "h0_max", -0.01)),
    )
    return SweepConfig(
        L=int(pick(args.L, "L", 500)),
        h0_grid=grid,
        s=float(pick(args.s, "s", 0.5)),
        mu=float(pick(args.mu, "mu", 1.0)),
        grid_step=float(pick(args.grid_step, "grid_step", 0.5)),
        output_path=str(pick(args.out, "out", "sweep.csv")),
    )


def cmd_sweep(args) -> int:
    config = _sweep_config(args)
    rows = run_sweep(config)
    bad = sum(r.violations1 + r.violations2 for r in rows)
    finite_r2 = [r.fit_r_squared for r in rows if math.isfinite(r.fit_r_squared)]
    print(f"sweep: {len(rows)} points, L={config.L}, s={config.s:g} -> {config.output_path}")
    print(f"ratio1 in [{min(r.ratio1 for r in rows):.4g}, {max(r.ratio1 for r in rows):.4g}]")
    print(f"ratio2 in [{min(r.ratio2 for r in rows):.4g}, {max(r.ratio2 for r in rows):.4g}]")
    if finite_r2:
        print(f"fit r^2 in [{min(finite_r2):.6g}, {max(finite_r2):.6g}]")
    print(f"envelope violations: {bad}")
    if bad:
        print("invariant violation: a guaranteed envelope failed", file=sys.stderr)
        return 2
    return 0


def cmd_fuzz(args) -> int:
    config = FuzzConfig(
        seed=args.seed,
        trials=args.trials,
        size_range=(args.min_size, args.max_size),
        n0_range=(args.min_n0, args.max_n0),
        family=args.family,
    )
    try:
        report = run_fuzz(config)
    except InvariantViolation as exc:
        if exc.report is not None:
            print(exc.report.format(), end="")
        raise
    print(report.format(), end="")
    return 0


def cmd_plot(args) -> int:
    rows = read_sweep_csv(args.csv)
    emit_plot(rows, args.out)
    print(f"plot written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapbound",
        description="Spectral gaps and localization bounds for one-particle lattice models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_args(p):
        p.add_argument("model", help="model file (see README for the format)")
        p.add_argument("--tol", type=float, default=1e-10,
                       help="residual acceptance tolerance (default 1e-10)")
        p.add_argument("--degeneracy-tol", type=float, default=1e-8,
                       help="relative gap below which the ground state counts as degenerate")

    p = sub.add_parser("solve", help="diagonalize a model and report ground-state statistics")
    add_solver_args(p)
    p.add_argument("--spectrum-out", help="write the full spectrum to this file")
    p.add_argument("--profile-out", help="write the density profile CSV to this file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bounds", help="evaluate and verify localization bounds for a model")
    add_solver_args(p)
    p.add_argument("--s", type=float, default=0.5, help="bound parameter in (0,1), default 0.5")
    p.add_argument("--mu", type=float, default=1.0, help="envelope decay rate for the fit")
    p.add_argument("--grid-step", type=float, default=0.5, help="radius grid step")
    p.add_argument("--center", type=float, default=None,
                   help="decay-fit center (default: density maximum)")
    p.add_argument("--scan-s", type=float, default=None, metavar="R",
                   help="also report the envelope-minimizing s at radius R")
    p.add_argument("--out-prefix", default=None, help="write bound/envelope/fit CSV reports")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="run the impurity-chain tightness sweep")
    p.add_argument("--L", type=int, default=None, help="chain length parameter (default 500)")
    p.add_argument("--h0-min", type=float, default=None, help="strongest defect (default -1)")
    p.add_argument("--h0-max", type=float, default=None, help="weakest defect (default -0.01)")
    p.add_argument("--points", type=int, default=None, help="grid points (default 100)")
    p.add_argument("--s", type=float, default=None, help="bound parameter (default 0.5)")
    p.add_argument("--mu", type=float, default=None, help="envelope decay rate (default 1)")
    p.add_argument("--grid-step", type=float, default=None, help="envelope check step (default 0.5)")
    p.add_argument("--out", default=None, help="output CSV path (default sweep.csv)")
    p.add_argument("--config", default=None, help="JSON config file; flags override it")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fuzz", help="fuzz the certified-inequality suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--family", choices=FAMILIES, default=FAMILIES[0])
    p.add_argument("--min-size", type=int, default=4)
    p.add_argument("--max-size", type=int, default=40)
    p.add_argument("--min-n0", type=int, default=1)
    p.add_argument("--max-n0", type=int, default=3)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("plot", help="render a sweep CSV as a two-panel SVG")
    p.add_argument("csv", help="sweep CSV produced by the sweep subcommand")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except GapboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
