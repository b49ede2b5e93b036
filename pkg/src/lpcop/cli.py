"""Command-line entry point: ``lpcop <subcommand> ...`` or ``python -m lpcop``.

Exit codes: 0 success, 2 domain/validation error, 3 I/O error.
Outputs carry no timestamps, so identical config and seed give byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .copula import (
    CopulaParams,
    Variant,
    copula_exists,
    density_variant,
    parse_p,
    rho,
)
from .specfun import DomainError, RngStream

EXIT_DOMAIN = 2
EXIT_IO = 3


def fmt(x: float) -> str:
    """Shortest round-trip repr of a float."""
    return repr(float(x))


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, np.integer, str)) else fmt(v) for v in row])


def read_matrix_csv(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DomainError(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
    if data.size == 0:
        raise DomainError(f"{path}: no data rows")
    return data


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(type(o))


def write_json(path: Path, obj: dict) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default, allow_nan=False)
    Path(path).write_text(text + "\n")


def metadata(args: argparse.Namespace) -> dict:
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
    if isinstance(config.get("p"), float) and math.isinf(config["p"]):
        config["p"] = "inf"
    return {"version": __version__, "seed": getattr(args, "seed", None), "config": config}


# SVG ------------------------------------------------------------------------

SVG_SIZE = 600
SVG_SEGMENTS = 256


def _ball_boundary(q: float, center: float, radius: float, quarter: bool) -> list[tuple[float, float]]:
    """Points of {||(x, y) - c||_q = radius}, as a closed 256-segment polyline."""
    span = 0.5 * math.pi if quarter else 2 * math.pi
    out = []
    for k in range(SVG_SEGMENTS + 1):
        t = span * k / SVG_SEGMENTS
        c, s = math.cos(t), math.sin(t)
        if math.isinf(q):
            nrm = max(abs(c), abs(s))
        else:
            nrm = (abs(c) ** q + abs(s) ** q) ** (1.0 / q)
        out.append((center + radius * c / nrm, center + radius * s / nrm))
    return out


def write_svg(path: Path, points, lo: float = 0.0, hi: float = 1.0, curves=()) -> None:
    def sx(x):
        return (x - lo) / (hi - lo) * SVG_SIZE

    def sy(y):
        return SVG_SIZE - (y - lo) / (hi - lo) * SVG_SIZE

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" '
        f'width="{SVG_SIZE}" height="{SVG_SIZE}">',
        f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white" stroke="black"/>',
    ]
    for x, y in points:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="1.5" fill="black"/>')
    for curve in curves:
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in curve)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="red" stroke-width="1.5"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


# subcommands ------------------------------------------------------------------


def _params(args) -> CopulaParams:
    params = CopulaParams(args.n, args.p)
    if not copula_exists(params.n, params.p):
        raise DomainError(
            f"no L_p-norm spherical copula for n={params.n}, p={params.p:g}: "
            f"requires p >= n-1 = {params.n - 1}"
        )
    return params


def cmd_sample(args) -> None:
    from .sampler import sample_copula

    params = _params(args)
    batch = sample_copula(RngStream(args.seed), params, args.m, args.variant)
    x = batch.data
    out = Path(args.out)
    write_csv(out, [f"x{i + 1}" for i in range(params.n)], x.tolist())
    summary = {"mean": x.mean(axis=0).tolist()}
    if args.m >= 2:
        corr = np.corrcoef(x.T) if params.n >= 2 else np.ones((1, 1))
        summary["correlation"] = corr.tolist()
    meta = metadata(args)
    meta.update({"rows": args.m, "variant": batch.variant.value, "params": params.to_dict(), "summary": summary})
    if params.n == 2 and not params.is_inf:
        meta["rho_theory"] = rho(params.p) if batch.variant is Variant.POSITIVE else None
    write_json(out.with_suffix(".json"), meta)
    if args.svg:
        if params.n != 2:
            raise DomainError("--svg needs n = 2")
        v = batch.variant
        if v is Variant.POSITIVE:
            curves, lo = [_ball_boundary(params.p, 0.0, 1.0, True)], 0.0
        elif v is Variant.SIGNED:
            curves, lo = [_ball_boundary(params.p, 0.0, 1.0, False)], -1.0
        else:
            curves, lo = [_ball_boundary(params.p, 0.5, 0.5, False)], 0.0
        write_svg(Path(args.svg), x, lo=lo, hi=1.0, curves=curves)


def cmd_density(args) -> None:
    params = _params(args)
    out = Path(args.out)
    header = [f"x{i + 1}" for i in range(params.n)] + ["density"]
    if args.point:
        pts = np.array([[float(v) for v in s.split(",")] for s in args.point])
        if pts.shape[1] != params.n:
            raise DomainError(f"points must have {params.n} coordinates")
        vals = np.atleast_1d(density_variant(params, pts, args.variant))
        rows = [list(pt) + [v] for pt, v in zip(pts, vals)]
        extra = {}
    else:
        if params.n != 2:
            raise DomainError("grid evaluation needs n = 2; use --point for other n")
        g = args.grid
        lo = -1.0 if Variant.parse(args.variant) is Variant.SIGNED else 0.0
        u = lo + (np.arange(g) + 0.5) * (1.0 - lo) / g
        xx, yy = np.meshgrid(u, u, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        vals = density_variant(params, pts, args.variant)
        rows = [[a, b, v] for (a, b), v in zip(pts, vals)]
        extra = {"grid": g, "riemann_sum": float(np.sum(vals)) * ((1.0 - lo) / g) ** 2}
    write_csv(out, header, rows)
    meta = metadata(args)
    meta.update(extra)
    write_json(out.with_suffix(".json"), meta)


def cmd_rho(args) -> None:
    if args.values:
        ps = [parse_p(v) for v in args.values]
    else:
        count = int(round((args.p_max - args.p_min) / args.p_step)) + 1
        ps = [args.p_min + k * args.p_step for k in range(count)]
    out = Path(args.out)
    write_csv(out, ["p", "rho"], [[p, rho(p)] for p in ps])
    write_json(out.with_suffix(".json"), metadata(args))


def cmd_fit(args) -> None:
    from .inference import fit, p_star
    from .copula import lp_norm

    data = read_matrix_csv(Path(args.input))
    result = fit(data, p_max=args.p_max)
    d = result.to_dict()
    if result.method.value == "P_STAR":
        d["max_norm_at_p_hat"] = float(np.max(lp_norm(data, result.p_hat, axis=1)))
    else:
        d["p_star"] = p_star(data)
    meta = metadata(args)
    meta["fit"] = d
    write_json(Path(args.out), meta)
    print(
        f"p_hat={result.p_hat:.6g} method={result.method.value} "
        f"boundary_estimator={'yes' if d['boundary_estimator'] else 'no'}"
    )


def _write_coupling(outdir: Path, c, beta: float, svg: bool, p_ref: float | None):
    write_csv(outdir / "permutation.csv", ["i", "sigma_i"], [[i + 1, int(s) + 1] for i, s in enumerate(c.sigma)])
    write_csv(outdir / "trace.csv", ["sweep", "objective"], [[k, v] for k, v in enumerate(c.trace)])
    if svg:
        curves = [_ball_boundary(p_ref, 0.5, 0.5, False)] if p_ref is not None else []
        write_svg(outdir / "support.svg", c.points(), curves=curves)


def cmd_optimize(args) -> None:
    from .energy import swap_optimize

    if not 0 < args.beta < 2:
        raise DomainError(f"beta must lie in (0, 2), got {args.beta}")
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    c = swap_optimize(
        RngStream(args.seed), args.m, args.beta, args.max_sweeps, args.restarts, cycles=not args.pair_swaps_only
    )
    _write_coupling(outdir, c, args.beta, args.svg, 3.0 - args.beta)
    meta = metadata(args)
    meta.update({"objective": c.objective, "sweeps_used": c.sweeps_used, "converged": c.converged})
    write_json(outdir / "optimize.json", meta)
    print(f"objective={c.objective!r} sweeps={c.sweeps_used} converged={c.converged}")


def cmd_conjecture(args) -> None:
    from .energy import conjecture_report

    if not 0 < args.beta < 2:
        raise DomainError(f"beta must lie in (0, 2), got {args.beta}")
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rep = conjecture_report(
        RngStream(args.seed), args.beta, args.m, args.mc_samples,
        args.max_sweeps, args.restarts, args.inside_tol, cycles=not args.pair_swaps_only,
    )
    _write_coupling(outdir, rep.coupling, args.beta, args.svg, rep.p)
    meta = metadata(args)
    meta["report"] = rep.to_dict()
    write_json(outdir / "report.json", meta)
    d = rep.to_dict()
    print(
        f"heuristic={d['heuristic_value']:.6f} copula_mc={d['copula_value_mc']:.6f}"
        f"+-{d['copula_value_se']:.6f} gap={d['relative_gap']:+.4%} "
        f"inside={d['support_inside_fraction']:.3f}"
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpcop", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"lpcop {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def law_args(p):
        p.add_argument("--n", type=int, default=2, help="dimension (>= 2)")
        p.add_argument("--p", type=parse_p, default=2.0, help="shape p >= n-1, or 'inf'")
        p.add_argument("--variant", choices=[v.value for v in Variant], default="positive")

    s = sub.add_parser("sample", help="draw samples to CSV (+ JSON sidecar, optional SVG)")
    law_args(s)
    s.add_argument("--m", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="samples.csv")
    s.add_argument("--svg", default=None, help="scatter plot path (n = 2 only)")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("density", help="evaluate the copula density on a grid or at points")
    law_args(s)
    s.add_argument("--grid", type=int, default=101, help="midpoint grid size per axis (n = 2)")
    s.add_argument("--point", action="append", help="comma-separated point; repeatable")
    s.add_argument("--out", default="density.csv")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("rho", help="tabulate the bivariate correlation coefficient")
    s.add_argument("--p-min", type=float, default=1.0)
    s.add_argument("--p-max", type=float, default=10.0)
    s.add_argument("--p-step", type=float, default=1.0)
    s.add_argument("--values", nargs="*", help="explicit p values instead of a grid")
    s.add_argument("--out", default="rho.csv")
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("fit", help="estimate p from a CSV of positive-copula samples")
    s.add_argument("--input", required=True)
    s.add_argument("--p-max", type=float, default=1e3)
    s.add_argument("--out", default="fit.json")
    s.set_defaults(func=cmd_fit)

    def opt_args(p):
        p.add_argument("--beta", type=float, default=1.0)
        p.add_argument("--m", type=int, default=1000, help="grid size of the permutation coupling")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-sweeps", type=int, default=1000)
        p.add_argument("--restarts", type=int, default=1)
        p.add_argument("--out-dir", default=".")
        p.add_argument("--svg", action="store_true", help="also write support.svg")
        p.add_argument("--pair-swaps-only", action="store_true", help="skip the 3-cycle passes")

    s = sub.add_parser("optimize", help="swap local search maximizing S_beta over permutation couplings")
    opt_args(s)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("conjecture", help="compare the swap optimum with the circular copula at p = 3 - beta")
    opt_args(s)
    s.add_argument("--mc-samples", type=int, default=100_000)
    s.add_argument("--inside-tol", type=float, default=0.0)
    s.set_defaults(func=cmd_conjecture)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_DOMAIN
    try:
        args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
