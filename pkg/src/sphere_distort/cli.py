"""Command-line front end.

Exit codes: 0 success, 1 a mathematical claim was violated, 2 bad input,
3 a search budget ran out.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import certify, projection, surface
from .distortion import family_from_name
from .errors import BudgetExhausted, DomainError, FixtureSyntaxError, GluingError, InvariantError
from .spherical_trig import B0, R0, chd

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
SCAN_FAMILIES = ("finf", "fk", "fkstar", "chd")
TRANSFORMS = ("finf", "fk", "fkstar", "chd")


def default_threads():
    env = os.environ.get("SPHERE_DISTORT_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise DomainError(f"SPHERE_DISTORT_THREADS={env!r} is not an integer") from None
        if n < 1:
            raise DomainError("SPHERE_DISTORT_THREADS must be at least 1")
        return n
    return os.cpu_count() or 1


def dms(rad):
    """Degrees and whole minutes, e.g. ``70°32'``."""
    total = round(math.degrees(rad) * 60.0)
    return f"{total // 60}°{total % 60:02d}'"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid_args(p):
    g = p.add_argument_group("grid")
    g.add_argument("--n-R", dest="n_R", type=int, default=64)
    g.add_argument("--n-phi", dest="n_phi", type=int, default=128)
    g.add_argument("--n-t", dest="n_t", type=int, default=128)
    g.add_argument("--refine-points", type=int, default=100)
    g.add_argument("--refine-maxfev", type=int, default=300)
    g.add_argument("--n-random", type=int, default=4096)
    g.add_argument("--floor", type=float, default=certify.PHI_FLOOR)


def _scan_kw(args):
    return dict(n_R=args.n_R, n_phi=args.n_phi, n_t=args.n_t, refine_points=args.refine_points,
                refine_maxfev=args.refine_maxfev, n_random=args.n_random, floor=args.floor,
                seed=args.seed, threads=args.threads)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def constants_rows():
    rows = [
        ("b0", B0, dms(B0)),
        ("R0", R0, dms(R0)),
        ("chd_b0", chd(B0), ""),
    ]
    for m in (1, 2, 3, math.inf):
        val = surface.minda_bound(m)
        rows.append((f"minda_m={'inf' if m == math.inf else m}", val, dms(val)))
    for q in (1.5, 2.0, 2.5, 3.0):
        rr = surface.remark_radius(q)
        rows.append((f"remark_q={q!r}", rr.literal, dms(rr.limit)))
        if math.isnan(rr.literal):
            rows.append((f"remark_q={q!r}_limit", rr.limit, dms(rr.limit)))
    return rows


def cmd_constants(args):
    lines = [certify.format_header({"subcommand": "constants", "degrees": bool(args.degrees)})]
    lines.append("name,value,dms\n")
    for name, val, deg in constants_rows():
        shown = math.degrees(val) if args.degrees else val
        lines.append(f"{name},{certify._fmt(float(shown))},{deg}\n")
    _emit("".join(lines), args.out)
    return EXIT_OK


def cmd_scan(args):
    F = family_from_name(args.family, args.k)
    if not F.spherical:
        raise DomainError("scan needs a spherical family")
    spec = certify.ScanSpec(F, args.rmax, **_scan_kw(args))
    res = certify.scan_infimum(spec, n_rows=args.rows)
    extra = {"subcommand": "scan", "threads": args.threads, "rows": args.rows}
    _emit(certify.scan_csv(res, extra, degrees=args.degrees), args.out)
    return EXIT_OK


def cmd_certify(args):
    for eps in args.eps:
        if not eps > 0:
            raise DomainError(f"eps must be positive, got {eps!r}")
        certify.theorem_setup(eps, args.theorem)
    entries, status = [], EXIT_OK
    messages = []
    for eps in args.eps:
        out = certify.certify_theorem(eps, args.theorem, delta_floor=args.delta_floor,
                                      k_cap=args.k_cap, sweep_n=args.sweep_n, **_scan_kw(args))
        if out.status == "ok":
            entries.append((eps, args.theorem, out.search.k, out.search.delta_emp))
        elif out.status == "violation":
            status = EXIT_VIOLATION
            messages.append(f"eps={eps!r}: violation: {out.message}")
        else:
            status = max(status, EXIT_BUDGET) if status != EXIT_VIOLATION else status
            messages.append(f"eps={eps!r}: {out.message}")
    cfg = {"subcommand": "certify", "theorem": args.theorem,
           "eps": " ".join(repr(e) for e in args.eps), "delta_floor": args.delta_floor,
           "k_cap": args.k_cap, "sweep_n": args.sweep_n, "threads": args.threads}
    cfg.update(_scan_kw(args))
    cfg.pop("threads")
    cfg["threads"] = args.threads
    _emit(certify.constants_csv(entries, cfg), args.out)
    for m in messages:
        print(m, file=sys.stderr)
    return status


def surface_report(C, transform=None, k=None, eps=None, variant="i"):
    """Plain-text report lines for a complex."""
    lines = [f"geometry: {C.geometry}",
             f"V={C.V} E={C.E} F={C.F} chi={C.euler_characteristic} closed={C.closed}"]
    rep = surface.total_angles(C)
    lines.append("vertex,total_angle,total_over_pi,interior")
    for i, (tot, inner) in enumerate(zip(rep.totals, rep.interior)):
        lines.append(f"{i},{tot!r},{tot / math.pi!r},{inner}")
    if C.closed:
        lines.append(f"gauss_bonnet_residual: {surface.discrete_gauss_bonnet(C).residual!r}")
    if eps is not None:
        hc = surface.check_theorem_1_4_hypotheses(C, eps, variant)
        lines.append(f"hypotheses({variant}, eps={eps!r}): passed={hc.passed} radius_ok={hc.radius_ok} "
                     f"angle_ok={hc.angle_ok} radius_witness={hc.radius_witness} "
                     f"angle_witness={hc.angle_witness}")
    if transform is not None:
        F = family_from_name(transform, k)
        flat, trep = surface.transform_complex(F, C)
        lines.append(f"transform: {F.name}")
        lines.append("vertex,transformed_angle,transformed_over_pi,transformed_excess")
        for i, (tot, ex) in enumerate(zip(trep.transformed, trep.transformed_excess)):
            lines.append(f"{i},{tot!r},{tot / math.pi!r},{ex!r}")
        if flat.closed:
            lines.append(f"flat_gauss_bonnet_residual: {surface.discrete_gauss_bonnet(flat).residual!r}")
    return lines


def cmd_surface(args):
    C = surface.load_complex(args.fixture)
    cfg = {"subcommand": "surface", "fixture": args.fixture, "transform": args.transform or "",
           "k": "" if args.k is None else args.k, "eps": "" if args.eps is None else args.eps,
           "variant": args.variant}
    body = surface_report(C, args.transform, args.k, args.eps, args.variant)
    _emit(certify.format_header(cfg) + "\n".join(body) + "\n", args.out)
    return EXIT_OK


def cmd_oracle(args):
    if args.samples < 1:
        raise DomainError("samples must be positive")
    worst = projection.oracle_residuals(args.samples, args.seed)
    cfg = {"subcommand": "oracle", "samples": args.samples, "seed": args.seed, "tol": args.tol}
    lines = [certify.format_header(cfg), "check,max_residual,ok\n"]
    bad = False
    for name in projection.ORACLE_CHECKS:
        ok = worst[name] <= args.tol
        bad |= not ok
        lines.append(f"{name},{worst[name]!r},{ok}\n")
    _emit("".join(lines), args.out)
    return EXIT_VIOLATION if bad else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="sphere-distort",
                                     description="Angle distortion of spherical triangles.")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $SPHERE_DISTORT_THREADS or all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print the named constants")
    p.add_argument("--degrees", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("scan", help="grid-and-refine scan of D over chart coordinates")
    p.add_argument("--family", choices=SCAN_FAMILIES, default="finf")
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--rows", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degrees", action="store_true")
    p.add_argument("--out")
    _grid_args(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("certify", help="search k and tabulate the empirical margin")
    p.add_argument("--theorem", choices=("1.5", "1.6"), required=True)
    p.add_argument("--eps", type=float, nargs="+", required=True)
    p.add_argument("--delta-floor", type=float, default=certify.DELTA_FLOOR)
    p.add_argument("--k-cap", type=float, default=float(certify.K_CAP))
    p.add_argument("--sweep-n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _grid_args(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("surface", help="report on a triangle complex")
    p.add_argument("fixture", help="fixture path or builtin: weierstrass, tetrahedron, shrunken")
    p.add_argument("--transform", choices=TRANSFORMS)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--variant", choices=("i", "ii"), default="i")
    p.add_argument("--out")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("oracle", help="cross-check formulas against 3D measurements")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is None:
            args.threads = default_threads()
        elif args.threads < 1:
            raise DomainError("--threads must be at least 1")
        return args.func(args)
    except FixtureSyntaxError as exc:
        print(f"error: fixture {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, GluingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
