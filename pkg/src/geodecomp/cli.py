"""Command-line interface: ``geodecomp {decompose,check,flow,conjugacy}``.

Every command reads a JSON system spec (``-`` means stdin) and writes a
machine-readable report to stdout or, atomically, to ``--output``.

Exit codes: 0 success, 1 other library error, 2 unparsable or inconsistent input,
3 singular Gram matrix, 4 non-finite field value.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from .conjugacy import ConjugacyConfig, compare_pair
from .decomp import decompose_at
from .errors import (DimensionMismatch, GeoDecompError, NonFiniteValue, OddSymplecticDimension, SingularGram,
                     SpecParseError)
from .fields import from_poly
from .flow import IntegratorConfig, drift_along, integrate, norm2
from .geometry import to_fraction
from .poincare import check_gradient_like
from .poly import PolyVectorField
from .polyfield import decompose_exact, poly_gradient_like
from .quadrature import QuadratureConfig
from .specfile import SystemSpec

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_SINGULAR, EXIT_NONFINITE = 0, 1, 2, 3, 4


# ---------------------------------------------------------------------------
# io helpers
# ---------------------------------------------------------------------------

def read_spec(path: str) -> SystemSpec:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SpecParseError(f"cannot read spec {path!r}: {exc}") from exc
    return SystemSpec.loads(text)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(report: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **report}, indent=2) + "\n"


def parse_point(text: str, n: int, exact: bool = False) -> list:
    """Comma-separated coordinates; rationals ``p/q`` allowed."""
    try:
        parts = [p.strip() for p in text.split(",")]
        vals = [to_fraction(p) if exact else float(Fraction(p)) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecParseError(f"cannot parse point {text!r}") from exc
    if len(vals) != n:
        raise DimensionMismatch(f"point {text!r} has {len(vals)} coordinates, expected {n}")
    return vals


def var_names(n: int) -> list[str]:
    return ["x", "y", "z"][:n] if n <= 3 else [f"x{i + 1}" for i in range(n)]


def _sides(side: str) -> list[str]:
    return ["right", "left"] if side == "both" else [side]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_decompose(args) -> str:
    spec = read_spec(args.spec)
    s = spec.structure()
    n = spec.dimension
    report: dict = {"command": "decompose", "structure": s.describe(), "dimension": n}
    if args.exact:
        if not s.exact:
            raise SpecParseError("--exact needs a rational Gram matrix")
        X = spec.poly_field()
        names = var_names(n)
        report["mode"] = "exact"
        report["variables"] = names
        point = parse_point(args.at, n, exact=True) if args.at else None
        for side in _sides(args.side):
            d = decompose_exact(s, X, side)
            entry = {"H": d.H.to_text(names), "u": d.u.to_text(names),
                     "gradient_part": d.gradient_part(s).to_text(names)}
            if point is not None:
                entry["at"] = [str(c) for c in point]
                entry["H_value"] = str(d.H.eval(point))
                entry["u_value"] = [str(c) for c in d.u.eval(point)]
            report[side] = entry
    else:
        if not args.at:
            raise SpecParseError("numeric decomposition needs --at")
        q = (QuadratureConfig.adaptive_simpson(args.tol) if args.tol is not None
             else QuadratureConfig.gauss_legendre(args.nodes))
        d = decompose_at(s, spec.numeric_field(), parse_point(args.at, n), q)
        full = d.to_dict()
        full["reconstruction_residual"] = d.reconstruction_residual
        keep = {"right": ("H", "grad_H", "gradient_part", "u", "orthogonality_residual"),
                "left": ("H_star", "grad_H_star", "gradient_part_star", "u_star", "orthogonality_residual_star")}
        wanted = {"point", "X", "reconstruction_residual"}
        for side in _sides(args.side):
            wanted.update(keep[side])
        report["mode"] = "numeric"
        report["quadrature"] = {"scheme": q.scheme, "nodes": q.nodes, "tol": q.tol}
        report.update({k: v for k, v in full.items() if k in wanted})
    if args.out == "csv":
        return _flat_csv(report)
    return _json(report)


def _flat_csv(report: dict) -> str:
    """Two-column ``key,value`` CSV with dotted keys for nested entries."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])

    def walk(prefix, v):
        if isinstance(v, dict):
            for k, sub in v.items():
                walk(f"{prefix}.{k}" if prefix else k, sub)
        elif isinstance(v, list):
            for i, sub in enumerate(v):
                walk(f"{prefix}[{i}]", sub)
        else:
            w.writerow([prefix, v])

    walk("", {"schema_version": SCHEMA_VERSION, **report})
    return buf.getvalue()


def cmd_check(args) -> str:
    spec = read_spec(args.spec)
    s = spec.structure()
    numeric = args.numeric or args.samples is not None or not s.exact
    X = spec.numeric_field() if numeric else spec.poly_field()
    sides = ["left", "right"] if args.side == "both" else [args.side]
    reports = {}
    for side in sides:
        r = check_gradient_like(s, X, side, samples=args.samples, seed=args.seed)
        reports[side] = r.to_dict()
        if not args.include_samples:
            reports[side].pop("sample_points")
    out = {"command": "check", "structure": s.describe(), "seed": args.seed, "reports": reports,
           "verdict": all(r["verdict"] for r in reports.values())}
    return _json(out)


def _flow_field(spec: SystemSpec, part: str, side: str):
    """The field to integrate.  All spec fields are polynomial, so the parts
    come from the exact decomposition and are compiled once."""
    s = spec.structure()
    X = spec.poly_field()
    if part == "field":
        return from_poly(X, "field")
    if not s.exact:
        raise SpecParseError(f"--part {part} needs a rational Gram matrix")
    d = decompose_exact(s, X, side)
    if part == "rotational":
        return from_poly(d.u, "rotational")
    if part == "gradient":
        return from_poly(d.gradient_part(s), "gradient")
    if part == "sphere":  # B^{-1} u
        return from_poly(d.u.apply_matrix(s.gram), "sphere")
    if part == "hamiltonian":  # B^T grad H*, the Hamiltonian field of H* for skew G
        return from_poly(poly_gradient_like(s, decompose_exact(s, X, "left").H, "left"), "hamiltonian")
    raise SpecParseError(f"unknown part {part!r}")


def _integral(spec: SystemSpec, name: str, side: str):
    s = spec.structure()
    if name == "norm2":
        return norm2
    if name == "bform":
        G = s.G
        return lambda x: float(x @ G @ x)
    if name in ("H", "H_star"):
        if not s.exact:
            raise SpecParseError(f"--integral {name} needs a rational Gram matrix")
        H = decompose_exact(s, spec.poly_field(), "right" if name == "H" else "left").H.compile()
        return lambda x: float(H(np.asarray(x)))
    raise SpecParseError(f"unknown integral {name!r}")


def cmd_flow(args) -> str:
    spec = read_spec(args.spec)
    n = spec.dimension
    x0 = parse_point(args.x0, n)
    field = _flow_field(spec, args.part, args.side)
    cfg = IntegratorConfig(scheme=args.scheme, T=args.T, h=args.h, rtol=args.rtol, atol=args.atol,
                           max_steps=args.max_steps)
    trace = integrate(field, x0, cfg)
    if args.trace:
        write_atomic(args.trace, trace.to_csv())
    out = {"command": "flow", "part": args.part, "scheme": args.scheme, "T": args.T,
           "x0": x0, "final": [float(v) for v in trace.final], "steps": trace.step_stats()}
    if args.integral:
        out["integral"] = args.integral
        out["drift"] = drift_along(trace, _integral(spec, args.integral, args.side))
    return _json(out)


def cmd_conjugacy(args) -> str:
    if args.spec1 == "-" and args.spec2 == "-":
        raise SpecParseError("only one of --spec1/--spec2 may be read from stdin")
    sp1, sp2 = read_spec(args.spec1), read_spec(args.spec2)
    cfg = ConjugacyConfig(box_R=args.box_R, grid_k=args.grid_k, trials=args.trials, T=args.T,
                          eps=args.eps, seed=args.seed, threads=args.threads)
    pr = compare_pair(sp1.structure(), sp1.numeric_field(), sp2.structure(), sp2.numeric_field(), cfg)
    out = {"command": "conjugacy", "seed": args.seed, **pr.to_dict()}
    return _json(out)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geodecomp",
                                description="Geometric decomposition of vector fields on R^n.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="split a field into gradient-like and rotational parts")
    d.add_argument("--spec", required=True, help="system spec JSON, '-' for stdin")
    d.add_argument("--at", help="evaluation point 'x1,x2,...' (required in numeric mode)")
    d.add_argument("--side", choices=["left", "right", "both"], default="both")
    d.add_argument("--exact", action="store_true", help="exact polynomial decomposition")
    d.add_argument("--nodes", type=int, default=32, help="Gauss-Legendre nodes")
    d.add_argument("--tol", type=float, help="use adaptive Simpson with this tolerance instead")
    d.add_argument("--out", choices=["json", "csv"], default="json")
    d.add_argument("--output", default="-")
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("check", help="test whether the field is gradient-like")
    c.add_argument("--spec", required=True)
    c.add_argument("--side", choices=["left", "right", "both", "symmetric_unified", "skew_unified"],
                   default="both")
    c.add_argument("--samples", type=int, help="sample count; implies numeric mode")
    c.add_argument("--numeric", action="store_true", help="sampled Jacobian test instead of exact")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--include-samples", action="store_true")
    c.add_argument("--output", default="-")
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("flow", help="integrate a field or one of its parts")
    f.add_argument("--spec", required=True)
    f.add_argument("--x0", required=True)
    f.add_argument("--T", type=float, default=10.0)
    f.add_argument("--part", choices=["field", "rotational", "gradient", "sphere", "hamiltonian"],
                   default="field")
    f.add_argument("--side", choices=["left", "right"], default="right")
    f.add_argument("--integral", choices=["norm2", "bform", "H", "H_star"])
    f.add_argument("--scheme", choices=["dp54", "rk4"], default="dp54")
    f.add_argument("--h", type=float, default=1e-2)
    f.add_argument("--rtol", type=float, default=1e-10)
    f.add_argument("--atol", type=float, default=1e-12)
    f.add_argument("--max-steps", type=int, default=1_000_000)
    f.add_argument("--trace", help="write the trajectory CSV here")
    f.add_argument("--output", default="-")
    f.set_defaults(func=cmd_flow)

    k = sub.add_parser("conjugacy", help="check the conjugacy-criterion hypotheses for two systems")
    k.add_argument("--spec1", required=True)
    k.add_argument("--spec2", required=True)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--trials", type=int, default=32)
    k.add_argument("--box-R", dest="box_R", type=float, default=5.0)
    k.add_argument("--grid-k", dest="grid_k", type=int, default=11)
    k.add_argument("--T", type=float, default=50.0)
    k.add_argument("--eps", type=float, default=1e-3)
    k.add_argument("--threads", type=int, help="overrides GEODECOMP_THREADS")
    k.add_argument("--output", default="-")
    k.set_defaults(func=cmd_conjugacy)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
        write_atomic(args.output, text)
    except (SpecParseError, DimensionMismatch, OddSymplecticDimension) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SingularGram as exc:
        print(f"error: singular Gram matrix: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except NonFiniteValue as exc:
        print(f"error: non-finite value: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except (GeoDecompError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
