"""Command-line entry point.

Exit codes: 0 success or PASS, 1 tolerance FAIL, 2 usage error, 3 resource
cap hit (partial results are still written).  A JSON config supplies default
values for any flag; flags given on the command line win:

    {"experiment": "identity",
     "parameters": {"t1": 3, "t2": 4, "x": 200, "tol": 0.02},
     "outputs": {"dir": "runs/identity"},
     "seed": 0, "workers": 1, "cap": 100000000}
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .. import moebius, pairs, transforms
from ..exceptions import DomainError, QuadratureError, ResourceCapError
from ..moebius import HPoint, as_fraction
from . import io, scan
from .identity import verify_lemma21

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from exc


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON config with defaults")
    p.add_argument("--out", type=Path, help="directory for CSV and manifest")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--cap", type=int, help="maximum predicted ball size (0 disables)")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="hypercircle", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        return p

    zarg = dict(nargs=2, type=_rational, metavar=("RE", "IM"), help="point x + iy as two rationals")

    p = cmd("count", "exact N(z, X)")
    p.add_argument("--z", **zarg)
    p.add_argument("--X", type=_rational, nargs="+")

    p = cmd("ball", "list the orbit ball with exact u")
    p.add_argument("--z", **zarg)
    p.add_argument("--X", type=_rational)

    p = cmd("trace-class", "elements of trace t with 4u <= x")
    p.add_argument("--z", **zarg)
    p.add_argument("--t", "--t1", dest="t", type=int)
    p.add_argument("--x", type=_rational)

    p = cmd("pairclass", "class number h(d1, d2, t) of form pairs")
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check with the box oracle")

    p = cmd("identity", "inner-product identity for two trace classes")
    p.add_argument("--t1", type=int)
    p.add_argument("--t2", type=int)
    p.add_argument("--x", type=float, help="x1 (and x2 unless --x2)")
    p.add_argument("--x2", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", type=int, help="quadrature grid size")

    p = cmd("transform-check", "h_{x,D}(i/2) against 4 pi x - 6 pi D")
    p.add_argument("--x", type=float)
    p.add_argument("--D", type=float)
    p.add_argument("--tol", type=float)

    p = cmd("lemma52", "smoothed count against 12x - 18D")
    p.add_argument("--z", **zarg)
    p.add_argument("--x", type=float)
    p.add_argument("--D", type=float)
    p.add_argument("--tol", type=float, help="bound on |residual| / (x / sqrt D)")

    p = cmd("error-scan", "exact N(z, X) - 3X over the default grid")
    p.add_argument("--X", type=_rational, nargs="+")
    p.add_argument("--grid", type=int, help="points per side")

    p = cmd("fit", "power-law slope of the L2 statistic from a scan CSV")
    p.add_argument("--input", type=Path)
    p.add_argument("--tol", type=float, help="maximum accepted slope")
    return top


_DEFAULTS = {
    "z": [Fraction(0), Fraction(1)], "X": None, "t": None, "x": None, "x2": None,
    "t1": None, "t2": None, "d1": None, "d2": None, "D": None, "tol": None,
    "grid": None, "input": None, "seed": 0, "workers": 1, "cap": None, "out": None,
}


def _merge_config(args):
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _Usage(f"cannot read config: {exc}") from exc
    params = dict(cfg.get("parameters", {}))
    for k in ("seed", "workers", "cap"):
        if k in cfg:
            params.setdefault(k, cfg[k])
    if "dir" in cfg.get("outputs", {}):
        params.setdefault("out", cfg["outputs"]["dir"])
    for k, default in _DEFAULTS.items():
        if not hasattr(args, k):
            continue
        if getattr(args, k) is None:
            v = params.get(k, default)
            if k == "z" and v is not None:
                v = [as_fraction(c) for c in v]
            elif k in ("X",) and v is not None and args.command in ("count", "error-scan"):
                v = [as_fraction(c) for c in (v if isinstance(v, list) else [v])]
            elif k in ("X", "x") and v is not None and args.command in ("ball", "trace-class"):
                v = as_fraction(v)
            elif k in ("out", "input") and v is not None:
                v = Path(v)
            setattr(args, k, v)
    return args


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise _Usage("missing required option(s): " + ", ".join("--" + n for n in missing))


def _point(args) -> HPoint:
    try:
        return HPoint(args.z[0], args.z[1])
    except (DomainError, ValueError) as exc:
        raise _Usage(str(exc)) from exc


class _Run:
    """Collects outputs and writes CSV and manifest at the end."""

    def __init__(self, args):
        self.args = args
        self.started = time.time()
        self.tables = {}
        self.summary = {}

    def table(self, name, header, rows):
        self.tables[name] = (header, rows)

    def finish(self, status: str):
        out = self.args.out
        if out is None:
            return
        files = {}
        for name, (header, rows) in self.tables.items():
            files[name] = str(io.write_csv(out / f"{name}.csv", header, rows))
        inputs = {k: v for k, v in vars(self.args).items() if k not in ("config", "out")}
        inputs = {k: (str(v) if isinstance(v, Path) else v) for k, v in inputs.items()}
        io.write_manifest(out / "manifest.json", command=self.args.command, inputs=inputs,
                          outputs={"files": files, "summary": self.summary},
                          seed=self.args.seed, workers=self.args.workers or 1,
                          started=self.started, status=status)


def _verdict(ok: bool) -> int:
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_count(args, run):
    _need(args, "X")
    z = _point(args)
    Ns = moebius.count_many(z, args.X, cap=args.cap, workers=args.workers)
    rows = []
    for X, N in zip(args.X, Ns):
        print(N)
        rows.append((z.x, z.y, X, N, N - 3 * X))
    run.table("count", ["x", "y", "X", "N", "err"], rows)
    return EXIT_OK


def _cmd_ball(args, run):
    _need(args, "X")
    z = _point(args)
    ents = moebius.enumerate_ball(z, args.X, cap=args.cap, workers=args.workers)
    rows = [(e.element.a, e.element.b, e.element.c, e.element.d, e.u_value, e.trace) for e in ents]
    for r in rows:
        print(" ".join(io.fmt(v) for v in r))
    run.table("ball", ["a", "b", "c", "d", "u", "trace"], rows)
    run.summary["size"] = len(rows)
    return EXIT_OK


def _cmd_trace_class(args, run):
    _need(args, "t", "x")
    z = _point(args)
    els = moebius.enumerate_trace_class(z, args.t, args.x / 4, cap=args.cap)
    print(len(els))
    run.table("trace_class", ["a", "b", "c", "d"], [g.as_tuple() for g in els])
    run.summary["count"] = len(els)
    return EXIT_OK


def _cmd_pairclass(args, run):
    _need(args, "d1", "d2", "t")
    h = pairs.class_count_h(args.d1, args.d2, args.t)
    print(h)
    run.summary["h"] = h
    row = [args.d1, args.d2, args.t, h]
    if args.oracle:
        ho = pairs.class_count_h_oracle(args.d1, args.d2, args.t)
        run.summary["oracle"] = ho
        row.append(ho)
        run.table("pairclass", ["d1", "d2", "t", "h", "h_oracle"], [row])
        return _verdict(h == ho)
    run.table("pairclass", ["d1", "d2", "t", "h"], [row])
    return EXIT_OK


def _cmd_identity(args, run):
    _need(args, "t1", "t2", "x")
    x2 = args.x if args.x2 is None else args.x2
    tol = 0.02 if args.tol is None else args.tol
    rep = verify_lemma21(args.t1, args.t2, args.x, x2, tol, n=args.grid or 1000)
    d = rep.as_dict()
    for k in ("lhs", "lhs_error", "rhs_E_term", "rhs_f_sum", "rhs", "rel_gap"):
        print(f"{k} = {d[k]:.10g}")
    run.summary.update(d)
    run.table("identity", list(d), [list(d.values())])
    return _verdict(rep.passed)


def _cmd_transform_check(args, run):
    _need(args, "x", "D")
    tol = 1e-6 if args.tol is None else args.tol
    val = transforms.h_transform(transforms.SmoothedKernel(args.x, args.D), 0.5j).real
    exact = transforms.h_exact_half(args.x, args.D)
    rel = abs(val - exact) / args.x
    print(f"h(i/2) = {val:.17g}\nexact  = {exact:.17g}\nerr/x  = {rel:.3e}")
    run.summary.update(value=val, exact=exact, rel=rel)
    run.table("transform_check", ["x", "D", "value", "exact", "rel"],
              [(args.x, args.D, val, exact, rel)])
    return _verdict(rel <= tol)


def _cmd_lemma52(args, run):
    _need(args, "x", "D")
    z = _point(args)
    rep = transforms.check_lemma52(z, args.x, args.D, cap=args.cap)
    for k in ("lhs", "main", "residual", "ratio_x_over_sqrtD"):
        print(f"{k} = {rep[k]:.10g}")
    run.summary.update(rep)
    run.table("lemma52", list(rep), [list(rep.values())])
    if args.tol is None:
        return EXIT_OK
    return _verdict(abs(rep["ratio_x_over_sqrtD"]) <= args.tol)


def _cmd_error_scan(args, run):
    Xs = list(args.X) if args.X else [Fraction(v) for v in scan.DEFAULT_X]
    n = args.grid or 16
    omega = scan.OmegaSpec(nx=n, ny=n)
    cap = moebius.DEFAULT_CAP if args.cap is None else args.cap
    ok = [X for X in Xs if not cap or moebius.predicted_size(X) <= cap]
    dropped = [X for X in Xs if X not in ok]
    res = scan.error_scan(omega, ok, workers=args.workers, cap=args.cap) if ok else None
    rows = [] if res is None else [
        (r.z.x, r.z.y, r.X, r.N, r.err, r.weight, r.nonhyp) for r in res.rows]
    run.table("error_scan", ["x", "y", "X", "N", "err", "weight", "nonhyp"], rows)
    if res is not None:
        stat = [(X, v, res.nonhyp_mean[X]) for X, v in res.l2.items()]
        run.table("l2", ["X", "l2", "nonhyp_mean"], stat)
        for X, v, nh in stat:
            print(f"{io.fmt(X)} {v:.10g} {nh:.10g}")
    if dropped:
        print("resource cap: skipped X = " + ", ".join(io.fmt(X) for X in dropped), file=sys.stderr)
        return EXIT_CAP
    return EXIT_OK


def _cmd_fit(args, run):
    _need(args, "input")
    try:
        recs = io.read_csv(args.input)
    except OSError as exc:
        raise _Usage(f"cannot read {args.input}: {exc}") from exc
    rows = [scan.ScanRow(HPoint(Fraction(r["x"]), Fraction(r["y"])), Fraction(r["X"]),
                         int(r["N"]), Fraction(r["err"]), float(r["weight"])) for r in recs]
    slope, err = scan.exponent_fit(rows)
    print(f"slope = {slope:.6f} +- {err:.6f}")
    run.summary.update(slope=slope, stderr=err)
    run.table("fit", ["slope", "stderr"], [(slope, err)])
    if args.tol is None:
        return EXIT_OK
    return _verdict(slope <= args.tol)


_COMMANDS = {
    "count": _cmd_count, "ball": _cmd_ball, "trace-class": _cmd_trace_class,
    "pairclass": _cmd_pairclass, "identity": _cmd_identity,
    "transform-check": _cmd_transform_check, "lemma52": _cmd_lemma52,
    "error-scan": _cmd_error_scan, "fit": _cmd_fit,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _merge_config(args)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    run = _Run(args)
    try:
        code = _COMMANDS[args.command](args, run)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        run.finish("cap")
        return EXIT_CAP
    except (DomainError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        run.finish("error")
        return EXIT_USAGE
    run.finish({EXIT_OK: "ok", EXIT_FAIL: "fail", EXIT_CAP: "cap"}[code])
    return code


if __name__ == "__main__":
    sys.exit(main())
