"""Command-line front end.

    finslerlab list
    finslerlab check funk-real --samples 50 --seed 7
    finslerlab rigidity perturbed-family --t 0.05,0.1,0.2 --samples 200 --seed 11
    finslerlab geodesic funk-real --x0 0,0 --u0 0.6,0.8 --T 1 --N 1000
    finslerlab parse-eval --expr "sqrt(normsq(v))" --base 0,0 --tangent 3+4i,0

JSON (check, rigidity) or CSV (geodesic) goes to stdout, a one-line summary
to stderr.  Exit codes: 0 all verdicts pass / integration completed,
1 some verdict failed, 2 usage error or unknown metric, 3 numeric failure.
"""

import argparse
import csv
import io
import itertools
import json
import sys
import time

import numpy as np

from . import __version__, dsl, geodesics, reports
from .errors import FinslerError, NumericsError, UsageError
from .metrics import COMPLEX, REAL, make_metric, parse_overrides, to_real, zoo_entry, zoo_list
from .sampling import SampleSpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--radius", type=float, default=0.8, help="sampling ball radius")
    p.add_argument("--dim", type=int, default=None, help="dimension n (default 2)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--tol-homog", type=float, default=reports.Tolerances.homog)
    p.add_argument("--tol-posdef", type=float, default=reports.Tolerances.posdef)
    p.add_argument("--tol-flat", type=float, default=reports.Tolerances.flat)
    p.add_argument("--tol-nonflat", type=float, default=reports.Tolerances.nonflat)
    p.add_argument("--fd-check", action="store_true", help="compare autodiff with finite differences")
    p.add_argument("--expr", help="DSL definition of a custom metric")
    p.add_argument("--expr-kind", choices=(REAL, COMPLEX), default=COMPLEX)
    p.add_argument("--expr-dim", type=int, default=2)
    p.add_argument("--expr-params", default="", help="comma-separated name=value pairs")


def build_parser():
    parser = argparse.ArgumentParser(prog="finslerlab", description=__doc__.split("\n")[0],
                                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"finslerlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list zoo metrics and their expected properties",
                       allow_abbrev=False)
    p.add_argument("--format", choices=("json", "text"), default="text")

    for name, help_ in (("check", "axiom and flatness checks for one metric"),
                        ("rigidity", "rigidity scan, optionally sweeping a family parameter")):
        p = sub.add_parser(name, help=help_, allow_abbrev=False)
        p.add_argument("metric", nargs="?")
        _common(p)

    p = sub.add_parser("geodesic", help="integrate a geodesic of a real (or real-form) metric",
                       allow_abbrev=False)
    p.add_argument("metric", nargs="?")
    _common(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--u0", required=True)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--output", help="write the CSV here instead of stdout")

    p = sub.add_parser("parse-eval", help="parse a DSL expression and evaluate it at a point",
                       allow_abbrev=False)
    _common(p)
    p.add_argument("--base", required=True)
    p.add_argument("--tangent", required=True)
    return parser


def _numbers(text, complex_ok=False):
    out = []
    for item in text.split(","):
        item = item.strip().replace("i", "j")
        try:
            out.append(complex(item) if complex_ok else float(item))
        except ValueError:
            raise UsageError(f"not a number: {item!r}") from None
    return out


def _extra_params(extra, entry_defaults):
    """Turn leftover ``--name value`` tokens into parameter value lists."""
    out = {}
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        key, sep, val = tok[2:].partition("=")
        if not sep:
            val = next(it, None)
            if val is None:
                raise UsageError(f"--{key} needs a value")
        if key not in entry_defaults:
            raise UsageError(f"unknown option or parameter --{key}")
        out[key] = _numbers(val)
    return out


def _resolve(args, extra, sweep_ok=False):
    """Return (builder, sweep) where builder(**params) makes the metric."""
    if args.expr:
        if args.metric:
            raise UsageError("give either a metric name or --expr, not both")
        params = parse_overrides([p for p in args.expr_params.split(",") if p.strip()])
        expr = dsl.parse(args.expr, args.expr_kind, args.expr_dim, list(params))
        sweep = _extra_params(extra, params)
        sweep.update({k: [v] for k, v in parse_overrides(args.param).items() if k in params})

        def build(**over):
            return dsl.to_metric(expr, {**params, **over}, name="expr")
        defaults = params
    else:
        if not args.metric:
            raise UsageError("a metric name or --expr is required")
        entry = zoo_entry(args.metric)
        defaults = entry.defaults
        sweep = _extra_params(extra, defaults)
        for k, v in parse_overrides(args.param).items():
            if k not in defaults:
                raise UsageError(f"{entry.name} has no parameter {k!r}")
            sweep[k] = [v]

        def build(**over):
            return entry.build(args.dim, **over)
    if not sweep_ok and any(len(v) > 1 for v in sweep.values()):
        raise UsageError("parameter lists are only accepted by `rigidity`")
    return build, sweep, defaults


def _spec(args):
    return SampleSpec(seed=args.seed, count=args.samples, radius=args.radius)


def _tol(args):
    return reports.Tolerances(args.tol_homog, args.tol_posdef, args.tol_flat, args.tol_nonflat)


def _emit(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def cmd_list(args, out, err):
    entries = zoo_list()
    if args.format == "json":
        _emit([{"name": e.name, "kind": e.kind, "doc": e.doc, "defaults": dict(e.defaults),
                "flags": dict(e.flags)} for e in entries], out)
        return EXIT_OK
    for e in entries:
        flags = ", ".join(k for k, v in e.flags.items() if v) or "-"
        params = ", ".join(f"{k}={v:g}" for k, v in e.defaults.items()) or "-"
        out.write(f"{e.name:24s} {e.kind:8s} params: {params}\n    {e.doc}\n    flags: {flags}\n")
    return EXIT_OK


def _text_check(report, out):
    out.write(f"{report['metric']} ({report['kind']}, dim {report['dim']}) "
              f"classification: {report['classification']}\n")
    for c in report["residuals"]:
        val = "-" if c["max_rel"] is None else f"{c['max_rel']:.3e}"
        out.write(f"  {c['name']:36s} {val:>12s}  {c['verdict']}\n")


def cmd_check(args, extra, out, err):
    build, sweep, _ = _resolve(args, extra)
    metric = build(**{k: v[0] for k, v in sweep.items()})
    start = time.perf_counter()
    report = reports.check_report(metric, _spec(args), _tol(args), args.fd_check)
    elapsed = time.perf_counter() - start
    if args.format == "json":
        _emit(report, out)
    else:
        _text_check(report, out)
    ok = reports.report_passes(report)
    err.write(f"check {metric.name}: {report['classification']}, "
              f"{'all checks pass' if ok else 'some checks did not pass'} "
              f"(wall time {elapsed:.2f}s)\n")
    if report["failures"]:
        return EXIT_NUMERIC
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rigidity(args, extra, out, err):
    build, sweep, defaults = _resolve(args, extra, sweep_ok=True)
    metric0 = build(**{k: v[0] for k, v in sweep.items()})
    if metric0.kind != COMPLEX:
        raise UsageError("rigidity applies to complex metrics")
    spec = _spec(args)
    keys = list(sweep)
    rows = []
    for combo in itertools.product(*(sweep[k] for k in keys)):
        metric = build(**dict(zip(keys, combo)))
        rows.append(reports.rigidity_row(metric, spec, _tol(args)))
    report = reports.rigidity_report(rows, metric0, spec, sweep)
    if args.format == "json":
        _emit(report, out)
    else:
        for r in rows:
            params = ", ".join(f"{k}={v:g}" for k, v in r["params"].items())
            out.write(f"{r['metric']} [{params}] pf={r['max_pf']:.3e} df={r['max_df']:.3e} "
                      f"zgrad={r['max_zgrad']:.3e} -> {r['classification']}\n")
    ok = reports.rigidity_passes(report)
    err.write(f"rigidity {metric0.name}: {len(rows)} row(s), "
              f"{', '.join(r['classification'] for r in rows)}\n")
    if any(r["failures"] for r in rows):
        return EXIT_NUMERIC
    return EXIT_OK if ok else EXIT_FAIL


def cmd_geodesic(args, extra, out, err):
    build, sweep, _ = _resolve(args, extra)
    metric = build(**{k: v[0] for k, v in sweep.items()})
    if metric.kind == COMPLEX:
        metric = to_real(metric)
    trace = geodesics.integrate_geodesic(metric, _numbers(args.x0), _numbers(args.u0),
                                         args.T, args.N)
    m = metric.dim
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"x_{k + 1}" for k in range(m)] + [f"u_{k + 1}" for k in range(m)])
    for row in trace.rows():
        writer.writerow([repr(float(v)) for v in row])
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    err.write(f"geodesic {metric.name}: termination={trace.termination} "
              f"deviation={trace.deviation:.3e} length={trace.length:.6g} "
              f"steps={trace.t.size - 1}\n")
    if trace.termination == geodesics.STEP_FAILURE:
        return EXIT_NUMERIC
    return EXIT_OK if trace.termination == geodesics.COMPLETED else EXIT_FAIL


def cmd_parse_eval(args, extra, out, err):
    if not args.expr:
        raise UsageError("parse-eval needs --expr")
    if extra:
        raise UsageError(f"unexpected arguments {extra}")
    params = parse_overrides([p for p in args.expr_params.split(",") if p.strip()])
    expr = dsl.parse(args.expr, args.expr_kind, args.expr_dim, list(params))
    base = _numbers(args.base, complex_ok=True)
    tangent = _numbers(args.tangent, complex_ok=True)
    if args.expr_kind == REAL:
        base = [b.real for b in base]
        tangent = [t.real for t in tangent]
    groups = dsl.GROUPS[args.expr_kind]
    value = dsl.evaluate(expr, {groups[0]: base, groups[1]: tangent, **params})
    _emit({"expr": args.expr, "kind": args.expr_kind, "dim": args.expr_dim,
           "value": float(np.real(value))}, out)
    return EXIT_OK


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        if args.command == "list":
            if extra:
                raise UsageError(f"unexpected arguments {extra}")
            return cmd_list(args, out, err)
        handler = {"check": cmd_check, "rigidity": cmd_rigidity, "geodesic": cmd_geodesic,
                   "parse-eval": cmd_parse_eval}[args.command]
        return handler(args, extra, out, err)
    except (UsageError, dsl.DslError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NumericsError as exc:
        err.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except FinslerError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
