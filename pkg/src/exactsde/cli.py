"""Command-line front end: ``exactsde {validate,sample,max,hit,compare}``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .drift import get_drift, validate_drift
from .errors import ConditionViolation, ExactSDEError
from .experiments import default_workers, run_euler, run_exact
from .stats import ks_two_sample, summarize_traces

SAMPLE_FIELDS = ("replicate", "t", "x", "kind", "method")
FUNCTIONAL_FIELDS = ("replicate", "value", "capped")
KS_FIELDS = ("name", "n", "m", "D", "p")
TRACE_FIELDS = ("replicate", "proposal", "points_used", "accepted")
CHECK_FIELDS = ("condition", "passed", "worst_u", "worst_value", "detail")


def parse_grid(text: str, length: float) -> list:
    """``"step:<d>"`` gives d, 2d, ... up to ``length``; otherwise a comma list."""
    if not text:
        return []
    if text.startswith("step:"):
        d = float(text[5:])
        if not d > 0:
            raise argparse.ArgumentTypeError("grid step must be positive")
        n = math.floor(length / d + 1e-9)
        return sorted({min(k * d, length) for k in range(1, n + 1)})
    times = sorted({float(s) for s in text.split(",") if s.strip()})
    for t in times:
        if not 0.0 <= t <= length:
            raise argparse.ArgumentTypeError(f"grid time {t} outside [0, {length}]")
    return times


def parse_dts(text: str) -> list:
    """``"2,3,4"`` -> [2^-2, 2^-3, 2^-4]."""
    return [int(s) for s in text.split(",") if s.strip()]


def _drift(name: str):
    try:
        return get_drift(name)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def write_rows(rows, fields, out, fmt):
    if fmt == "json":
        json.dump([dict(zip(fields, r)) for r in rows], out)
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(fields)
    w.writerows(rows)


class _Output:
    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path in (None, "-"):
            return sys.stdout
        self._fh = open(self.path, "w", newline="")
        return self._fh

    def __exit__(self, *exc):
        if self.path not in (None, "-"):
            self._fh.close()


def _capped_flag(v, cap):
    return "" if cap is None else int(v >= cap)


def _write_traces(path, run):
    rows = [(r, t.proposal, t.points_used, int(t.accepted))
            for r, tr in enumerate(run.traces) for t in tr]
    with _Output(path) as fh:
        write_rows(rows, TRACE_FIELDS, fh, "csv")


def _report_traces(run):
    traces = run.all_traces()
    if traces:
        print(json.dumps(summarize_traces(traces).as_dict(), sort_keys=True), file=sys.stderr)


def cmd_validate(args):
    model = args.drift
    report = validate_drift(model, raise_on_failure=False)
    with _Output(args.out) as fh:
        if args.format == "json":
            json.dump({"drift": model.name, "passed": report.passed,
                       "max_horizon": None if math.isinf(report.max_horizon) else report.max_horizon,
                       "checks": [dict(zip(CHECK_FIELDS, (c.condition, c.passed, c.worst_u,
                                                          c.worst_value, c.detail)))
                                  for c in report.checks]}, fh)
            fh.write("\n")
        elif args.format == "csv":
            write_rows([(c.condition, int(c.passed), c.worst_u, c.worst_value, c.detail)
                        for c in report.checks], CHECK_FIELDS, fh, "csv")
        else:
            for line in report.lines():
                print(line, file=fh)
    return 0 if report.passed else 1


def cmd_sample(args):
    grid = parse_grid(args.grid, args.length)
    run = run_exact("sample", args.drift.name, args.x0, args.n, seed=args.seed,
                    workers=args.workers, length=args.length, piece=args.piece, grid=grid)
    wanted = set(grid)
    rows = []
    for r, skel in enumerate(run.skeletons):
        for t, x, k in zip(skel.times, skel.values, skel.kinds):
            if args.only_grid and t not in wanted:
                continue
            rows.append((r, t, x, k, "exact"))
    with _Output(args.out) as fh:
        write_rows(rows, SAMPLE_FIELDS, fh, args.format)
    if args.traces:
        _write_traces(args.traces, run)
    _report_traces(run)
    return 0


def _functional_params(args, kind):
    if kind == "hit":
        return {"barrier": args.barrier, "cap": args.cap}
    return {"length": args.length}


def _functional(args, kind):
    cap = args.cap if kind == "hit" else None
    params = _functional_params(args, kind)
    if args.method == "euler":
        rows = []
        for k in parse_dts(args.euler_dt):
            vals = run_euler(kind, args.drift.name, args.x0, args.n, 2.0 ** -k,
                             seed=args.seed, workers=args.workers, **params)
            rows += [(r, float(v), _capped_flag(v, cap), f"euler_dt=2^-{k}")
                     for r, v in enumerate(vals)]
        fields = FUNCTIONAL_FIELDS + ("method",)
    else:
        run = run_exact(kind, args.drift.name, args.x0, args.n, seed=args.seed,
                        workers=args.workers, piece=args.piece, **params)
        rows = [(r, v, _capped_flag(v, cap)) for r, v in enumerate(run.values)]
        fields = FUNCTIONAL_FIELDS
        if args.traces:
            _write_traces(args.traces, run)
        _report_traces(run)
    with _Output(args.out) as fh:
        write_rows(rows, fields, fh, args.format)
    return 0


def cmd_max(args):
    return _functional(args, "max")


def cmd_hit(args):
    if args.barrier is None or args.cap is None:
        raise SystemExit("hit needs --barrier and --cap")
    return _functional(args, "hit")


def cmd_compare(args):
    kind = args.functional
    if kind == "hit" and (args.barrier is None or args.cap is None):
        raise SystemExit("compare --functional hit needs --barrier and --cap")
    params = _functional_params(args, kind)
    exact = run_exact(kind, args.drift.name, args.x0, args.n, seed=args.seed,
                      workers=args.workers, piece=args.piece, **params).array()
    rows, samples = [], [(r, float(v), "exact") for r, v in enumerate(exact)]
    if args.self_test:
        other = run_exact(kind, args.drift.name, args.x0, args.n, seed=args.seed + 1,
                          workers=args.workers, piece=args.piece, **params).array()
        res = ks_two_sample(exact, other)
        rows.append(("exact_vs_exact", res.n, res.m, res.statistic, res.pvalue))
    for k in parse_dts(args.euler_dt):
        eu = run_euler(kind, args.drift.name, args.x0, args.n, 2.0 ** -k, seed=args.seed,
                       workers=args.workers, **params)
        res = ks_two_sample(exact, eu)
        rows.append((f"euler_dt=2^-{k}", res.n, res.m, res.statistic, res.pvalue))
        samples += [(r, float(v), f"euler_dt=2^-{k}") for r, v in enumerate(eu)]
    with _Output(args.out) as fh:
        write_rows(rows, KS_FIELDS, fh, args.format)
    if args.samples:
        with _Output(args.samples) as fh:
            write_rows(samples, ("replicate", "value", "method"), fh, "csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--drift", type=_drift, default="sin",
                        help="zero, const:<c>, sin, tanh or linear:<c>")
    common.add_argument("--x0", type=float, default=0.0)
    common.add_argument("--length", type=float, default=1.0)
    common.add_argument("--piece", type=float, default=None,
                        help="piece length T (default 1/(k2-k1), or 1.0 when unbounded)")
    common.add_argument("--grid", default="", help='"step:<d>" or a comma list of times')
    common.add_argument("--n", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--barrier", type=float, default=None)
    common.add_argument("--cap", type=float, default=None)
    common.add_argument("--euler-dt", default="2,3,4,5,6,7,8",
                        help="comma list of k for Euler steps 2^-k")
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("csv", "json", "text"), default=None)
    common.add_argument("--workers", type=int, default=default_workers())

    p = argparse.ArgumentParser(prog="exactsde", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("validate", parents=[common], help="check drift conditions")
    sp.set_defaults(func=cmd_validate)
    sp = sub.add_parser("sample", parents=[common], help="exact skeletons and fill-ins")
    sp.add_argument("--only-grid", action="store_true", help="emit grid points only")
    sp.add_argument("--traces", default=None, help="write decision traces CSV here")
    sp.set_defaults(func=cmd_sample)
    for name, fn in (("max", cmd_max), ("hit", cmd_hit)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--method", choices=("exact", "euler"), default="exact")
        sp.add_argument("--traces", default=None)
        sp.set_defaults(func=fn)
    sp = sub.add_parser("compare", parents=[common], help="KS table, exact vs Euler")
    sp.add_argument("--functional", choices=("terminal", "max", "hit"), default="terminal")
    sp.add_argument("--self-test", action="store_true", help="add an exact-vs-exact row")
    sp.add_argument("--samples", default=None, help="write raw samples CSV here")
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "text" if args.command == "validate" else "csv"
    elif args.format == "text" and args.command != "validate":
        args.format = "csv"
    try:
        if args.command != "validate":
            validate_drift(args.drift)
        return args.func(args)
    except ConditionViolation as e:
        print(f"error: {e}", file=sys.stderr)
        if e.report is not None:
            for line in e.report.lines():
                print(line, file=sys.stderr)
        return 1
    except ExactSDEError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
