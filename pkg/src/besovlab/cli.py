"""Command-line front end: ``besovlab {norm,predict,verify,sweep}``.

Exit codes: 0 success, 1 numerical failure, 2 invalid parameters,
3 disagreement in ``verify``.  Machine output goes to stdout (or ``-o``);
log lines go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from .core import Numerics
from .diagnostics import (
    MethodComparison,
    predict_membership,
    report_json,
    run_membership_experiment,
)
from .params import ParameterError, embedding_report, parse_space, theorem_boundaries, validate_space
from .suites import SUITES, run_suite
from .testfns import _join_spec, _split_spec, parse_function

log = logging.getLogger("besovlab")

JOBS_ENV = "BESOVLAB_JOBS"
SWEEP_AXES = ("s", "alpha", "mu", "delta", "q", "p")
CSV_HEADER = ("axis", "value", "slope", "verdict", "predicted", "agree")

_NUMERIC_FLAGS = {
    "k_min": int,
    "k_max": int,
    "points_per_annulus": int,
    "j_max": int,
    "l_max": int,
    "quad_points": int,
}


class UsageError(Exception):
    """Invalid command-line input (exit code 2)."""


# ---------------------------------------------------------------------------
# argument handling


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="besovlab", description="Power-weighted Besov space experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values; explicit flags win")
    common.add_argument("--format", choices=("table", "json", "csv"), default=None)
    common.add_argument("-o", "--output", help="write output to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=None,
                        help=f"worker processes (default ${JOBS_ENV} or 1)")
    common.add_argument("-v", "--verbose", action="store_true")
    for name in _NUMERIC_FLAGS:
        common.add_argument("--" + name.replace("_", "-"), dest=name, type=int, default=None)

    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="summands, truncated norm and verdict")
    p.add_argument("--fn", help="function spec, e.g. f_power_log:mu=0.5,delta=0")
    p.add_argument("--space", help="n=..,p=..,q=..,alpha=..,s=..")
    p.add_argument("--method", choices=("fourier", "diff", "differences", "both"), default=None)
    p.add_argument("--order", type=int, default=None, help="difference order M")

    p = sub.add_parser("predict", parents=[common], help="theory predictions only, no numerics")
    p.add_argument("--fn")
    p.add_argument("--space")
    p.add_argument("--target", help="target space for an embedding query")
    p.add_argument("--mu", type=float, default=None, help="composition power for theorem hypotheses")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES)

    p = sub.add_parser("sweep", parents=[common], help="one-parameter sweep emitting CSV")
    p.add_argument("--fn", help="function spec; may contain {axis} placeholders")
    p.add_argument("--space", help="fixed space parameters")
    p.add_argument("--axis", choices=SWEEP_AXES)
    p.add_argument("--range", dest="range_", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--method", choices=("fourier", "diff", "differences"), default=None)
    p.add_argument("--order", type=int, default=None)
    return ap


def _merge_config(args) -> argparse.Namespace:
    if not args.config:
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    num = cfg.pop("numerics", {})
    for k, v in list(cfg.items()) + list(num.items()):
        k = {"range": "range_"}.get(k.replace("-", "_"), k.replace("-", "_"))
        if not hasattr(args, k):
            raise UsageError(f"unknown config key {k!r}")
        if getattr(args, k) is None:
            setattr(args, k, v)
    return args


def _numerics(args) -> Numerics:
    changes = {k: int(getattr(args, k)) for k in _NUMERIC_FLAGS if getattr(args, k, None) is not None}
    return Numerics().with_(**changes)


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) in (None, ""):
            raise UsageError(f"--{n.rstrip('_').replace('_', '-')} is required")


def _method(m: Optional[str], default="differences") -> str:
    m = m or default
    return "differences" if m == "diff" else m


# ---------------------------------------------------------------------------
# formatting


def _f(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.6g}"
    return str(v)


def _norm_table(rep) -> str:
    v = rep.verdict
    lines = [
        f"function      {rep.function}",
        "space         " + ",".join(f"{k}={_f(x)}" for k, x in rep.params.as_dict().items()),
        f"method        {rep.method}" + (f" (M={rep.order})" if rep.order else ""),
        f"base norm     {_f(rep.base_norm)}",
        f"truncated     {_f(rep.summands.truncated_norm())}",
        f"verdict       {v.cls} finite={_f(v.finite)} slope={_f(v.slope)}"
        + (f" rho={_f(v.power_exponent)}" if v.power_exponent is not None else "")
        + (" borderline" if v.borderline else ""),
        f"predicted     {_f(rep.predicted)} ({rep.rule})",
        f"agree         {_f(rep.agree)}",
        "index  summand",
    ]
    lines += [f"{i:>5}  {val:.6e}" for i, val in zip(rep.summands.indices, rep.summands.values)]
    return "\n".join(lines)


def _norm_csv(rep) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("method", "index", "value"))
    for i, val in zip(rep.summands.indices, rep.summands.values):
        w.writerow((rep.method, int(i), repr(float(val))))
    return buf.getvalue().rstrip("\n")


# ---------------------------------------------------------------------------
# commands


def cmd_norm(args) -> tuple:
    _need(args, "fn", "space")
    params = parse_space(args.space)
    validate_space(params)
    out = run_membership_experiment(args.fn, params, _method(args.method), _numerics(args), args.order)
    reps = [out.fourier, out.differences] if isinstance(out, MethodComparison) else [out]
    fmt = args.format or "table"
    if fmt == "json":
        text = report_json(reps[0] if len(reps) == 1 else [r.to_json() for r in reps])
    elif fmt == "csv":
        text = "\n".join(_norm_csv(r) if k == 0 else _norm_csv(r).split("\n", 1)[1] for k, r in enumerate(reps))
    else:
        text = "\n\n".join(_norm_table(r) for r in reps)
        if isinstance(out, MethodComparison):
            text += f"\n\nmethods consistent: {_f(out.consistent)}"
    return text, 0


def cmd_predict(args) -> tuple:
    _need(args, "space")
    params = parse_space(args.space)
    validate_space(params)
    rec = {"params": params.as_dict()}
    if args.fn:
        parse_function(args.fn)
        pr = predict_membership(args.fn, params)
        rec.update(function=args.fn, member=pr.member, rule=pr.rule,
                   critical=None if math.isinf(pr.critical) else float(pr.critical))
    if args.target:
        tgt = parse_space(args.target)
        validate_space(tgt)
        er = embedding_report(params, tgt)
        rec["embedding"] = {"target": tgt.as_dict(), "holds": er.holds,
                            "smoothness_gap": float(er.smoothness_gap), "p_ok": er.p_ok,
                            "weight_gap": float(er.weight_gap)}
    if args.mu is not None:
        rec["composition"] = theorem_boundaries(params, args.mu).as_dict()
    if len(rec) == 1:
        raise UsageError("predict needs --fn, --target or --mu")
    if (args.format or "table") == "json":
        return json.dumps(rec, indent=2), 0
    lines = []
    for k, v in rec.items():
        if isinstance(v, dict):
            lines.append(f"{k}:")
            lines += [f"  {kk:<22} {_f(vv)}" for kk, vv in v.items()]
        else:
            lines.append(f"{k:<24} {_f(v)}")
    return "\n".join(lines), 0


def cmd_verify(args) -> tuple:
    res = run_suite(args.suite, _numerics(args), args.jobs)
    code = 0 if res.passed else 3
    if (args.format or "table") == "json":
        text = json.dumps({"suite": res.suite, "passed": res.passed,
                           "cases": [c.as_dict() for c in res.cases]}, indent=2)
    else:
        text = "\n".join([c.line() for c in res.cases] + [res.summary()])
    return text, code


def _sweep_values(lo, hi, steps):
    return [float(v) for v in np.round(np.linspace(lo, hi, steps), 12)]


def sweep_spec(template: str, axis: str, value: float) -> str:
    """Function spec for one sweep point.

    ``{axis}`` placeholders are substituted; otherwise a function key named
    like the axis is overwritten.
    """
    token = "{" + axis + "}"
    if token in template:
        return template.replace(token, repr(value))
    if axis in ("mu", "delta"):
        name, kv = _split_spec(template)
        if axis not in kv:
            raise UsageError(f"function {name!r} has no key {axis!r}; use a {token} placeholder")
        kv[axis] = repr(value)
        return _join_spec(name, kv)
    return template


def _sweep_point(task) -> tuple:
    template, space, axis, value, method, order, num = task
    spec = sweep_spec(template, axis, value)
    try:
        params = space.with_(**{axis: value}) if axis in ("s", "alpha", "q", "p") else space
        rep = run_membership_experiment(spec, params, method, num, order)
    except ParameterError as exc:
        return (axis, value, None, f"invalid: {exc}", None, None)
    return (axis, value, rep.verdict.slope, rep.verdict.cls, rep.predicted, rep.agree)


def cmd_sweep(args) -> tuple:
    _need(args, "fn", "space", "axis", "range_", "steps")
    if args.axis not in SWEEP_AXES:
        raise UsageError(f"unknown axis {args.axis!r}")
    if int(args.steps) < 2:
        raise UsageError("steps < 2")
    space = parse_space(args.space)
    lo, hi = (float(x) for x in args.range_)
    num = _numerics(args)
    method = _method(args.method)
    tasks = [(args.fn, space, args.axis, v, method, args.order, num) for v in _sweep_values(lo, hi, int(args.steps))]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    if (args.format or "csv") == "json":
        keys = CSV_HEADER
        return json.dumps([dict(zip(keys, r)) for r in rows], indent=2), 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for axis, value, slope, verdict, pred, agree in rows:
        w.writerow((axis, _f(value), "" if slope is None else f"{slope:.6f}".replace("-0.000000", "0.000000"), verdict, _f(pred), _f(agree)))
    return buf.getvalue().rstrip("\n"), 0


_COMMANDS = {"norm": cmd_norm, "predict": cmd_predict, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        args = _merge_config(args)
        if args.jobs is None:
            args.jobs = _default_jobs()
        args.jobs = max(1, int(args.jobs))
        log.info("running %s with %d job(s)", args.command, args.jobs)
        text, code = _COMMANDS[args.command](args)
    except (ParameterError, UsageError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"besovlab: invalid parameters: {msg}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"besovlab: numerical failure: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
