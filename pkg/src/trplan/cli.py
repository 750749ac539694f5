"""Command line interface: ``trplan <command> [options]``.

Exit status is 0 on success, 1 on runtime or I/O failure and 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import tables as tbl
from .distribution import TRParams, sigma_from_mu
from .fitting import DataFileError, describe, fit_mle, read_lifetimes
from .montecarlo import DEFAULT_TRIALS, simulate_plan
from .plan import (
    DesignQuery,
    SamplingPlan,
    UnsatisfiablePlanError,
    failure_prob,
    min_sample_size,
    min_scale_ratio,
    oc_value,
    producer_risk,
)

DEFAULT_LAMBDA = 0.5


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class OutputSpec:
    format: str = "text"
    destination: str = "-"
    precision: int = 7

    def __post_init__(self):
        if not 1 <= self.precision <= 15:
            raise UsageError(f"precision must be in [1, 15], got {self.precision}")

    def num(self, v) -> str:
        if isinstance(v, bool) or isinstance(v, int):
            return str(v)
        return f"{v:.{self.precision}g}"

    def write(self, text: str) -> None:
        if not text.endswith("\n"):
            text += "\n"
        if self.destination == "-":
            sys.stdout.write(text)
        else:
            Path(self.destination).write_text(text)


def _output(args, default_format="text") -> OutputSpec:
    return OutputSpec(args.format or default_format, args.out, args.precision)


def _rows_to_csv(rows: list[dict], out: OutputSpec) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: out.num(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def _emit_records(rows: list[dict], out: OutputSpec) -> None:
    if out.format == "json":
        out.write(json.dumps(rows if len(rows) != 1 else rows[0], indent=2))
    elif out.format == "csv":
        out.write(_rows_to_csv(rows, out))
    else:
        lines = []
        for r in rows:
            lines.append("  ".join(f"{k}={out.num(v) if isinstance(v, float) else v}" for k, v in r.items()))
        out.write("\n".join(lines))


# design -------------------------------------------------------------------

def cmd_design(args) -> int:
    if (args.tratio is None) == (args.t is None):
        raise UsageError("give exactly one of --tratio or --t")
    if args.t is not None and args.mu0 is None:
        raise UsageError("--t (absolute test time) requires --mu0")
    sigma0 = sigma_from_mu(args.mu0, args.lam) if args.mu0 is not None else None
    t_ratio = args.tratio if args.tratio is not None else args.t / sigma0
    plan = min_sample_size(DesignQuery(args.pstar, args.c, t_ratio, args.lam))
    out = _output(args)
    rec = {
        "n": plan.n,
        "c": plan.c,
        "t_ratio": t_ratio,
        "p_star": args.pstar,
        "lambda": args.lam,
        "p_fail": failure_prob(t_ratio, 1.0, args.lam),
    }
    t_abs = None
    if sigma0 is not None:
        t_abs = t_ratio * sigma0
        rec.update(mu0=args.mu0, sigma0=sigma0, t=t_abs)
    if args.data is not None:
        if t_abs is None:
            raise UsageError("--data needs --mu0 to place the test time in data units")
        data = read_lifetimes(args.data)
        failures = int((data.values <= t_abs).sum())
        rec.update(observed_failures=failures, decision="accept" if failures <= plan.c else "reject")

    if out.format != "text":
        _emit_records([rec], out)
        return 0
    when = f"time {out.num(t_abs)}" if t_abs is not None else f"time {out.num(t_ratio)} * sigma0"
    lines = [
        f"sample size n = {plan.n}",
        f"acceptance number c = {plan.c}",
        f"t/sigma0 = {out.num(t_ratio)}",
    ]
    if sigma0 is not None:
        lines += [f"mu0 = {out.num(args.mu0)}", f"sigma0 = {out.num(sigma0)}", f"test time t = {out.num(t_abs)}"]
    lines.append(f"Put {plan.n} units on test; accept the lot if at most {plan.c} fail by {when}, "
                 f"otherwise reject it.")
    if "decision" in rec:
        lines.append(f"observed failures by t: {rec['observed_failures']} -> {rec['decision']}")
    out.write("\n".join(lines))
    return 0


# tables -------------------------------------------------------------------

def cmd_tables(args) -> int:
    out = _output(args, "csv")
    table = tbl.emit_table(args.which, args.lam, plans=args.plans, delta=args.delta)
    if args.compare:
        if args.compare == "published":
            ref = tbl.published_table(args.which)
        else:
            try:
                text = Path(args.compare).read_text()
            except OSError as exc:
                raise OSError(f"{args.compare}: {exc.strerror}") from exc
            ref = tbl.read_csv(text, args.which, args.lam)
        diffs = tbl.compare(table, ref)
        out.write(tbl.format_diffs(diffs, table.keys))
        return 0
    if out.format == "json":
        out.write(table.to_json(out.precision))
    elif out.format == "csv":
        out.write(table.to_csv(out.precision))
    else:
        raise UsageError("tables supports --format csv or json")
    return 0


# oc / risk ----------------------------------------------------------------

def _curve(args, out: OutputSpec) -> int:
    n_vs_t, oc_vs_ratio, oc_vs_t = tbl.curve_series(args.lam, plans=args.plans)
    rows = {"sample-size": n_vs_t, "oc-ratio": oc_vs_ratio, "oc-time": oc_vs_t}[args.curve]
    if out.format == "text":
        out = OutputSpec("csv", out.destination, out.precision)
    _emit_records(rows, out)
    return 0


def _plan_from_args(args) -> SamplingPlan:
    if args.n is None or args.tratio is None:
        raise UsageError("--n, --c and --tratio are required")
    return SamplingPlan(args.n, args.c, args.tratio)


def _evaluate(args, func, name) -> int:
    out = _output(args)
    if getattr(args, "curve", None):
        return _curve(args, out)
    plan = _plan_from_args(args)
    ratios = args.ratio or list(tbl.SCALE_RATIOS)
    rows = [{"n": plan.n, "c": plan.c, "t_ratio": plan.t_ratio, "scale_ratio": float(r),
             "p_fail": failure_prob(plan.t_ratio, r, args.lam), name: func(plan, r, args.lam)}
            for r in ratios]
    if out.format == "text":
        out.write("\n".join(out.num(r[name]) for r in rows))
    else:
        _emit_records(rows, out)
    return 0


def cmd_oc(args) -> int:
    return _evaluate(args, oc_value, "prob_accept")


def cmd_risk(args) -> int:
    return _evaluate(args, producer_risk, "producer_risk")


def cmd_min_ratio(args) -> int:
    out = _output(args)
    if args.n is not None:
        plan = SamplingPlan(args.n, args.c, args.tratio, args.pstar)
    else:
        if args.pstar is None:
            raise UsageError("give --n or --pstar")
        plan = min_sample_size(DesignQuery(args.pstar, args.c, args.tratio, args.lam))
    r = min_scale_ratio(plan, args.lam, args.delta)
    if out.format == "text":
        out.write(f"{r:.2f}")
    else:
        _emit_records([{"n": plan.n, "c": plan.c, "t_ratio": plan.t_ratio, "delta": args.delta,
                        "scale_ratio": r}], out)
    return 0


# fit / simulate -----------------------------------------------------------

def cmd_fit(args) -> int:
    out = _output(args)
    data = read_lifetimes(args.datafile)
    fit = fit_mle(data)
    stats = describe(data)
    rec = {"n": data.n, **fit.as_dict(), **{f"{k}": v for k, v in stats.as_dict().items()}}
    if out.format != "text":
        _emit_records([rec], out)
        return 0
    f = out.num
    lines = [
        f"n = {data.n}",
        f"sigma_hat = {f(fit.params.sigma)}",
        f"lambda_hat = {f(fit.params.lam)}",
        f"log-likelihood = {f(fit.loglik)}",
        f"AIC = {f(fit.aic)}",
        f"BIC = {f(fit.bic)}",
        f"KS statistic = {f(fit.ks_stat)}",
        f"KS p-value = {f(fit.ks_pvalue)}",
        f"converged = {fit.converged}",
        "",
        f"min = {f(stats.minimum)}  Q1 = {f(stats.q1)}  median = {f(stats.median)}  "
        f"mean = {f(stats.mean)}  Q3 = {f(stats.q3)}  max = {f(stats.maximum)}",
        f"CS = {f(stats.cs)}  CK = {f(stats.ck)}",
    ]
    out.write("\n".join(lines))
    return 0


def cmd_simulate(args) -> int:
    out = _output(args, "json")
    plan = _plan_from_args(args)
    spec_sigma = 1.0
    truth = TRParams(args.ratio * spec_sigma, args.lam)
    rep = simulate_plan(plan, truth, spec_sigma, args.trials, args.seed)
    if out.format == "json":
        out.write(rep.to_json())
    else:
        _emit_records([asdict(rep)], out)
    return 0


# parser -------------------------------------------------------------------

def _add_output(p, formats=("text", "csv", "json")):
    p.add_argument("--format", choices=formats, default=None)
    p.add_argument("--out", default="-", help="output file (default: stdout)")
    p.add_argument("--precision", type=int, default=7, help="significant digits (1-15)")


def _add_lambda(p):
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                   help="transmutation parameter (default 0.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trplan",
        description="Time-truncated acceptance sampling plans for transmuted Rayleigh lifetimes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="minimum sample size for a plan")
    p.add_argument("--pstar", type=float, required=True, help="consumer confidence P*")
    p.add_argument("--c", type=int, required=True, help="acceptance number")
    p.add_argument("--tratio", type=float, help="test time as a multiple of sigma0")
    p.add_argument("--t", type=float, help="absolute test time (needs --mu0)")
    p.add_argument("--mu0", type=float, help="specified mean lifetime")
    p.add_argument("--data", help="lifetime file to sentence against the plan")
    _add_lambda(p)
    _add_output(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("tables", help="regenerate design tables 1-4")
    p.add_argument("--which", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--plans", choices=("computed", "published"), default="computed",
                   help="sample sizes used by tables 2-4")
    p.add_argument("--delta", type=float, default=tbl.DEFAULT_DELTA)
    p.add_argument("--compare", help="reference CSV, or 'published' for the bundled values")
    _add_lambda(p)
    _add_output(p, ("csv", "json"))
    p.set_defaults(func=cmd_tables)

    for name, func, help_ in (("oc", cmd_oc, "probability of acceptance"),
                              ("risk", cmd_risk, "producer's risk")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--n", type=int)
        p.add_argument("--c", type=int, default=2)
        p.add_argument("--tratio", type=float)
        p.add_argument("--ratio", type=float, action="append", help="sigma/sigma0 (repeatable)")
        p.add_argument("--curve", choices=("oc-ratio", "oc-time", "sample-size"),
                       help="emit plot series over the standard grids instead")
        p.add_argument("--plans", choices=("computed", "published"), default="computed")
        _add_lambda(p)
        _add_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("min-ratio", help="minimum sigma/sigma0 for a producer's risk")
    p.add_argument("--pstar", type=float)
    p.add_argument("--n", type=int, help="use this sample size instead of designing one")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--tratio", type=float, required=True)
    p.add_argument("--delta", type=float, default=tbl.DEFAULT_DELTA)
    _add_lambda(p)
    _add_output(p)
    p.set_defaults(func=cmd_min_ratio)

    p = sub.add_parser("fit", help="fit lifetime data by maximum likelihood")
    p.add_argument("datafile")
    _add_output(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="Monte-Carlo acceptance probability")
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--tratio", type=float)
    p.add_argument("--ratio", type=float, default=1.0, help="true sigma/sigma0")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    _add_lambda(p)
    _add_output(p, ("json", "csv", "text"))
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DataFileError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except UnsatisfiablePlanError as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
