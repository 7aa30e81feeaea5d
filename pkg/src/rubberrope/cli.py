"""Command-line front end.

Subcommands: ``classic``, ``solve``, ``simulate``, ``sweep`` and ``diagnose``.
Every failure ends with one line on stderr of the form::

    rubberrope: error[<kind>]: <message>

where ``kind`` is one of ``usage``, ``domain``, ``contract``, ``io`` or
``censored``; exit codes are 2 (usage), 3 (domain/contract), 4 (io) and
1 (censoring under ``--strict``).

Record files: CSV with header ``substream_id,hitting_time,censored,final_fraction``
(an empty ``hitting_time`` means censored), or JSON ``{"records": [...],
"summary": {...}}``.  With CSV output to a file the summary is written next
to it as ``<out>.summary.json``.  Floats use the shortest round-trip repr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .distributions import DistributionSpec, mean as dist_mean, parse_distribution
from .engines import (
    DEFAULT_CAP,
    deterministic_hitting_time,
    exact_fraction,
    run_batch,
    trajectory_draws,
)
from .errors import RopeError
from .model import ProcessSpec
from .stats import (
    BlockBoundParams,
    choose_block_length,
    lln_diagnostic,
    mean_hitting_time,
    survival_curve,
    verify_block_bound,
)

PROG = "rubberrope"
RECORD_COLUMNS = ("substream_id", "hitting_time", "censored", "final_fraction")
SWEEP_COLUMNS = ("grid_index", "l0", "step", "stretch", "n_trajectories",
                 "mean", "ci_lo", "ci_hi", "n_censored")
CLASSIC_L0 = 100000

EXIT_CENSORED, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 1, 2, 3, 4


class CLIError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind = kind
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message, EXIT_USAGE)


def _dist_arg(text: str) -> DistributionSpec:
    try:
        return parse_distribution(text)
    except RopeError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed_arg(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _num(x: Optional[float]):
    """JSON-safe number: NaN and infinities become null."""
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return x


def _csv_num(x: Optional[float]) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(x)


# --- output helpers -------------------------------------------------------

def _emit(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError("io", f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow((r.substream_id, "" if r.censored else r.hitting_time,
                    "true" if r.censored else "false", repr(r.final_fraction)))
    return buf.getvalue()


def records_to_json_list(records) -> list:
    return [{"substream_id": r.substream_id, "hitting_time": r.hitting_time,
             "censored": r.censored, "final_fraction": r.final_fraction} for r in records]


def summarize(records, horizon: Optional[int], confidence: float, spec: ProcessSpec,
              seed: int) -> dict:
    est = mean_hitting_time(records, confidence)
    cap = min(r.cap for r in records)
    if horizon is None:
        finished = [r.hitting_time for r in records if not r.censored]
        horizon = min(cap, max(finished, default=1))
    curve = survival_curve(records, horizon)
    return {
        "mean": _num(est.mean),
        "ci_lo": _num(est.lo),
        "ci_hi": _num(est.hi),
        "confidence": confidence,
        "n_trajectories": len(records),
        "n_censored": curve.n_censored,
        "censored_warning": est.censored_warning,
        "horizon": horizon,
        "survival": list(curve.values),
        "seed": seed,
        "cap": cap,
        "l0": spec.l0,
        "step": str(spec.step_dist),
        "stretch": str(spec.stretch_dist),
        "within_hypotheses": spec.within_hypotheses,
    }


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


# --- commands ---------------------------------------------------------------

def classic_rows(m_values: Sequence[int]) -> list[tuple[int, float, str]]:
    """``(m, fraction, exact)`` for the 1 km rope, 1 cm/s ant and +1 km stretches (in cm).

    ``fraction`` is the correctly rounded double of the exact value.
    """
    rows = []
    for m in m_values:
        if m < 1:
            raise CLIError("domain", f"m must be positive, got {m}", EXIT_DOMAIN)
        exact = exact_fraction([1] * m, CLASSIC_L0, [CLASSIC_L0] * (m - 1))
        rows.append((m, float(exact), f"{exact.numerator}/{exact.denominator}"))
    return rows


def cmd_classic(args) -> int:
    rows = classic_rows(args.m)
    report = deterministic_hitting_time(CLASSIC_L0, 1, CLASSIC_L0)
    if args.format == "json":
        text = _dumps({"rows": [{"m": m, "fraction": f, "exact": e} for m, f, e in rows],
                       "log10_hitting_time": report.log10_hitting_time,
                       "log10_error": report.log10_error,
                       "method": report.method.value})
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("m", "fraction", "exact_fraction"))
        for m, f, e in rows:
            w.writerow((m, repr(f), e))
        text = buf.getvalue()
    else:
        lines = [f"{'m':>8}  {'fraction':<24}  exact"]
        lines += [f"{m:>8}  {f!r:<24}  {e}" for m, f, e in rows]
        lines.append(f"hitting time: {report.render()}")
        text = "\n".join(lines) + "\n"
    _emit(args.out, text)
    return 0


def cmd_solve(args) -> int:
    report = deterministic_hitting_time(args.l0, args.x, args.L)
    if args.format == "json":
        text = _dumps({"hitting_time": report.hitting_time,
                       "hitting_time_estimate": _num(report.hitting_time_estimate),
                       "log10_hitting_time": report.log10_hitting_time,
                       "method": report.method.value,
                       "error_bound": report.error_bound,
                       "log10_error": report.log10_error})
    else:
        text = report.render() + "\n"
    _emit(args.out, text)
    return 0


def _spec_from(args, l0=None, step=None, stretch=None) -> ProcessSpec:
    return ProcessSpec(args.l0 if l0 is None else l0,
                       args.step if step is None else step,
                       args.stretch if stretch is None else stretch,
                       exploration=args.explore)


def _check_horizon(args) -> None:
    if args.horizon is not None and args.horizon > args.cap:
        raise CLIError("usage", f"--horizon {args.horizon} exceeds --cap {args.cap}", EXIT_USAGE)


def _write_records(records, summary: dict, out: Optional[str], fmt: str) -> None:
    if fmt == "json":
        _emit(out, _dumps({"records": records_to_json_list(records), "summary": summary}))
        return
    _emit(out, records_to_csv(records))
    if out not in (None, "-"):
        _emit(out + ".summary.json", _dumps(summary))


def _summary_line(summary: dict) -> str:
    mean = summary["mean"]
    if mean is None:
        body = "mean T undefined (every trajectory censored)"
    else:
        lo, hi = summary["ci_lo"], summary["ci_hi"]
        ci = f" [{lo:.6g}, {hi:.6g}]" if lo is not None else ""
        body = f"mean T = {mean:.6g}{ci} ({summary['confidence']:.0%} CI)"
    tag = "" if summary["within_hypotheses"] else " [exploration: outside finite-mean hypotheses]"
    return (f"{body}; n = {summary['n_trajectories']}, censored = {summary['n_censored']}"
            f" at cap {summary['cap']}{tag}")


def _censoring_status(n_censored: int, strict: bool) -> int:
    if not n_censored:
        return 0
    msg = f"{n_censored} trajectories censored"
    if strict:
        raise CLIError("censored", msg, EXIT_CENSORED)
    print(f"{PROG}: warning: {msg}; their mean is biased low", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    _check_horizon(args)
    spec = _spec_from(args)
    records = run_batch(spec, args.n, args.seed, args.cap, args.jobs)
    summary = summarize(records, args.horizon, args.confidence, spec, args.seed)
    _write_records(records, summary, args.out, args.format)
    print(_summary_line(summary), file=sys.stderr)
    return _censoring_status(summary["n_censored"], args.strict)


def _split_grid(text: Optional[str], sep: str) -> list[str]:
    if text is None:
        return []
    return [p.strip() for p in text.split(sep) if p.strip()]


def sweep_grid(args) -> list[tuple[float, DistributionSpec, DistributionSpec]]:
    l0s = [_positive_float(v) for v in _split_grid(args.l0_grid, ",")] or [args.l0]
    steps = [_dist_arg(v) for v in _split_grid(args.step_grid, ";")] or [args.step]
    stretches = [_dist_arg(v) for v in _split_grid(args.stretch_grid, ";")] or [args.stretch]
    return [(a, b, c) for a in l0s for b in steps for c in stretches]


def cmd_sweep(args) -> int:
    _check_horizon(args)
    try:
        grid = sweep_grid(args)
    except argparse.ArgumentTypeError as exc:
        raise CLIError("usage", str(exc), EXIT_USAGE) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    total_censored = 0
    for g, (l0, step, stretch) in enumerate(grid):
        spec = _spec_from(args, l0, step, stretch)
        records = run_batch(spec, args.n, args.seed, args.cap, args.jobs, namespace=g)
        est = mean_hitting_time(records, args.confidence)
        n_cens = sum(r.censored for r in records)
        total_censored += n_cens
        w.writerow((g, repr(l0), str(step), str(stretch), len(records),
                    _csv_num(est.mean), _csv_num(est.lo), _csv_num(est.hi), n_cens))
        if args.records_dir:
            Path(args.records_dir).mkdir(parents=True, exist_ok=True)
            summary = summarize(records, args.horizon, args.confidence, spec, args.seed)
            ext = "json" if args.format == "json" else "csv"
            _write_records(records, summary, str(Path(args.records_dir) / f"point_{g:04d}.{ext}"),
                           args.format)
    _emit(args.out, buf.getvalue())
    print(f"{len(grid)} grid points, {total_censored} censored trajectories", file=sys.stderr)
    return _censoring_status(total_censored, args.strict)


def diagnose(spec: ProcessSpec, seed: int, n: int, epsilon: float, blocks: Optional[int]) -> dict:
    """LLN traces, block length, epsilon bound and chain check on substream 0."""
    mu_x, mu_l = dist_mean(spec.step_dist), dist_mean(spec.stretch_dist)
    if not (math.isfinite(mu_x) and math.isfinite(mu_l)):
        raise CLIError("domain", "diagnostics need finite step and stretch means", EXIT_DOMAIN)
    steps, stretches = trajectory_draws(spec, 0, seed, n + 1)
    xs, ls = steps[1:], stretches[:n]
    lln_x = lln_diagnostic(xs, mu_x)
    lln_l = lln_diagnostic(ls, mu_l)
    N = choose_block_length(xs, ls, spec.l0, mu_x, mu_l, epsilon)
    out = {"n": n, "epsilon": epsilon, "mu_x": mu_x, "mu_l": mu_l,
           "final_deviation_x": float(lln_x.deviation[-1]),
           "final_deviation_l": float(lln_l.deviation[-1]),
           "max_deviation_x": float(lln_x.deviation.max()),
           "max_deviation_l": float(lln_l.deviation.max()),
           "block_length": N, "lln_x": lln_x, "lln_l": lln_l}
    if N is None:
        return out
    m = blocks if blocks is not None else max(1, n // N)
    report = verify_block_bound(spec, seed, BlockBoundParams(epsilon, N, m))
    out.update(blocks=m, holds=report.holds, observed=report.observed, bound=report.bound,
               epsilon_bound=report.epsilon_bound, precondition_ok=report.precondition_ok,
               vacuous_from=report.vacuous_from)
    return out


def cmd_diagnose(args) -> int:
    spec = _spec_from(args)
    d = diagnose(spec, args.seed, args.n, args.epsilon, args.blocks)
    lines = [
        f"steps:     mean {d['mu_x']!r}, deviation of running mean at n={d['n']}: "
        f"{d['final_deviation_x']:.3g} (max {d['max_deviation_x']:.3g})",
        f"stretches: mean {d['mu_l']!r}, deviation of running mean at n={d['n']}: "
        f"{d['final_deviation_l']:.3g} (max {d['max_deviation_l']:.3g})",
    ]
    if d["block_length"] is None:
        lines.append(f"warning: no block length N keeps both running means within "
                     f"epsilon={d['epsilon']:g} up to n={d['n']}; increase --n or --epsilon")
    else:
        verdict = "holds" if d["holds"] else "FAILS"
        lines += [
            f"block length N = {d['block_length']}, blocks m = {d['blocks']}"
            + ("" if d["precondition_ok"] else " (N not valid on the first m*N draws)"),
            f"realised sum {d['observed']!r} >= blockwise bound {d['bound']!r}"
            f" >= epsilon bound {d['epsilon_bound']!r}: {verdict}",
        ]
        if d["vacuous_from"] is not None:
            lines.append(f"note: bound terms are vacuous from block {d['vacuous_from']} on "
                         "(mu_x - (2k-1) epsilon <= 0)")
    print("\n".join(lines), file=sys.stderr)
    if args.out is not None:
        lx, ll = d.pop("lln_x"), d.pop("lln_l")
        if args.format == "json":
            d["lln"] = {"running_mean_x": lx.running_mean.tolist(),
                        "deviation_x": lx.deviation.tolist(),
                        "running_mean_l": ll.running_mean.tolist(),
                        "deviation_l": ll.deviation.tolist()}
            _emit(args.out, _dumps(d))
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(("n", "running_mean_x", "deviation_x", "running_mean_l", "deviation_l"))
            for (i, mx, dx), (_, ml, dl) in zip(lx, ll):
                w.writerow((i, repr(mx), repr(dx), repr(ml), repr(dl)))
            _emit(args.out, buf.getvalue())
    if d["block_length"] is not None and d["precondition_ok"] and not d["holds"]:
        raise CLIError("contract", "blockwise bound violated with a valid block length", EXIT_DOMAIN)
    return 0


# --- parser -----------------------------------------------------------------

def _add_process(p, *, with_format=True):
    p.add_argument("--l0", type=_positive_float, default=5.0, help="initial rope length")
    p.add_argument("--step", type=_dist_arg, default=parse_distribution("exponential:mean=1"),
                   help="step law, e.g. exponential:mean=1")
    p.add_argument("--stretch", type=_dist_arg, default=parse_distribution("exponential:mean=1"),
                   help="stretch law, e.g. uniform:a=0.5,b=1.5")
    p.add_argument("--explore", action="store_true",
                   help="allow infinite-mean laws (outside the finite-mean hypotheses)")
    p.add_argument("--seed", type=_seed_arg, default=0, help="master seed (u64)")
    p.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
    if with_format:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", default=None, help="JSON file whose keys mirror the flags")


def _add_batch(p):
    p.add_argument("--n", type=_positive_int, default=1000, help="trajectories")
    p.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP, help="censoring horizon")
    p.add_argument("--horizon", type=_positive_int, default=None,
                   help="survival-curve horizon (default: largest observed T)")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--strict", action="store_true", help="fail if any trajectory is censored")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Ant on a rubber rope: simulation and numerics.",
                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classic", help="classic puzzle: fraction covered after m seconds",
                       allow_abbrev=False)
    p.add_argument("--m", type=_positive_int, nargs="+", default=[1, 2, 3, 10, 100, 1000])
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classic)

    p = sub.add_parser("solve", help="hitting time for constant step and stretch",
                       allow_abbrev=False)
    p.add_argument("--l0", type=_positive_float, required=True)
    p.add_argument("--x", "--step-size", dest="x", type=_positive_float, required=True)
    p.add_argument("--L", "--stretch-size", dest="L", type=_positive_float, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="Monte Carlo batch of trajectories", allow_abbrev=False)
    _add_process(p)
    _add_batch(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="batches over a parameter grid", allow_abbrev=False)
    _add_process(p)
    _add_batch(p)
    p.add_argument("--l0-grid", default=None, help="comma-separated l0 values")
    p.add_argument("--step-grid", default=None, help="';'-separated step laws")
    p.add_argument("--stretch-grid", default=None, help="';'-separated stretch laws")
    p.add_argument("--records-dir", default=None, help="also write each point's records here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("diagnose", help="law-of-large-numbers and block-bound diagnostics",
                       allow_abbrev=False)
    _add_process(p)
    p.add_argument("--n", type=_positive_int, default=10000, help="sample length")
    p.add_argument("--epsilon", type=_positive_float, default=0.05)
    p.add_argument("--blocks", type=_positive_int, default=None,
                   help="block count m (default: n // N)")
    p.set_defaults(func=cmd_diagnose)
    return parser


def _config_argv(path: str) -> list[str]:
    """Translate a JSON config object into equivalent command-line flags."""
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CLIError("io", f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    except json.JSONDecodeError as exc:
        raise CLIError("usage", f"{path} is not valid JSON: {exc}", EXIT_USAGE) from None
    if not isinstance(cfg, dict):
        raise CLIError("usage", f"{path} must hold a JSON object", EXIT_USAGE)
    argv: list[str] = []
    for key, value in cfg.items():
        if key == "config" or value is None or value is False:
            continue
        flag = "--" + (key if key in ("l0", "x", "L") else key.replace("_", "-"))
        if value is True:
            argv.append(flag)
        elif isinstance(value, list) and key.endswith("_grid"):
            sep = "," if key == "l0_grid" else ";"
            argv.extend([flag, sep.join(str(v) for v in value)])
        elif isinstance(value, list):
            argv.extend([flag, *(str(v) for v in value)])
        else:
            argv.extend([flag, str(value)])
    return argv


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        # config values come first so explicit flags override them
        cfg_argv = _config_argv(args.config)
        args = parser.parse_args([argv[0], *cfg_argv, *argv[1:]])
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return args.func(args)
    except CLIError as exc:
        print(f"{PROG}: error[{exc.kind}]: {exc}", file=sys.stderr)
        return exc.code
    except RopeError as exc:
        print(f"{PROG}: error[{exc.kind}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
