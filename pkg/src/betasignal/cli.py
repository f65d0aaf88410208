"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .beta import beta_moments, fit_signal_pair
from .divergence import divergence_report, overlap_area
from .errors import DataError, NumericalError
from .io import (
    AnalysisReport,
    input_block,
    load_csv,
    to_text,
    write_curves,
    write_history,
    write_sweep,
    write_table,
)
from .regularizer import DemoTrainConfig, demo_train, make_two_gaussians
from .signals import METRICS, check_grid, empirical_curves, sweep
from .stability import (
    STEEPNESS_TOLERANCE,
    SmoothModel,
    check_separation_bounds,
    credible_interval,
    metric_derivatives,
    monte_carlo_bounds,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3

BOUNDS_NOTE = ("The max in the lower bound and the min in the upper bound range over an "
               "unspecified family of (P, Q); this report evaluates pointwise instances "
               "and a Monte-Carlo sample. The inequalities are heuristics, not theorems, "
               "so violations are reported rather than treated as errors.")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fraction(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return v


def _positive(text):
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
    return v


def _nonneg(text):
    v = float(text)
    if not v >= 0.0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative value, got {text}")
    return v


def _pos_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _grid(text):
    try:
        return check_grid([float(t) for t in text.split(",") if t.strip()])
    except (ValueError, DataError) as exc:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="betasignal",
                     description="Continuous-signal evaluation of binary classifier scores.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, help_, needs_input=True):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--input", "-i", required=needs_input,
                       help="CSV with header 'score,label'")
        p.add_argument("--json", action="store_true", help="emit the JSON analysis report")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        p.add_argument("--timestamp", action="store_true",
                       help="record the current UTC time in the JSON report")
        return p

    command("fit", "fit TR/FR Beta distributions")
    p = command("kl", "divergences between the fitted TR and FR Betas")
    p.add_argument("--order", type=float, default=1.0, help="order of the L^p distance")
    p = command("sweep", "threshold sweep of confusion-matrix metrics")
    p.add_argument("--grid", type=_grid, default=None,
                   help="comma-separated increasing thresholds (default: 101 points)")
    p = command("stability", "threshold derivatives of smooth metrics")
    p.add_argument("--threshold", type=_fraction, default=0.5)
    p.add_argument("--step", type=_positive, default=1e-4)
    p.add_argument("--metric", choices=METRICS, default=None,
                   help="one metric (default: all)")
    p.add_argument("--tolerance", type=_positive, default=STEEPNESS_TOLERANCE,
                   help="|d metric/dt| above this is flagged steep")
    p = command("risk", "equal-tailed credible intervals of the fitted Betas")
    p.add_argument("--mass", type=_fraction, default=0.95)
    command("overlap", "area of the intersection of the fitted densities")
    p = command("bounds-check", "epsilon-Beta separation inequalities", needs_input=False)
    p.add_argument("--epsilon", type=_fraction, default=0.01)
    p.add_argument("--concentration", type=_positive, default=20.0)
    p.add_argument("--metric", choices=("js_distance", "l1"), default="js_distance")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p = command("train-demo", "logistic regression with the KL separation regularizer",
                needs_input=False)
    p.add_argument("--lambda", dest="lam", type=_nonneg, default=0.0)
    p.add_argument("--lr", type=_positive, default=0.05)
    p.add_argument("--epochs", type=_pos_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=_pos_int, default=1000, help="synthetic sample count")
    p.add_argument("--dim", type=_pos_int, default=5, help="synthetic feature dimension")
    p.add_argument("--separation", type=_positive, default=2.0,
                   help="distance between the two Gaussian class means")
    p = command("curves", "TR/FR score histograms")
    p.add_argument("--bins", type=_pos_int, default=20)
    return parser


def _fit_section(tr, fr):
    out = {}
    for name, p in (("tr", tr), ("fr", fr)):
        m = beta_moments(p)
        out[name] = {"alpha": p.alpha, "beta": p.beta, "mean": m.mu, "var": m.var}
    return out


def _fit_rows(tr, fr):
    rows = []
    for name, p in (("tr", tr), ("fr", fr)):
        m = beta_moments(p)
        rows.append([name, p.alpha, p.beta, m.mu, m.var])
    return rows


def _csv(header, rows) -> str:
    buf = io.StringIO()
    write_table(header, rows, buf)
    return buf.getvalue()


def _run(args) -> tuple[str, AnalysisReport]:
    report = AnalysisReport(command=args.command, version=__version__)
    if args.timestamp:
        report.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    ds = tr = fr = None
    if getattr(args, "input", None):
        ds = load_csv(args.input)
        report.input = input_block(ds)
        if args.command not in ("sweep", "curves"):
            tr, fr = fit_signal_pair(ds.scores, ds.labels)
            report.sections["fit"] = _fit_section(tr, fr)

    cmd = args.command
    if cmd == "fit":
        text = _csv(("signal", "alpha", "beta", "mean", "var"), _fit_rows(tr, fr))
    elif cmd == "kl":
        d = divergence_report(tr, fr, args.order)
        report.sections["divergence"] = d.as_dict()
        text = _csv(tuple(d.as_dict()), [list(d.as_dict().values())])
    elif cmd == "overlap":
        v = overlap_area(tr, fr)
        report.sections["divergence"] = {"overlap": v}
        text = _csv(("overlap",), [[v]])
    elif cmd == "sweep":
        rows = sweep(ds.scores, ds.labels, args.grid)
        report.sections["sweep"] = [r.as_dict() for r in rows]
        text = to_text(write_sweep, rows)
    elif cmd == "curves":
        c = empirical_curves(ds.scores, ds.labels, args.bins)
        report.sections["curves"] = {"edges": c.edges, "tr_density": c.tr_density,
                                     "fr_density": c.fr_density}
        text = to_text(write_curves, c)
    elif cmd == "stability":
        model = SmoothModel.from_labels(tr, fr, ds.labels)
        metrics = [args.metric] if args.metric else list(METRICS)
        reps = [metric_derivatives(model, m, args.threshold, args.step, args.tolerance)
                for m in metrics]
        report.sections["stability"] = {
            "prevalence": model.prevalence,
            "step": args.step,
            "steepness_tolerance": args.tolerance,
            "reports": [r.as_dict() for r in reps],
        }
        header = ("threshold", "metric", "value", "first_derivative", "second_derivative",
                  "step_change", "flagged_steep")
        rows = [[r.threshold, r.metric, r.value, r.first_derivative, r.second_derivative,
                 r.step_change, r.flagged_steep] for r in reps]
        text = _csv(header, rows)
    elif cmd == "risk":
        ivs = {"tr": credible_interval(tr, args.mass), "fr": credible_interval(fr, args.mass)}
        report.sections["credible_intervals"] = {
            "mass": args.mass,
            "tr": {"lo": ivs["tr"][0], "hi": ivs["tr"][1]},
            "fr": {"lo": ivs["fr"][0], "hi": ivs["fr"][1]},
        }
        text = _csv(("signal", "mass", "lo", "hi"),
                    [[k, args.mass, lo, hi] for k, (lo, hi) in ivs.items()])
    elif cmd == "bounds-check":
        if args.trials < 0:
            raise UsageError("--trials must be >= 0")
        summary = monte_carlo_bounds(args.trials, args.seed, args.epsilon,
                                     args.concentration, args.metric)
        fitted = None
        if tr is not None:
            d_rl = summary.reports[0].d_RL if summary.reports else None
            fitted = check_separation_bounds(tr, fr, args.epsilon, args.concentration,
                                             args.metric, d_rl=d_rl)
        report.sections["bounds"] = {
            "epsilon": args.epsilon,
            "concentration": args.concentration,
            "metric": args.metric,
            "fitted": None if fitted is None else fitted.as_dict(),
            "monte_carlo": {
                "trials": summary.trials,
                "seed": summary.seed,
                "shape_range": list(summary.shape_range),
                "lower_violations": summary.lower_violations,
                "upper_violations": summary.upper_violations,
                "lower_violation_rate": summary.lower_violation_rate,
                "upper_violation_rate": summary.upper_violation_rate,
            },
            "note": BOUNDS_NOTE,
        }
        header = ("instance", "d_rl", "d_pq", "d_lp_plus_qr", "upper_bound_rhs",
                  "lower_holds", "upper_holds")
        rows = []
        named = ([("fitted", fitted)] if fitted else []) + [
            (f"trial_{i:04d}", r) for i, r in enumerate(summary.reports)]
        for name, r in named:
            rows.append([name, r.d_RL, r.d_PQ, r.d_LP_plus_QR, r.upper_bound_rhs,
                         r.lower_holds, r.upper_holds])
        text = _csv(header, rows)
        print(f"bounds-check: {summary.trials} trials, lower violations "
              f"{summary.lower_violations}, upper violations {summary.upper_violations}",
              file=sys.stderr)
    elif cmd == "train-demo":
        x, y = make_two_gaussians(args.n, args.dim, args.separation, args.seed)
        cfg = DemoTrainConfig(lam=args.lam, learning_rate=args.lr, epochs=args.epochs,
                              seed=args.seed, init_scale=0.01)
        res = demo_train(x, y, cfg)
        report.sections["training"] = {
            "config": {"lambda": cfg.lam, "learning_rate": cfg.learning_rate,
                       "epochs": cfg.epochs, "seed": cfg.seed, "n": args.n,
                       "dim": args.dim, "separation": args.separation},
            "weights": np.asarray(res.weights),
            "history": [vars(h) for h in res.history],
        }
        text = to_text(write_history, res.history)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown command {cmd!r}")
    return text, report


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        text, report = _run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"betasignal: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"betasignal: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = report.to_json() if args.json else text
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
