"""Command-line front end.

Subcommands:
  fit            fit one data set and print the estimate as JSON
  shrink         dialed estimate of a target borrowing from a source
  sweep          dialed estimates and estimated risk along a dial grid (CSV)
  simulate       run a built-in simulation cell from a JSON config
  select-source  score source configurations and report the winner

Data files are UTF-8 CSV with a header row; the response column is named via
--response and every other column is a feature.  --intercept (default on)
prepends a constant regressor.  A Gaussian source can alternatively be given
as a summary JSON file {"n1", "beta1_hat", "gram", "sigma2_hat"}; `fit`
emits exactly that shape so its output can be re-ingested by `shrink`.

Every command writes machine-readable error JSON to stderr and exits nonzero
on validation problems.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .data import Dataset, GaussianGram, SourceSummary
from .dial import (
    DEFAULT_BRACKET,
    gaussian_mse_curve,
    glm_amse_curve,
    lambda_bound_gaussian,
    lambda_bound_glm,
    select_lambda_gaussian,
    select_lambda_glm,
)
from .errors import (
    ParseError,
    PayloadMismatchError,
    ShrinkageError,
    ValidationError,
    ZeroDeltaError,
)
from .families import GAUSSIAN, get_family
from .glm import fit_mle, summarize_source
from .harness import config_to_dict, lambda_sweep, run_setting, validate_config
from .inference import confidence_intervals, wald_intervals
from .multisource import MODE_ALL_SUBSETS, MODE_SINGLES_AND_FULL, select_source_config
from .shrink import solve_dial_estimate


# ---------------------------------------------------------------------------
# File ingestion
# ---------------------------------------------------------------------------

def _read_csv_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = [row for row in csv.reader(handle) if row]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: empty file, expected a header row")
    return rows


def load_dataset(path, response, intercept=True):
    """Read a CSV data file into a Dataset; returns (dataset, coefficient names)."""
    header, *body = _read_csv_rows(path)
    if response not in header:
        raise ParseError(f"{path}: no column named {response!r}; columns are {header}")
    if header.count(response) > 1:
        raise ParseError(f"{path}: response column {response!r} appears more than once")
    if not body:
        raise ParseError(f"{path}: no data rows")
    response_idx = header.index(response)
    feature_idx = [j for j in range(len(header)) if j != response_idx]
    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ParseError(
                f"{path}: row {i + 2} has {len(row)} fields, expected {len(header)}"
            )
        for j, item in enumerate(row):
            try:
                values[i, j] = float(item)
            except ValueError:
                raise ParseError(
                    f"{path}: row {i + 2}, column {header[j]!r}: not a number: {item!r}"
                ) from None
    y = values[:, response_idx]
    design = values[:, feature_idx].T
    names = [header[j] for j in feature_idx]
    if intercept:
        design = np.vstack([np.ones(len(body)), design])
        names = ["intercept"] + names
    return Dataset(design, y), names


def load_source_summary(path) -> SourceSummary:
    """Read a Gaussian source-summary JSON file."""
    try:
        with open(path, encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    for key in ("n1", "beta1_hat", "gram"):
        if key not in obj:
            raise ParseError(f"{path}: missing required field {key!r}")
    try:
        payload = GaussianGram(np.asarray(obj["gram"], dtype=float),
                               obj.get("sigma2_hat"))
        return SourceSummary(int(obj["n1"]), np.asarray(obj["beta1_hat"], dtype=float),
                             payload)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed summary: {exc}") from exc


def _load_source(path, family, response, intercept):
    """A source argument is either a summary JSON or an individual-level CSV."""
    if path.endswith(".json"):
        if family is not GAUSSIAN:
            raise PayloadMismatchError(
                f"summary files describe Gaussian sources; family {family.name!r} "
                "needs individual-level source data"
            )
        return load_source_summary(path)
    data, _ = load_dataset(path, response, intercept)
    summary, _ = summarize_source(family, data)
    return summary


# ---------------------------------------------------------------------------
# Report helpers
# ---------------------------------------------------------------------------

def _vec(x):
    return [float(v) for v in np.asarray(x)]


def _mat(x):
    return [[float(v) for v in row] for row in np.asarray(x)]


def _print_json(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _summary_dict(fit):
    return {
        "n1": fit.n,
        "beta1_hat": _vec(fit.beta_hat),
        "gram": _mat(fit.gram),
        "sigma2_hat": float(fit.gamma_hat),
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_fit(args):
    family = get_family(args.family)
    data, names = load_dataset(args.data, args.response, args.intercept)
    fit = fit_mle(family, data)
    intervals = wald_intervals(fit, args.level)
    report = {
        "family": family.name,
        "n": fit.n,
        "p": fit.p,
        "columns": names,
        "beta_hat": _vec(fit.beta_hat),
        "se": _vec(intervals.se),
        "gamma_hat": float(fit.gamma_hat),
        "iterations": fit.iterations,
        "converged": fit.converged,
    }
    if family is GAUSSIAN:
        report["source_summary"] = _summary_dict(fit)
    _print_json(report)
    return 0


def _parse_lambda(text):
    if text == "auto":
        return None
    try:
        lam = float(text)
    except ValueError:
        raise ValidationError(f"--lambda must be a number or 'auto', got {text!r}") from None
    if not np.isfinite(lam) or lam < 0:
        raise ValidationError(f"--lambda must be finite and >= 0, got {lam}")
    return lam


def cmd_shrink(args):
    family = get_family(args.family)
    target, names = load_dataset(args.target, args.response, args.intercept)
    source = _load_source(args.source, family, args.response, args.intercept)
    target_fit = fit_mle(family, target)
    fixed = _parse_lambda(args.lam)

    if family is GAUSSIAN:
        curve_fn = gaussian_mse_curve(target_fit, source)
    else:
        curve_fn = glm_amse_curve(family, target, target_fit, source)

    if fixed is None:
        if family is GAUSSIAN:
            lam, curve = select_lambda_gaussian(target_fit, source, args.bracket)
        else:
            lam, curve = select_lambda_glm(family, target, target_fit, source, args.bracket)
        mse_at_lambda = curve.mse_at_tilde
        bound = curve.lambda_lower_bound
    else:
        lam = fixed
        mse_at_lambda = float(curve_fn(lam))
        try:
            if family is GAUSSIAN:
                bound = lambda_bound_gaussian(
                    target_fit, source, target_fit.beta_hat - source.beta1_hat,
                    target_fit.gamma_hat, target_fit.n,
                )
            else:
                bound = lambda_bound_glm(family, target, source, target_fit.beta_hat,
                                         n2=target_fit.n, gamma2=target_fit.gamma_hat)
        except (ZeroDeltaError, ValidationError):
            bound = None

    estimate = solve_dial_estimate(family, target, source, lam, target_fit=target_fit)
    intervals = confidence_intervals(estimate, args.level)
    mle_intervals = wald_intervals(target_fit, args.level)
    _print_json({
        "family": family.name,
        "columns": names,
        "lambda": float(lam),
        "lambda_mode": "auto" if fixed is None else "fixed",
        "beta_tilde": _vec(estimate.beta_tilde),
        "se": _vec(intervals.se),
        "ci_lower": _vec(intervals.lower),
        "ci_upper": _vec(intervals.upper),
        "level": float(args.level),
        "estimated_mse": float(mse_at_lambda),
        "lambda_lower_bound": None if bound is None else float(bound),
        "mle": {
            "beta_hat": _vec(target_fit.beta_hat),
            "se": _vec(mle_intervals.se),
            "ci_lower": _vec(mle_intervals.lower),
            "ci_upper": _vec(mle_intervals.upper),
            "estimated_mse": float(curve_fn(0.0)),
        },
    })
    return 0


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"--grid must look like lo:hi:k, got {text!r}")
    try:
        lo, hi, k = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"--grid must look like lo:hi:k, got {text!r}") from None
    if not (np.isfinite(lo) and np.isfinite(hi) and 0 <= lo <= hi):
        raise ValidationError(f"--grid needs 0 <= lo <= hi, got {text!r}")
    if k < 1 or (k == 1 and lo != hi):
        raise ValidationError(f"--grid needs k >= 2 for a range, got {text!r}")
    return np.linspace(lo, hi, k)


def cmd_sweep(args):
    family = get_family(args.family)
    target, names = load_dataset(args.target, args.response, args.intercept)
    source = _load_source(args.source, family, args.response, args.intercept)
    grid = _parse_grid(args.grid)
    rows = lambda_sweep(family, target, source, grid)
    writer = csv.writer(sys.stdout)
    writer.writerow(["lambda", "estimated_mse", "error"] + [f"beta_{n}" for n in names])
    for row in rows:
        if row["error"] is None:
            writer.writerow([repr(row["lam"]), repr(row["mse"]), ""]
                            + [repr(float(b)) for b in row["beta"]])
        else:
            writer.writerow([repr(row["lam"]), "", row["error"]] + [""] * len(names))
    return 0


def _format_cell(cell):
    return ";".join(f"{k}={cell[k]}" for k in sorted(cell))


def _csv_value(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if np.isnan(value):
            return ""
        return repr(value)
    return value


def _write_summary_csv(path, table, paper_scale):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "setting", "cell", "replicates", "master_seed", "estimator", "emse",
            "mcse", "coverage", "lambda_mean", "lambda_sd", "failures", "scale",
        ])
        for row in table.rows(paper_scale=paper_scale):
            writer.writerow([
                table.setting,
                _format_cell(table.cell),
                table.replicates,
                table.master_seed,
                row["estimator"],
                _csv_value(row["emse"]),
                _csv_value(row["mcse"]),
                _csv_value(row["coverage"]),
                _csv_value(row["lambda_mean"]),
                _csv_value(row["lambda_sd"]),
                row["failures"],
                row["scale"],
            ])


def _write_replicates_csv(path, table):
    raw = table.raw
    p = len(table.beta_true)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["replicate", "estimator", "failed", "sq_error", "lambda", "est_mse",
             "hw_ok"] + [f"covered_{j}" for j in range(p)]
        )
        for rep in range(table.replicates):
            for label in table.estimators:
                slot = raw[label]
                covered = slot["covered"][rep]
                writer.writerow(
                    [rep, label, int(slot["failed"][rep]),
                     _csv_value(float(slot["sq_error"][rep])),
                     _csv_value(float(slot["lambda"][rep])),
                     _csv_value(float(slot["est_mse"][rep])),
                     _csv_value(float(slot["hw_ok"][rep]))]
                    + [_csv_value(float(c)) for c in covered]
                )


def cmd_simulate(args):
    try:
        with open(args.config, encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.config}: invalid JSON: {exc}") from exc
    if args.seed is not None:
        if not isinstance(obj, dict):
            raise ValidationError("config: must be a JSON object")
        obj["master_seed"] = args.seed
    config = validate_config(obj)
    table = run_setting(config, threads=args.threads, keep_raw=True)
    os.makedirs(args.out, exist_ok=True)
    paths = {
        "config": os.path.join(args.out, "config.json"),
        "summary": os.path.join(args.out, "summary.csv"),
        "replicates": os.path.join(args.out, "replicates.csv"),
    }
    with open(paths["config"], "w", encoding="utf-8") as handle:
        json.dump(config_to_dict(config), handle, indent=2)
        handle.write("\n")
    _write_summary_csv(paths["summary"], table, args.paper_scale)
    _write_replicates_csv(paths["replicates"], table)
    _print_json({"out": args.out, "files": paths})
    return 0


def cmd_select_source(args):
    family = get_family(args.family)
    target, _ = load_dataset(args.target, args.response, args.intercept)
    sources = []
    for path in args.source:
        data, _ = load_dataset(path, args.response, args.intercept)
        sources.append(data)
    best, report = select_source_config(family, target, sources, mode=args.mode,
                                        bracket=args.bracket)
    _print_json({
        "winner": best.id,
        "winner_members": list(best.members),
        "configs": report["configs"],
        "warning": report["warning"],
    })
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------

def _add_data_options(parser):
    parser.add_argument("--response", required=True, help="name of the response column")
    parser.add_argument("--family", default="gaussian", choices=["gaussian", "bernoulli"])
    parser.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True,
                        help="prepend a constant regressor (default: on)")
    parser.add_argument("--level", type=float, default=0.95,
                        help="confidence level for intervals")


def _bracket_pair(parser):
    parser.add_argument("--bracket", type=_parse_bracket, default=DEFAULT_BRACKET,
                        metavar="LO:HI", help="dial search bracket (default 1e-8:1e3)")


def _parse_bracket(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers LO:HI, got {text!r}") from None
    return (lo, hi)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ise",
        description="Information-shrinkage estimation for GLMs: dial source "
                    "information into a target fit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit one data set, print the estimate as JSON")
    fit.add_argument("data", help="CSV data file")
    _add_data_options(fit)
    fit.set_defaults(func=cmd_fit)

    shrink = sub.add_parser("shrink", help="dialed estimate borrowing from a source")
    shrink.add_argument("target", help="target CSV data file")
    shrink.add_argument("--source", required=True,
                        help="source CSV data file or Gaussian summary JSON")
    shrink.add_argument("--lambda", dest="lam", default="auto",
                        help="dial value, or 'auto' to minimize the estimated risk")
    _add_data_options(shrink)
    _bracket_pair(shrink)
    shrink.set_defaults(func=cmd_shrink)

    sweep = sub.add_parser("sweep", help="dial grid sweep, CSV on stdout")
    sweep.add_argument("target", help="target CSV data file")
    sweep.add_argument("--source", required=True,
                       help="source CSV data file or Gaussian summary JSON")
    sweep.add_argument("--grid", required=True, metavar="LO:HI:K",
                       help="K evenly spaced dial values from LO to HI")
    _add_data_options(sweep)
    sweep.set_defaults(func=cmd_sweep)

    simulate = sub.add_parser("simulate", help="run a built-in simulation cell")
    simulate.add_argument("config", help="JSON simulation config")
    simulate.add_argument("--out", required=True, help="output directory")
    simulate.add_argument("--threads", type=int, default=None,
                          help="worker processes (default: ISE_THREADS or 1)")
    simulate.add_argument("--paper-scale", action="store_true",
                          help="apply the conventional presentation scaling to the summary")
    simulate.add_argument("--seed", type=int, default=None,
                          help="override the config's master_seed")
    simulate.set_defaults(func=cmd_simulate)

    select = sub.add_parser("select-source",
                            help="score source configurations, report the winner")
    select.add_argument("target", help="target CSV data file")
    select.add_argument("--source", action="append", required=True,
                        help="source CSV data file (repeatable)")
    select.add_argument("--mode", default=MODE_SINGLES_AND_FULL,
                        choices=[MODE_SINGLES_AND_FULL, MODE_ALL_SUBSETS])
    _add_data_options(select)
    _bracket_pair(select)
    select.set_defaults(func=cmd_select_source)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ShrinkageError as exc:
        json.dump(exc.to_json_dict(), sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2
    except OSError as exc:
        json.dump({"error": "io", "message": str(exc)}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
