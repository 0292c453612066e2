"""Command line front end.

Usage::

    bmom mean    --data f.csv --y y [--level 0.95]
    bmom regress --data f.csv --y y --x x1,x2 --intercept [--xf 1,3] [--ell 1,1]
                 [--prior-data p.csv --prior-y y]
    bmom ar      --data f.csv --y y --lags 2
    bmom predict --data f.csv --y y --x x --intercept --xf 1,3
    bmom errors  --data f.csv --y y --x x --intercept
    bmom sample  --data f.csv --y y --x x --intercept --seed 7 --draws 10000 [--draws-out d.csv]
    bmom compare --data f.csv --y y [--x ...]
    bmom density --data f.csv --y y --target theta [--grid 401] [--range lo,hi]

Exit status is 0 on success, 1 for analysis or data errors (one line on
stderr: ``bmom: error: <kind>: <message>``) and 2 for usage errors. Nothing
is written to ``--out`` unless the command succeeds.
"""

import argparse
import os
import sys

import numpy as np

from .densities import ScaledExponentialDist
from .errors import BMOMError, DomainError
from .prior import ConceptualSample, fit_with_prior
from .regression import (
    INTERCEPT_NAME,
    build_ar_design,
    build_design,
    coefficient_conditional,
    coefficient_marginal,
    linear_combination_marginal,
    predictive_point,
    realized_error_marginal,
)
from .report import (
    data_digest,
    emit_density_grid,
    load_csv,
    mean_report,
    regression_report,
    render_report,
    sampler_entry,
)
from .sampler import DrawConfig, draw_joint, draw_predictive, draws_to_csv

COMMANDS = ("mean", "regress", "ar", "predict", "errors", "sample", "compare", "density")


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _level(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"level must be a number, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("level must lie in (0, 1)")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", required=True, help="CSV file with a header row")
    common.add_argument("--y", required=True, help="response column")
    common.add_argument("--x", type=_names, default=[], help="comma-separated regressor columns")
    common.add_argument("--intercept", dest="intercept", action="store_true", default=None)
    common.add_argument("--no-intercept", dest="intercept", action="store_false")
    common.add_argument("--lags", type=int, help="autoregressive order")
    common.add_argument("--xf", type=_floats, help="future regressor vector")
    common.add_argument("--ell", type=_floats, help="linear combination vector")
    common.add_argument("--level", type=_level, default=0.95)
    common.add_argument("--seed", type=lambda s: int(s, 0), help="64-bit seed (falls back to $BMOM_SEED)")
    common.add_argument("--draws", type=int, default=10000)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--draws-out", help="write joint draws as CSV")
    common.add_argument("--prior-data", help="conceptual-sample CSV (same column names)")
    common.add_argument("--prior-y", help="response column of the conceptual sample")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--grid", type=int, default=401)
    common.add_argument("--range", type=_floats, help="density grid range lo,hi")
    common.add_argument("--target", help="density target: theta, sigma2, y_f, ell, beta:NAME, error:I")
    common.add_argument("--conditional", action="store_true",
                        help="density: emit the normal density at sigma2 = s2")
    common.add_argument("--out", help="output path (default: stdout)")

    parser = argparse.ArgumentParser(prog="bmom", description="Bayesian method-of-moments analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _resolve_seed(args):
    try:
        return DrawConfig.from_env(args.draws, args.seed, workers=args.workers)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _regression_fit(args):
    """Fit for every command except ``mean``; returns ``(fit, digest, model, prior)``."""
    if args.lags is not None:
        if args.x:
            raise UsageError("--lags cannot be combined with --x")
        if args.prior_data:
            raise UsageError("conceptual priors are not supported with --lags")
        cols = load_csv(args.data, args.y)
        intercept = True if args.intercept is None else args.intercept
        problem = build_ar_design(cols[args.y], args.lags, intercept)
        return fit_with_prior(problem, ConceptualSample.empty(problem.k)), data_digest(cols), "ar", None
    cols = load_csv(args.data, args.y, args.x)
    intercept = args.intercept if args.intercept is not None else not args.x
    problem = build_design({c: cols[c] for c in args.x}, cols[args.y], intercept)
    prior_info = None
    if args.prior_data:
        if not args.prior_y:
            raise UsageError("--prior-data requires --prior-y")
        pcols = load_csv(args.prior_data, args.prior_y, args.x)
        n_c = len(pcols[args.prior_y])
        parts = ([np.ones(n_c)] if intercept else []) + [pcols[c] for c in args.x]
        prior = ConceptualSample(np.column_stack(parts), pcols[args.prior_y])
        prior_info = {"n_c": prior.n_c, **data_digest(pcols)}
    else:
        prior = ConceptualSample.empty(problem.k)
    return fit_with_prior(problem, prior), data_digest(cols), "regress", prior_info


def _check_vector(vec, k, flag):
    if vec is not None and len(vec) != k:
        raise UsageError(f"{flag} needs {k} values, got {len(vec)}")


def _density_target(args, fit):
    target = args.target or ("theta" if fit.k == 1 and fit.names[0] == INTERCEPT_NAME else None)
    if target is None:
        raise UsageError("density needs --target")
    cond = args.conditional
    if target == "sigma2":
        if cond:
            raise UsageError("sigma2 has no conditional density")
        return target, ScaledExponentialDist(fit.s2)
    if target == "theta" or target.startswith("beta:"):
        name = INTERCEPT_NAME if target == "theta" else target[5:]
        return target, coefficient_conditional(fit, name) if cond else coefficient_marginal(fit, name)
    if target == "y_f":
        x_f = args.xf if args.xf is not None else ([1.0] if fit.k == 1 and fit.names[0] == INTERCEPT_NAME else None)
        if x_f is None:
            raise UsageError("target y_f needs --xf")
        _check_vector(x_f, fit.k, "--xf")
        pt = predictive_point(fit, x_f)
        return target, pt.conditional(fit.s2) if cond else pt.marginal
    if target == "ell":
        if args.ell is None:
            raise UsageError("target ell needs --ell")
        _check_vector(args.ell, fit.k, "--ell")
        if cond:
            raise UsageError("ell density is available as a marginal only")
        return target, linear_combination_marginal(fit, args.ell)
    if target.startswith("error:"):
        try:
            i = int(target[6:])
        except ValueError:
            raise UsageError(f"bad error index in {target!r}") from None
        ed = realized_error_marginal(fit, i)
        return target, ed.conditional if cond else ed.marginal
    raise UsageError(f"unknown density target {target!r}")


def run_analysis(args):
    """Dispatch one command; returns ``(payload bytes, extra files dict)``."""
    if args.command == "mean":
        if args.x or args.lags is not None:
            raise UsageError("mean takes only --y; use regress for regressors")
        cols = load_csv(args.data, args.y)
        report = mean_report(cols[args.y], data_digest(cols), args.level)
        return render_report(report, args.format), {}

    fit, digest, model, prior_info = _regression_fit(args)
    _check_vector(args.xf, fit.k, "--xf")
    _check_vector(args.ell, fit.k, "--ell")

    if args.command == "density":
        if args.grid < 2:
            raise UsageError("--grid must be >= 2")
        if args.range is not None and len(args.range) != 2:
            raise UsageError("--range needs lo,hi")
        target, dist = _density_target(args, fit)
        grid = emit_density_grid(dist, tuple(args.range) if args.range else None, args.grid, target)
        return grid.to_tsv().encode("utf-8"), {}

    if args.command == "predict" and args.xf is None:
        raise UsageError("predict needs --xf")
    x_f = args.xf
    if x_f is None and fit.k == 1 and fit.names[0] == INTERCEPT_NAME and args.command in ("regress", "predict"):
        x_f = [1.0]
    report = regression_report(
        fit, digest, model, args.level, command=args.command, x_f=x_f, ell=args.ell,
        errors=args.command == "errors", prior=prior_info,
    )
    extra = {}
    if args.command == "sample":
        config = _resolve_seed(args)
        draws = draw_joint(fit, config)
        pred = draw_predictive(fit, x_f, config) if x_f is not None else None
        report["sampler"] = sampler_entry(draws, fit.names, args.level, config.seed, pred)
        report["seed"] = config.seed
        if args.draws_out:
            extra[args.draws_out] = draws_to_csv(draws).encode("utf-8")
    return render_report(report, args.format), extra


def _write(path, payload):
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, extra = run_analysis(args)
    except UsageError as exc:
        parser.error(str(exc))
    except BMOMError as exc:
        msg = " ".join(str(exc).split())
        print(f"bmom: error: {exc.kind}: {msg}", file=sys.stderr)
        return 1
    for path, data in extra.items():
        _write(path, data)
    if args.out:
        _write(args.out, payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
