"""Analysis reports, rendering and density grids.

A report is an ordered mapping with a fixed key order so that JSON output is
byte-stable. Reals are written with Python's shortest round-trip ``repr``
(at most 17 significant digits), which parses back to the identical double
on any IEEE-754 platform. Undefined quantities (for example the Student-t
fourth moment when ``nu <= 4``) are written as ``null``.
"""

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .baseline import compare_report
from .densities import (
    IntervalEstimate,
    LaplaceDist,
    NormalDist,
    ScaledExponentialDist,
    central_interval,
)
from .errors import DataError, DomainError
from .mean_model import fit_mean, mean_maxent, positive_mean_density
from .regression import (
    coefficient_conditional,
    coefficient_marginal,
    linear_combination_marginal,
    predictive_point,
    projection_diagnostics,
    realized_error_marginal,
)
from .sampler import summarize_draws

SCHEMA_VERSION = "bmom-report/1"


# -- CSV input ---------------------------------------------------------------

def load_csv(path, y_column: str, x_columns: Sequence[str] = ()) -> dict:
    """Read the selected numeric columns of a headed, comma-separated file.

    Returns a dict ``{name: list of float}`` with ``y_column`` first. Error
    messages cite the file line (the header is line 1) and the column.
    """
    wanted = [y_column] + [c for c in x_columns if c != y_column]
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"data file not found: {path}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    missing = [c for c in wanted if c not in header]
    if missing:
        raise DataError(f"{path}: unknown column(s): {', '.join(missing)}")
    index = {c: header.index(c) for c in wanted}
    out = {c: [] for c in wanted}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{path}: row {lineno} has {len(row)} fields, header has {len(header)}")
        for c in wanted:
            cell = row[index[c]].strip()
            try:
                value = float(cell)
            except ValueError:
                value = math.nan
            if not math.isfinite(value):
                raise DataError(f"{path}: row {lineno}, column {c!r}: not a finite number: {cell!r}")
            out[c].append(value)
    return out


def data_digest(columns: dict) -> dict:
    payload = json.dumps({k: [repr(v) for v in vals] for k, vals in columns.items()})
    first = next(iter(columns.values()), [])
    return {
        "n": len(first),
        "columns": list(columns),
        "sha256": hashlib.sha256(payload.encode()).hexdigest(),
    }


# -- serialization helpers ---------------------------------------------------

def _f(x):
    return None if x is None else float(x)


def density_entry(target, dist):
    if isinstance(dist, LaplaceDist):
        return {"target": target, "family": "laplace", "location": _f(dist.location),
                "scale": _f(dist.scale), "variance": _f(dist.variance)}
    if isinstance(dist, NormalDist):
        return {"target": target, "family": "normal", "mean": _f(dist.mean),
                "variance": _f(dist.variance)}
    if isinstance(dist, ScaledExponentialDist):
        return {"target": target, "family": "exponential", "mean": _f(dist.mean)}
    raise TypeError(type(dist).__name__)


def interval_entry(target, iv: IntervalEstimate):
    return {"target": target, "level": _f(iv.level), "method": iv.method,
            "lower": _f(iv.lower), "upper": _f(iv.upper), "width": _f(iv.width)}


def comparison_entry(cmp):
    return {
        "level": _f(cmp.level),
        "nu": _f(cmp.nu),
        "sigma2_mean": {"bmom": _f(cmp.bmom_sigma2_mean), "traditional": _f(cmp.traditional_sigma2_mean)},
        "excess_kurtosis": {"bmom": _f(cmp.bmom_excess), "student_t": _f(cmp.t_excess)},
        "targets": [
            {
                "target": row.target,
                "posterior_mean": {"laplace": _f(row.posterior_mean), "normal": _f(row.posterior_mean),
                                   "student_t": _f(row.posterior_mean)},
                "variance": {"bmom": _f(row.bmom_variance), "traditional": _f(row.traditional_variance)},
                "intervals": {
                    "laplace": [_f(row.laplace.lower), _f(row.laplace.upper)],
                    "normal": [_f(row.normal.lower), _f(row.normal.upper)],
                    "student_t": [_f(row.student_t.lower), _f(row.student_t.upper)],
                },
                "width_ratio": {"laplace_normal": _f(row.laplace_normal_width_ratio),
                                "student_t_normal": _f(row.t_normal_width_ratio)},
            }
            for row in cmp.rows
        ],
    }


def sampler_entry(draws, names, level, seed, predictive=None):
    summary = summarize_draws(draws, levels=(level,))
    cols = ["sigma2"] + list(names)
    entry = {
        "seed": int(seed),
        "n_draws": summary.n,
        "columns": cols,
        "mean": [_f(v) for v in summary.mean],
        "covariance": [[_f(v) for v in row] for row in np.atleast_2d(summary.covariance)],
        "excess_kurtosis": [_f(v) for v in summary.excess_kurtosis],
        "intervals": [interval_entry(c, iv) for c, iv in zip(cols, summary.intervals[level])],
    }
    if predictive is not None:
        ps = summarize_draws(predictive, levels=(level,))
        entry["predictive"] = {
            "mean": _f(ps.mean[0]),
            "variance": _f(ps.covariance[0, 0]),
            "excess_kurtosis": _f(ps.excess_kurtosis[0]),
            "interval": interval_entry("y_f", ps.intervals[level][0]),
        }
    return entry


# -- report assembly ---------------------------------------------------------

def _header(command, model, digest, k):
    return {
        "schema_version": SCHEMA_VERSION,
        "toolkit_version": __version__,
        "command": command,
        "model": model,
        "data": {"n": digest["n"], "k": k, "columns": digest["columns"], "sha256": digest["sha256"]},
    }


def mean_report(values, digest, level=0.95, command="mean"):
    post = fit_mean(values)
    ms = mean_maxent(post)
    densities = [
        density_entry("theta", ms.theta_marginal),
        density_entry("theta|sigma2=s2", ms.theta_conditional),
        density_entry("sigma2", ms.sigma2_density),
        density_entry("y_f", ms.predictive_marginal),
        density_entry("y_f|sigma2=s2", ms.predictive_conditional),
    ]
    if post.ybar > 0:
        densities.append(density_entry("theta>0", positive_mean_density(post)))
    cmp = compare_report(post, level)
    row = cmp.rows[0]
    report = _header(command, "mean", digest, 1)
    report["moments"] = {
        "ybar": post.ybar,
        "s2": post.s2,
        "dof": post.dof,
        "residuals": list(post.residuals),
    }
    report["densities"] = densities
    report["intervals"] = [
        interval_entry("theta", row.laplace),
        interval_entry("theta", row.normal),
        interval_entry("theta", row.student_t),
        interval_entry("y_f", central_interval(ms.predictive_marginal, level)),
        interval_entry("y_f", central_interval(ms.predictive_conditional, level)),
    ]
    report["comparison"] = comparison_entry(cmp)
    report["sampler"] = None
    return report


def regression_report(fit, digest, model, level=0.95, command="regress", x_f=None, ell=None,
                      errors=False, prior=None):
    """Report for a least-squares fit (plain, autoregressive or with a conceptual prior)."""
    names = fit.names
    report = _header(command, model, digest, fit.k)
    diag = projection_diagnostics(fit)
    report["moments"] = {
        "coefficients": [
            {"name": name, "estimate": _f(fit.beta_hat[j]),
             "conditional_variance": _f(fit.xtx_inv[j, j] * fit.s2)}
            for j, name in enumerate(names)
        ],
        "s2": fit.s2,
        "dof": fit.dof,
        "xtx_inv": [[_f(v) for v in row] for row in fit.xtx_inv],
        "leverage": [_f(v) for v in fit.leverage],
        "residuals": [_f(v) for v in fit.residuals],
        "diagnostics": {"max_orthogonality": diag.max_orthogonality,
                        "leverage_sum": diag.leverage_sum},
    }
    if prior is not None:
        report["prior"] = prior
    densities = [density_entry("sigma2", ScaledExponentialDist(fit.s2))]
    intervals = []
    for j, name in enumerate(names):
        marg = coefficient_marginal(fit, j)
        densities.append(density_entry(f"beta[{name}]", marg))
        densities.append(density_entry(f"beta[{name}]|sigma2=s2", coefficient_conditional(fit, j)))
    cmp = compare_report(fit, level)
    for row in cmp.rows:
        for iv in (row.laplace, row.normal, row.student_t):
            intervals.append(interval_entry(f"beta[{row.target}]", iv))
    if ell is not None:
        comb = linear_combination_marginal(fit, ell)
        densities.append(density_entry("ell'beta", comb))
        intervals.append(interval_entry("ell'beta", central_interval(comb, level)))
        report["combination"] = {"ell": [_f(v) for v in ell], "location": comb.location,
                                 "variance": comb.variance}
    if x_f is not None:
        pt = predictive_point(fit, x_f)
        densities.append(density_entry("y_f", pt.marginal))
        densities.append(density_entry("y_f|sigma2=s2", pt.conditional(fit.s2)))
        intervals.append(interval_entry("y_f", central_interval(pt.marginal, level)))
        intervals.append(interval_entry("y_f", central_interval(pt.conditional(fit.s2), level)))
        report["prediction"] = {"x_f": [_f(v) for v in pt.x_f], "y_hat_f": pt.y_hat_f,
                                "inflation": pt.inflation, "s_e2": pt.s_e2}
    if errors:
        report["realized_errors"] = [
            {"index": i, "residual": ed.marginal.location, "leverage": _f(fit.leverage[i]),
             "conditional_variance": ed.conditional.variance, "laplace_scale": ed.marginal.scale}
            for i, ed in ((i, realized_error_marginal(fit, i)) for i in range(fit.n))
        ]
    report["densities"] = densities
    report["intervals"] = intervals
    report["comparison"] = comparison_entry(cmp)
    report["sampler"] = None
    return report


# -- rendering ---------------------------------------------------------------

def _check_finite(obj, path="report"):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise DomainError(f"non-finite value at {path}")
    elif isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{path}[{i}]")


def render_report(report: dict, fmt: str = "json") -> bytes:
    _check_finite(report)
    if fmt == "json":
        return (json.dumps(report, indent=2, allow_nan=False) + "\n").encode("utf-8")
    if fmt == "text":
        return render_text(report).encode("utf-8")
    raise DomainError(f"unknown format {fmt!r}")


def _g(x):
    return "-" if x is None else f"{x:.6g}"


def render_text(report: dict) -> str:
    d = report["data"]
    m = report["moments"]
    lines = [f"bmom {report['toolkit_version']}  command={report['command']}  model={report['model']}",
             f"data: n={d['n']} k={d['k']} columns={','.join(d['columns'])}", ""]
    if "ybar" in m:
        lines.append(f"posterior mean of theta (ybar): {_g(m['ybar'])}")
    else:
        lines.append(f"{'coefficient':<16}{'estimate':>14}{'cond. var':>14}")
        for c in m["coefficients"]:
            lines.append(f"{c['name']:<16}{_g(c['estimate']):>14}{_g(c['conditional_variance']):>14}")
    lines.append(f"s2 = E(sigma2|D): {_g(m['s2'])}   dof: {m['dof']}")
    if "prediction" in report:
        p = report["prediction"]
        lines.append(f"prediction: y_hat_f={_g(p['y_hat_f'])} inflation={_g(p['inflation'])} s_e2={_g(p['s_e2'])}")
    lines += ["", "densities:"]
    for e in report["densities"]:
        params = " ".join(f"{k}={_g(v)}" for k, v in e.items() if k not in ("target", "family"))
        lines.append(f"  {e['target']:<24}{e['family']:<13}{params}")
    lines += ["", "intervals:"]
    for iv in report["intervals"]:
        lines.append(f"  {iv['target']:<24}{iv['method']:<11}level={_g(iv['level'])}  "
                     f"[{_g(iv['lower'])}, {_g(iv['upper'])}]  width={_g(iv['width'])}")
    c = report["comparison"]
    lines += ["", f"comparison (nu={_g(c['nu'])}):",
              f"  E(sigma2|D): bmom={_g(c['sigma2_mean']['bmom'])} traditional={_g(c['sigma2_mean']['traditional'])}",
              f"  excess kurtosis: bmom={_g(c['excess_kurtosis']['bmom'])} "
              f"student_t={_g(c['excess_kurtosis']['student_t'])}"]
    for t in c["targets"]:
        lines.append(f"  {t['target']}: laplace/normal width ratio={_g(t['width_ratio']['laplace_normal'])} "
                     f"t/normal={_g(t['width_ratio']['student_t_normal'])}")
    s = report.get("sampler")
    if s:
        lines += ["", f"sampler: seed={s['seed']} draws={s['n_draws']}"]
        for name, mu, ek in zip(s["columns"], s["mean"], s["excess_kurtosis"]):
            lines.append(f"  {name:<16} mean={_g(mu)} excess kurtosis={_g(ek)}")
    return "\n".join(lines) + "\n"


# -- density grids -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DensityGrid:
    target: str
    x: np.ndarray
    pdf: np.ndarray
    family: str

    def to_tsv(self) -> str:
        rows = ["x\tpdf"] + [f"{float(a)!r}\t{float(b)!r}" for a, b in zip(self.x, self.pdf)]
        return "\n".join(rows) + "\n"


def _family(dist):
    return {LaplaceDist: "laplace", NormalDist: "normal", ScaledExponentialDist: "exponential"}[type(dist)]


def emit_density_grid(dist, range_: Optional[tuple] = None, points: int = 401, target: str = "") -> DensityGrid:
    """Evaluate ``dist.pdf`` on an evenly spaced grid.

    The default range is the mean plus or minus six standard deviations,
    clipped at zero for the exponential family.
    """
    if points < 2:
        raise DomainError("a density grid needs at least 2 points")
    if range_ is None:
        centre = dist.mean
        lo, hi = centre - 6.0 * dist.std, centre + 6.0 * dist.std
        if isinstance(dist, ScaledExponentialDist):
            lo = 0.0
    else:
        lo, hi = (float(v) for v in range_)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError(f"invalid grid range ({lo}, {hi})")
    if isinstance(dist, ScaledExponentialDist) and lo < 0:
        raise DomainError("exponential grid must start at x >= 0")
    x = np.linspace(lo, hi, points)
    return DensityGrid(target, x, np.asarray(dist.pdf(x), dtype=float), _family(dist))
