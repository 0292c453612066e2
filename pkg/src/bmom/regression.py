"""Linear regression and autoregression ``y = X beta + u``.

Least-squares quantities are the posterior means: ``E(beta | D) = beta_hat``,
``E(u | D) = u_hat`` and ``E(sigma^2 | D) = u_hat'u_hat / (n - k)``. The
conditional covariance of ``beta`` is ``(X'X)^-1 sigma^2``; mixing the
conditional normals over the exponential density of ``sigma^2`` gives
Laplace marginals for coefficients, linear combinations, predictions and
realized errors.

Indices are zero-based throughout.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy import linalg

from .densities import LaplaceDist, NormalDist, ScaledExponentialDist
from .errors import (
    DimensionError,
    DomainError,
    IllPosedDesignError,
    InsufficientDataError,
    PositivityError,
    ZeroVarianceError,
)

MAX_COLUMNS = 100
INTERCEPT_NAME = "const"
_EPS = np.finfo(float).eps


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _pivoted_qr(X):
    """Economic QR with column pivoting plus the numerical rank.

    A pivot counts as zero when ``|R_jj| <= max(n, k) * eps * |R_00|``.
    """
    n, k = X.shape
    Q, R, perm = linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return Q, R, perm, 0
    threshold = max(n, k) * _EPS * diag[0]
    rank = int(np.sum(diag > threshold))
    return Q, R, perm, rank


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    y: np.ndarray
    X: np.ndarray
    names: tuple
    intercept: bool = False

    def __post_init__(self):
        y = _frozen(self.y).reshape(-1)
        X = _frozen(self.X)
        if X.ndim == 1:
            X = _frozen(X.reshape(-1, 1))
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        n, k = X.shape
        if y.shape[0] != n:
            raise DimensionError(f"y has {y.shape[0]} rows but X has {n}")
        if len(self.names) != k:
            raise DimensionError(f"{len(self.names)} column names for {k} columns")
        if k < 1:
            raise DimensionError("design needs at least one column")
        if k > MAX_COLUMNS:
            raise DimensionError(f"at most {MAX_COLUMNS} columns are supported, got {k}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DomainError("data must be finite")
        if n <= k:
            raise InsufficientDataError(f"need n > k, got n={n}, k={k}")
        _, _, perm, rank = _pivoted_qr(X)
        if rank < k:
            bad = [self.names[j] for j in sorted(perm[rank:])]
            raise IllPosedDesignError(
                f"design has rank {rank} < {k}; dependent column(s): {', '.join(bad)}", bad
            )

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def k(self):
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class LeastSquaresFit:
    beta_hat: np.ndarray
    residuals: np.ndarray
    s2: float
    dof: int
    xtx_inv: np.ndarray
    leverage: np.ndarray
    problem: RegressionProblem = field(repr=False)

    @property
    def names(self):
        return self.problem.names

    @property
    def k(self):
        return self.beta_hat.shape[0]

    @property
    def n(self):
        return self.residuals.shape[0]

    @property
    def fitted(self):
        return self.problem.y - self.residuals

    def coef_index(self, i):
        if isinstance(i, str):
            try:
                return self.names.index(i)
            except ValueError:
                raise DomainError(f"unknown coefficient {i!r}") from None
        if not 0 <= i < self.k:
            raise DomainError(f"coefficient index {i} out of range [0, {self.k})")
        return int(i)


class ErrorDensities(NamedTuple):
    conditional: NormalDist
    marginal: LaplaceDist


@dataclass(frozen=True, eq=False)
class PredictivePoint:
    x_f: np.ndarray
    y_hat_f: float
    inflation: float
    s_e2: float

    @property
    def marginal(self):
        return LaplaceDist(self.y_hat_f, math.sqrt(self.s_e2 / 2.0))

    def conditional(self, sigma2):
        return NormalDist(self.y_hat_f, self.inflation * sigma2)


def build_design(columns: Mapping[str, Sequence[float]], y, intercept: bool = True) -> RegressionProblem:
    """Assemble a problem from named regressor columns.

    The intercept column (named ``const``) comes first when requested.
    ``columns`` may be empty, which with ``intercept=True`` gives the
    intercept-only (scalar mean) model.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    names, cols = [], []
    if intercept:
        names.append(INTERCEPT_NAME)
        cols.append(np.ones(y.shape[0]))
    for name, values in columns.items():
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.shape[0] != y.shape[0]:
            raise DimensionError(
                f"column {name!r} has {values.shape[0]} values, response has {y.shape[0]}"
            )
        names.append(name)
        cols.append(values)
    if not cols:
        raise DimensionError("design needs at least one column")
    return RegressionProblem(y, np.column_stack(cols), tuple(names), intercept)


def build_ar_design(series: Sequence[float], q: int, intercept: bool = True) -> RegressionProblem:
    """Autoregression of order ``q``: row ``t`` regresses ``y_t`` on ``y_{t-1} .. y_{t-q}``.

    The first ``q`` observations act as known initial values and appear only
    in the design matrix.
    """
    series = np.asarray(series, dtype=float).reshape(-1)
    if q < 1:
        raise DomainError(f"lag order must be >= 1, got {q}")
    k = q + (1 if intercept else 0)
    n = series.shape[0] - q
    if n <= k:
        raise InsufficientDataError(
            f"series of length {series.shape[0]} leaves {n} rows for {k} coefficients"
        )
    lags = {f"lag{j}": series[q - j: q - j + n] for j in range(1, q + 1)}
    return build_design(lags, series[q:], intercept)


def least_squares(problem: RegressionProblem) -> LeastSquaresFit:
    """Least-squares moments without rejecting exact fits (``s2`` may be 0)."""
    X, y = problem.X, problem.y
    n, k = X.shape
    Q, R, perm, rank = _pivoted_qr(X)
    if rank < k:
        bad = [problem.names[j] for j in sorted(perm[rank:])]
        raise IllPosedDesignError(f"numerical rank loss in factorization: {', '.join(bad)}", bad)
    z = linalg.solve_triangular(R, Q.T @ y)
    beta = np.empty(k)
    beta[perm] = z
    r_inv = linalg.solve_triangular(R, np.eye(k))
    xtx_inv = np.empty((k, k))
    xtx_inv[np.ix_(perm, perm)] = r_inv @ r_inv.T
    resid = y - X @ beta
    dof = n - k
    return LeastSquaresFit(
        beta_hat=_frozen(beta),
        residuals=_frozen(resid),
        s2=float(resid @ resid) / dof,
        dof=dof,
        xtx_inv=_frozen(0.5 * (xtx_inv + xtx_inv.T)),
        leverage=_frozen(np.einsum("ij,ij->i", Q, Q)),
        problem=problem,
    )


def _check_spread(fit, y):
    # residual norm at rounding level of the response counts as an exact fit
    scale = 8.0 * len(y) * _EPS * max(float(np.linalg.norm(y)), _EPS)
    if math.sqrt(fit.s2 * fit.dof) <= scale:
        err = ZeroVarianceError("residual sum of squares is zero (exact fit); no density exists")
        err.partial = fit
        raise err


def fit_regression(problem: RegressionProblem) -> LeastSquaresFit:
    """Least-squares fit with ``s^2 > 0`` guaranteed.

    Raises
    ------
    ZeroVarianceError
        The data are fitted exactly. The unrestricted fit is attached as
        ``err.partial`` so ``beta_hat`` and residuals remain available.
    """
    fit = least_squares(problem)
    _check_spread(fit, problem.y)
    return fit


def _ell(fit, ell):
    ell = np.asarray(ell, dtype=float).reshape(-1)
    if ell.shape[0] != fit.k:
        raise DimensionError(f"vector has length {ell.shape[0]}, expected {fit.k}")
    return ell


def coefficient_marginal(fit: LeastSquaresFit, i) -> LaplaceDist:
    j = fit.coef_index(i)
    return LaplaceDist(float(fit.beta_hat[j]), math.sqrt(fit.xtx_inv[j, j] * fit.s2 / 2.0))


def coefficient_conditional(fit: LeastSquaresFit, i, sigma2: Optional[float] = None) -> NormalDist:
    j = fit.coef_index(i)
    sigma2 = fit.s2 if sigma2 is None else sigma2
    return NormalDist(float(fit.beta_hat[j]), fit.xtx_inv[j, j] * sigma2)


def linear_combination_marginal(fit: LeastSquaresFit, ell) -> LaplaceDist:
    """Laplace marginal of ``ell' beta`` with variance ``ell'(X'X)^-1 ell s^2``."""
    ell = _ell(fit, ell)
    if not np.any(ell):
        raise DomainError("combination vector must be nonzero")
    var = float(ell @ fit.xtx_inv @ ell) * fit.s2
    return LaplaceDist(float(ell @ fit.beta_hat), math.sqrt(var / 2.0))


def predictive_point(fit: LeastSquaresFit, x_f) -> PredictivePoint:
    x_f = _ell(fit, x_f)
    inflation = 1.0 + float(x_f @ fit.xtx_inv @ x_f)
    return PredictivePoint(_frozen(x_f), float(x_f @ fit.beta_hat), inflation, inflation * fit.s2)


def realized_error_marginal(fit: LeastSquaresFit, i: int, sigma2: Optional[float] = None) -> ErrorDensities:
    """Densities of the ``i``-th realized error term.

    The conditional is normal with mean ``u_hat_i`` and variance
    ``h_i sigma^2`` (``sigma^2`` defaults to ``s^2``); the marginal replaces
    ``sigma^2`` by its exponential mixture, a Laplace with variance ``h_i s^2``.
    """
    if not 0 <= i < fit.n:
        raise DomainError(f"observation index {i} out of range [0, {fit.n})")
    if sigma2 is None:
        sigma2 = fit.s2
    elif not sigma2 > 0.0:
        raise DomainError(f"sigma2 must be > 0, got {sigma2!r}")
    h = float(fit.leverage[i])
    u = float(fit.residuals[i])
    return ErrorDensities(NormalDist(u, h * sigma2), LaplaceDist(u, math.sqrt(h * fit.s2 / 2.0)))


def positive_combination_density(fit: LeastSquaresFit, ell) -> ScaledExponentialDist:
    ell = _ell(fit, ell)
    mean = float(ell @ fit.beta_hat)
    if not mean > 0.0:
        raise PositivityError(f"ell' beta_hat must be > 0, got {mean!r}")
    return ScaledExponentialDist(mean)


class ProjectionDiagnostics(NamedTuple):
    max_orthogonality: float
    leverage_sum: float
    idempotency_gap: float


def projection_diagnostics(fit: LeastSquaresFit, chunk: int = 512) -> ProjectionDiagnostics:
    """Orthogonality of residuals to ``X`` and projection-matrix checks.

    ``idempotency_gap`` is ``max_i |P_ii - sum_j P_ij^2|`` with
    ``P = X (X'X)^-1 X'`` rebuilt from ``X`` and the stored inverse, plus the
    gap between that diagonal and the stored leverages. Both vanish when
    ``P^2 = P``.
    """
    X = fit.problem.X
    max_orth = float(np.max(np.abs(X.T @ fit.residuals)))
    gap = 0.0
    for start in range(0, fit.n, chunk):
        rows = X[start:start + chunk] @ fit.xtx_inv @ X.T
        diag = rows[np.arange(rows.shape[0]), np.arange(start, start + rows.shape[0])]
        gap = max(gap,
                  float(np.max(np.abs(diag - np.einsum("ij,ij->i", rows, rows)))),
                  float(np.max(np.abs(diag - fit.leverage[start:start + chunk]))))
    return ProjectionDiagnostics(max_orth, float(np.sum(fit.leverage)), gap)
