"""Prior information as a conceptual sample ``y_c = X_c beta + u_c``.

The conceptual rows are stacked on top of the observed data,
``w = W beta + e`` with ``W = [X_c; X]`` and ``w = [y_c; y]``, and the
regression machinery is applied to the stacked system unchanged: the
posterior mean is ``(W'W)^-1 W'w``, the conditional covariance
``(W'W)^-1 sigma^2`` and ``E(sigma^2 | D)`` uses ``n + n_c - k`` degrees of
freedom. Every downstream density (coefficient, prediction, realized error)
is therefore built from the stacked fit.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import linalg

from .errors import DimensionError, DomainError, InsufficientDataError
from .regression import (
    LeastSquaresFit,
    RegressionProblem,
    _check_spread,
    _frozen,
    _pivoted_qr,
    least_squares,
)


@dataclass(frozen=True, eq=False)
class ConceptualSample:
    """Fictitious prior observations.

    ``n_c`` defaults to the number of rows. It differs only for samples built
    by :meth:`from_moments`, where ``k`` synthetic rows stand in for a prior
    worth ``n_c`` observations.
    """

    X_c: np.ndarray
    y_c: np.ndarray
    n_c: Optional[int] = None

    def __post_init__(self):
        X_c = np.array(self.X_c, dtype=float)
        y_c = np.array(self.y_c, dtype=float).reshape(-1)
        if X_c.ndim == 1:
            X_c = X_c.reshape(y_c.shape[0], -1) if y_c.shape[0] else X_c.reshape(0, -1)
        if X_c.shape[0] != y_c.shape[0]:
            raise DimensionError(f"X_c has {X_c.shape[0]} rows, y_c has {y_c.shape[0]}")
        object.__setattr__(self, "X_c", _frozen(X_c))
        object.__setattr__(self, "y_c", _frozen(y_c))
        if self.n_c is None:
            object.__setattr__(self, "n_c", X_c.shape[0])
        elif self.n_c < 0:
            raise DomainError("n_c must be >= 0")

    @property
    def rows(self):
        return self.X_c.shape[0]

    @classmethod
    def empty(cls, k):
        return cls(np.zeros((0, k)), np.zeros(0))

    @classmethod
    def from_moments(cls, xtx_c, beta_c, n_c):
        """Synthetic square-root sample reproducing ``X_c'X_c`` and ``beta_hat_c``.

        With ``X_c'X_c = L L'`` (Cholesky) the rows ``X_s = L'`` and
        ``y_s = X_s beta_c`` give ``X_s'X_s = X_c'X_c`` and
        ``X_s'y_s = X_c'X_c beta_c``, which is all the posterior mean needs.
        The within-prior residual sum of squares is not recoverable from
        these moments and is taken as zero.
        """
        xtx_c = np.asarray(xtx_c, dtype=float)
        beta_c = np.asarray(beta_c, dtype=float).reshape(-1)
        k = beta_c.shape[0]
        if xtx_c.shape != (k, k):
            raise DimensionError(f"X_c'X_c must be {k}x{k}, got {xtx_c.shape}")
        if not np.allclose(xtx_c, xtx_c.T, rtol=1e-12, atol=0.0):
            raise DomainError("X_c'X_c must be symmetric")
        try:
            lower = linalg.cholesky(xtx_c, lower=True)
        except linalg.LinAlgError:
            raise DomainError("X_c'X_c must be positive definite") from None
        X_s = lower.T
        return cls(X_s, X_s @ beta_c, n_c)


def _check_prior(problem, prior):
    if prior.rows and prior.X_c.shape[1] != problem.k:
        raise DimensionError(
            f"conceptual sample has {prior.X_c.shape[1]} columns, data has {problem.k}"
        )


def stack(problem: RegressionProblem, prior: ConceptualSample) -> RegressionProblem:
    """Stack conceptual rows (first) onto the data; an empty prior is a no-op."""
    _check_prior(problem, prior)
    if prior.rows == 0:
        return problem
    return RegressionProblem(
        np.concatenate([prior.y_c, problem.y]),
        np.vstack([prior.X_c, problem.X]),
        problem.names,
        problem.intercept,
    )


def fit_with_prior(problem: RegressionProblem, prior: ConceptualSample) -> LeastSquaresFit:
    """Posterior moments for the stacked system with ``n + n_c - k`` degrees of freedom."""
    stacked = stack(problem, prior)
    if prior.rows == 0:
        fit = least_squares(problem)
    else:
        base = least_squares(stacked)
        dof = problem.n + prior.n_c - problem.k
        if dof <= 0:
            raise InsufficientDataError(f"n + n_c - k = {dof} must be positive")
        rss = float(base.residuals @ base.residuals)
        fit = LeastSquaresFit(
            beta_hat=base.beta_hat,
            residuals=base.residuals,
            s2=rss / dof,
            dof=dof,
            xtx_inv=base.xtx_inv,
            leverage=base.leverage,
            problem=stacked,
        )
    _check_spread(fit, stacked.y)
    return fit


class PosteriorMeanForms(NamedTuple):
    stacked: np.ndarray
    weighted: Optional[np.ndarray]
    prior_mean: Optional[np.ndarray]


def posterior_mean_forms(problem: RegressionProblem, prior: ConceptualSample) -> PosteriorMeanForms:
    """Both algebraic forms of the prior-data posterior mean.

    ``stacked`` is ``(W'W)^-1 W'w``. ``weighted`` is
    ``(X_c'X_c + X'X)^-1 (X_c'X_c beta_hat_c + X'X beta_hat)``, available only
    when ``X_c`` alone has full column rank (``beta_hat_c`` needs
    ``(X_c'X_c)^-1``); otherwise it and ``prior_mean`` are ``None``.
    """
    _check_prior(problem, prior)
    k = problem.k
    stacked = least_squares(stack(problem, prior)).beta_hat
    if prior.rows < k:
        return PosteriorMeanForms(stacked, None, None)
    _, _, _, rank = _pivoted_qr(prior.X_c)
    if rank < k:
        return PosteriorMeanForms(stacked, None, None)
    beta_c = linalg.lstsq(prior.X_c, prior.y_c)[0]
    beta_d = least_squares(problem).beta_hat
    xtx_c = prior.X_c.T @ prior.X_c
    xtx = problem.X.T @ problem.X
    weighted = linalg.solve(xtx_c + xtx, xtx_c @ beta_c + xtx @ beta_d, assume_a="pos")
    return PosteriorMeanForms(stacked, weighted, beta_c)
