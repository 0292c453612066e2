"""Scalar mean process ``y_i = theta + u_i``.

Posterior moments follow from two weak assumptions on the realized errors:
their posterior mean is zero on average, so ``E(theta | D)`` is the sample
mean; and their second moment gives ``E(sigma^2 | D) = s^2`` with divisor
``n - 1``. Densities are then the maximum-entropy ones for those moments.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .densities import (
    IntervalEstimate,
    LaplaceDist,
    NormalDist,
    ScaledExponentialDist,
    central_interval,
)
from .errors import DomainError, InsufficientDataError, PositivityError, ZeroVarianceError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Sample:
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("sample values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def n(self):
        return len(self.values)


@dataclass(frozen=True)
class MeanPosterior:
    ybar: float
    residuals: tuple
    s2: float
    n: int

    @property
    def dof(self):
        return self.n - 1

    @property
    def s(self):
        return math.sqrt(self.s2)


@dataclass(frozen=True)
class MaxentSet:
    """Maximum-entropy posterior and predictive densities for the mean model.

    ``error_conditional`` and ``error_marginal`` hold one density per
    observation (the realized error terms ``u_i``).
    """

    theta_conditional: NormalDist
    sigma2_density: ScaledExponentialDist
    theta_marginal: LaplaceDist
    predictive_marginal: LaplaceDist
    predictive_conditional: NormalDist
    error_conditional: tuple
    error_marginal: tuple
    sigma2: float


def _as_sample(sample):
    return sample if isinstance(sample, Sample) else Sample(tuple(sample))


def fit_mean(sample) -> MeanPosterior:
    """Posterior mean of ``theta``, realized-error means and ``E(sigma^2 | D)``.

    Raises
    ------
    InsufficientDataError
        Fewer than two observations.
    ZeroVarianceError
        All observations equal; the densities would be point masses. The
        moments are still attached as ``err.partial``.
    """
    sample = _as_sample(sample)
    if sample.n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {sample.n}")
    y = np.asarray(sample.values)
    ybar = float(y.mean())
    resid = y - ybar
    s2 = float(resid @ resid) / (sample.n - 1)
    post = MeanPosterior(ybar, tuple(float(r) for r in resid), s2, sample.n)
    # residual norm at rounding level of the data counts as zero spread
    scale = 8.0 * sample.n * _EPS * max(float(np.linalg.norm(y)), _EPS)
    if math.sqrt(s2 * (sample.n - 1)) <= scale:
        err = ZeroVarianceError("all observations are identical; s^2 = 0")
        err.partial = post
        raise err
    return post


def mean_maxent(post: MeanPosterior, sigma2: Optional[float] = None) -> MaxentSet:
    """Build every density for the mean model.

    The conditional (normal) members use ``sigma2`` when given and ``s^2``
    otherwise. The marginal (Laplace) members are the normal densities
    mixed over ``sigma^2 ~ Exponential(mean=s^2)``, which gives scale
    ``sqrt(variance / 2)`` with variance ``s^2/n`` for ``theta`` and
    ``(1 + 1/n) s^2`` for a future observation.
    """
    if sigma2 is None:
        sigma2 = post.s2
    elif not (math.isfinite(sigma2) and sigma2 > 0.0):
        raise DomainError(f"sigma2 must be > 0, got {sigma2!r}")
    n = post.n
    theta_scale = math.sqrt(post.s2 / (2.0 * n))
    return MaxentSet(
        theta_conditional=NormalDist(post.ybar, sigma2 / n),
        sigma2_density=ScaledExponentialDist(post.s2),
        theta_marginal=LaplaceDist(post.ybar, theta_scale),
        predictive_marginal=LaplaceDist(post.ybar, math.sqrt((1.0 + 1.0 / n) * post.s2 / 2.0)),
        predictive_conditional=NormalDist(post.ybar, (1.0 + 1.0 / n) * sigma2),
        error_conditional=tuple(NormalDist(u, sigma2 / n) for u in post.residuals),
        error_marginal=tuple(LaplaceDist(u, theta_scale) for u in post.residuals),
        sigma2=sigma2,
    )


def positive_mean_density(post: MeanPosterior) -> ScaledExponentialDist:
    """Exponential density for a strictly positive ``theta`` with mean ``ybar``."""
    if not post.ybar > 0.0:
        raise PositivityError(f"sample mean must be > 0, got {post.ybar!r}")
    return ScaledExponentialDist(post.ybar)


def theta_interval(post: MeanPosterior, level: float = 0.95) -> IntervalEstimate:
    """Central Laplace interval for ``theta``; ``ybar +/- 2.1183 s/sqrt(n)`` at 95%."""
    return central_interval(LaplaceDist(post.ybar, math.sqrt(post.s2 / (2.0 * post.n))), level)


def analyze_mean(values: Sequence[float], level: float = 0.95, sigma2=None):
    """Convenience wrapper returning ``(posterior, maxent set, theta interval)``."""
    post = fit_mean(values)
    return post, mean_maxent(post, sigma2), theta_interval(post, level)
