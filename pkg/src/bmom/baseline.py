"""Traditional diffuse-prior baseline and the side-by-side comparison.

With a normal likelihood and the diffuse prior ``p(theta, sigma) ~ 1/sigma``
the standardized mean ``(theta - ybar) / (s / sqrt(n))`` is Student-t with
``nu = n - 1`` degrees of freedom (``n - k`` for a regression coefficient).
This module provides its moments and intervals and sets them against the
Laplace (method-of-moments) and conditional-normal results.
"""

import math
from dataclasses import dataclass
from typing import Optional

from . import special
from .densities import IntervalEstimate, LaplaceDist, NormalDist, central_interval
from .errors import DomainError, MomentUndefinedError

#: excess kurtosis of every Laplace density
LAPLACE_EXCESS = 3.0


@dataclass(frozen=True)
class StudentPosterior:
    center: float
    scale: float
    nu: float

    def __post_init__(self):
        if not self.nu >= 1:
            raise DomainError(f"nu must be >= 1, got {self.nu!r}")
        if not self.scale > 0:
            raise DomainError(f"scale must be > 0, got {self.scale!r}")


@dataclass(frozen=True)
class TMoments:
    m2: float
    m4: Optional[float]
    excess: Optional[float]


def t_moments(nu: float, require_fourth: bool = True) -> TMoments:
    """Second and fourth moments and excess kurtosis of a standard Student-t.

    ``E z^2 = nu/(nu-2)`` needs ``nu > 2``; ``E z^4 = 3 nu^2 / ((nu-2)(nu-4))``
    and the excess ``6/(nu-4)`` need ``nu > 4``. With
    ``require_fourth=False`` the fourth-order entries are ``None`` instead of
    raising when ``2 < nu <= 4``.
    """
    if not nu > 2:
        raise MomentUndefinedError(f"second moment of Student-t needs nu > 2, got {nu}", "m2")
    m2 = nu / (nu - 2.0)
    if not nu > 4:
        if require_fourth:
            raise MomentUndefinedError(f"fourth moment of Student-t needs nu > 4, got {nu}", "m4")
        return TMoments(m2, None, None)
    m4 = 3.0 * nu * nu / ((nu - 2.0) * (nu - 4.0))
    excess = 6.0 / (nu - 4.0)
    # the closed-form excess must agree with the ratio definition
    assert abs(m4 / (m2 * m2) - 3.0 - excess) <= 1e-9 * max(1.0, excess)
    return TMoments(m2, m4, excess)


def t_excess(nu: float) -> float:
    return t_moments(nu).excess


def t_sigma2_mean(s2: float, nu: float) -> float:
    """Posterior mean of ``sigma^2`` under the diffuse prior: ``nu s^2 / (nu - 2)``."""
    if not nu > 2:
        raise MomentUndefinedError(f"E(sigma^2 | D) needs nu > 2, got {nu}", "sigma2_mean")
    if not s2 > 0:
        raise DomainError(f"s2 must be > 0, got {s2!r}")
    return nu * s2 / (nu - 2.0)


def t_interval(post: StudentPosterior, level: float = 0.95) -> IntervalEstimate:
    if not (0.0 < level < 1.0):
        raise DomainError(f"level must lie in (0, 1), got {level!r}")
    half = special.t_ppf(0.5 + 0.5 * level, post.nu) * post.scale
    return IntervalEstimate(level, post.center - half, post.center + half, "student_t")


@dataclass(frozen=True)
class ComparisonRow:
    """One posterior target (``theta`` or a coefficient) under the three analyses."""

    target: str
    posterior_mean: float
    bmom_variance: float
    traditional_variance: Optional[float]
    laplace: IntervalEstimate
    normal: IntervalEstimate
    student_t: IntervalEstimate

    @property
    def laplace_normal_width_ratio(self):
        return self.laplace.width / self.normal.width

    @property
    def t_normal_width_ratio(self):
        return self.student_t.width / self.normal.width


@dataclass(frozen=True)
class ComparisonReport:
    level: float
    nu: float
    s2: float
    traditional_sigma2_mean: Optional[float]
    bmom_excess: float
    t_excess: Optional[float]
    rows: tuple

    @property
    def bmom_sigma2_mean(self):
        return self.s2


def _row(target, center, var_scale2, nu, level):
    # var_scale2 is the conditional variance at sigma^2 = s^2 (s^2/n or s_i^2)
    scale = math.sqrt(var_scale2)
    trad = nu * var_scale2 / (nu - 2.0) if nu > 2 else None
    return ComparisonRow(
        target=target,
        posterior_mean=center,
        bmom_variance=var_scale2,
        traditional_variance=trad,
        laplace=central_interval(LaplaceDist(center, scale / math.sqrt(2.0)), level),
        normal=central_interval(NormalDist(center, var_scale2), level),
        student_t=t_interval(StudentPosterior(center, scale, nu), level),
    )


def compare_report(fit_or_post, level: float = 0.95) -> ComparisonReport:
    """Method-of-moments versus conditional-normal versus Student-t.

    Accepts a :class:`~bmom.mean_model.MeanPosterior` (one row, ``theta``,
    ``nu = n - 1``) or a :class:`~bmom.regression.LeastSquaresFit` (one row
    per coefficient, ``nu = n - k``). All three analyses share the posterior
    mean; they differ in spread and tail weight.
    """
    from .mean_model import MeanPosterior

    if isinstance(fit_or_post, MeanPosterior):
        post = fit_or_post
        nu = post.n - 1
        rows = (_row("theta", post.ybar, post.s2 / post.n, nu, level),)
        s2 = post.s2
    else:
        fit = fit_or_post
        nu = fit.dof
        s2 = fit.s2
        rows = tuple(
            _row(name, float(fit.beta_hat[j]), float(fit.xtx_inv[j, j]) * s2, nu, level)
            for j, name in enumerate(fit.names)
        )
    return ComparisonReport(
        level=level,
        nu=nu,
        s2=s2,
        traditional_sigma2_mean=t_sigma2_mean(s2, nu) if nu > 2 else None,
        bmom_excess=LAPLACE_EXCESS,
        t_excess=t_excess(nu) if nu > 4 else None,
        rows=rows,
    )
