"""Maximum-entropy density families: normal, Laplace and scaled exponential.

All three are immutable value objects. Methods accept scalars or arrays; the
module-level functions (``laplace_eval``, ``normal_eval`` ...) are scalar
conveniences returning ``(pdf, cdf)`` pairs.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import special
from .errors import DegenerateSpreadError, DomainError, NumericalError

#: requested quadrature tolerance for the normal/exponential mixture integral
MIXTURE_TOL = 1e-9
#: the mixture integral over sigma^2 is truncated at this multiple of s^2;
#: the exponential mass beyond it is exp(-32) ~ 1.3e-14
MIXTURE_UPPER_MULTIPLE = 32.0


class Evaluation(NamedTuple):
    pdf: float
    cdf: float


def _check_positive(value, name):
    if not (math.isfinite(value) and value > 0.0):
        raise DegenerateSpreadError(f"{name} must be finite and > 0, got {value!r}")


def _check_level(level):
    if not (0.0 < level < 1.0):
        raise DomainError(f"level must lie in (0, 1), got {level!r}")


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class NormalDist:
    mean: float
    variance: float

    def __post_init__(self):
        _check_positive(self.variance, "variance")

    @property
    def std(self):
        return math.sqrt(self.variance)

    def logpdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.std
        return _scalar(special.norm_logpdf(z) - math.log(self.std))

    def pdf(self, x):
        return _scalar(np.exp(self.logpdf(x)))

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.std
        return _scalar(special.norm_cdf(z))

    def ppf(self, p):
        return _scalar(self.mean + self.std * special.norm_ppf(p))


@dataclass(frozen=True)
class LaplaceDist:
    """Double-exponential density ``exp(-|x - location| / scale) / (2 scale)``."""

    location: float
    scale: float

    def __post_init__(self):
        _check_positive(self.scale, "scale")

    @property
    def mean(self):
        return self.location

    @property
    def variance(self):
        return 2.0 * self.scale * self.scale

    @property
    def std(self):
        return math.sqrt(2.0) * self.scale

    def logpdf(self, x):
        d = np.abs(np.asarray(x, dtype=float) - self.location)
        return _scalar(-d / self.scale - math.log(2.0 * self.scale))

    def pdf(self, x):
        return _scalar(np.exp(self.logpdf(x)))

    def cdf(self, x):
        u = (np.asarray(x, dtype=float) - self.location) / self.scale
        # exp of a non-positive argument only, on either branch
        half_tail = 0.5 * np.exp(-np.abs(u))
        return _scalar(np.where(u <= 0.0, half_tail, 1.0 - half_tail))

    def sf(self, x):
        u = (np.asarray(x, dtype=float) - self.location) / self.scale
        half_tail = 0.5 * np.exp(-np.abs(u))
        return _scalar(np.where(u >= 0.0, half_tail, 1.0 - half_tail))

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(~((p > 0.0) & (p < 1.0))):
            raise DomainError("Laplace quantile requires 0 < p < 1")
        lower = self.location + self.scale * np.log(2.0 * np.minimum(p, 0.5))
        upper = self.location - self.scale * np.log(2.0 * (1.0 - np.maximum(p, 0.5)))
        return _scalar(np.where(p <= 0.5, lower, upper))

    def central_moment(self, order):
        """``E(x - location)^order``: ``order! * scale**order`` when even, else 0."""
        if order < 0:
            raise DomainError("moment order must be >= 0")
        if order % 2:
            return 0.0
        return math.factorial(order) * self.scale ** order

    @property
    def kurtosis(self):
        return self.central_moment(4) / self.central_moment(2) ** 2


@dataclass(frozen=True)
class ScaledExponentialDist:
    """Exponential density ``exp(-x / mean) / mean`` on ``[0, inf)``."""

    mean: float

    def __post_init__(self):
        _check_positive(self.mean, "mean")

    @property
    def variance(self):
        return self.mean * self.mean

    @property
    def std(self):
        return self.mean

    def _support(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0):
            raise DomainError("exponential density is supported on x >= 0")
        return x

    def logpdf(self, x):
        return _scalar(-self._support(x) / self.mean - math.log(self.mean))

    def pdf(self, x):
        return _scalar(np.exp(self.logpdf(x)))

    def cdf(self, x):
        return _scalar(-np.expm1(-self._support(x) / self.mean))

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(~((p > 0.0) & (p < 1.0))):
            raise DomainError("exponential quantile requires 0 < p < 1")
        return _scalar(-self.mean * np.log1p(-p))


@dataclass(frozen=True)
class IntervalEstimate:
    level: float
    lower: float
    upper: float
    method: str

    def __post_init__(self):
        _check_level(self.level)
        if not self.lower <= self.upper:
            raise DomainError("interval lower bound exceeds upper bound")

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def midpoint(self):
        return 0.5 * (self.lower + self.upper)


def laplace_eval(d: LaplaceDist, x: float) -> Evaluation:
    return Evaluation(d.pdf(x), d.cdf(x))


def laplace_quantile(d: LaplaceDist, p: float) -> float:
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    return d.ppf(p)


def laplace_even_moment(r: int) -> float:
    """Moment of order ``2r`` of the standardized density ``exp(-2|w|)``.

    Equals ``(2r)! / 2**(2r)``; odd moments vanish by symmetry.
    """
    if r < 0:
        raise DomainError("r must be >= 0")
    return math.factorial(2 * r) / 4.0 ** r


def exp_scale_eval(d: ScaledExponentialDist, x: float) -> Evaluation:
    if x < 0:
        raise DomainError("exponential density is supported on x >= 0")
    return Evaluation(d.pdf(x), d.cdf(x))


def normal_eval(d: NormalDist, x: float) -> Evaluation:
    return Evaluation(d.pdf(x), d.cdf(x))


def laplace_from_mean_var(mean: float, variance: float) -> LaplaceDist:
    """Laplace density with the given mean and variance (``scale = sqrt(variance / 2)``)."""
    if not (math.isfinite(variance) and variance > 0.0):
        raise DegenerateSpreadError(f"variance must be > 0, got {variance!r}")
    return LaplaceDist(mean, math.sqrt(0.5 * variance))


def central_interval(d, level: float) -> IntervalEstimate:
    """Equal-tail interval ``[Q((1 - level)/2), Q((1 + level)/2)]``.

    For the Laplace family the half-width is ``scale * ln(1 / (1 - level))``,
    computed with ``log1p`` so tiny levels collapse smoothly onto the location.
    """
    _check_level(level)
    if isinstance(d, LaplaceDist):
        half = -d.scale * math.log1p(-level)
        return IntervalEstimate(level, d.location - half, d.location + half, "laplace")
    if isinstance(d, NormalDist):
        half = d.std * float(special.norm_ppf(0.5 + 0.5 * level))
        return IntervalEstimate(level, d.mean - half, d.mean + half, "normal")
    raise TypeError(f"central_interval needs a symmetric family, got {type(d).__name__}")


def mixture_pdf(theta, n, s2, ybar=0.0):
    """Numerically integrate ``g_N(theta | sigma2) * g_e(sigma2)`` over ``sigma2 > 0``.

    ``g_N`` is normal with mean ``ybar`` and variance ``sigma2 / n``; ``g_e`` is
    exponential with mean ``s2``. With ``a = 1/s2`` and
    ``b = n (theta - ybar)^2 / 2`` the integrand is
    ``sqrt(n / 2pi) * a * sigma^-1 * exp(-b / sigma^2 - a sigma^2)``.
    Substituting ``sigma^2 = t^2`` removes the ``sigma^-1`` singularity at the
    origin, leaving ``2 sqrt(n / 2pi) a exp(-b/t^2 - a t^2)`` on
    ``[0, sqrt(U)]`` with ``U = 32 s2``.
    """
    if not (n >= 1):
        raise DomainError("n must be >= 1")
    _check_positive(s2, "s2")
    a = 1.0 / s2
    b = 0.5 * n * (theta - ybar) ** 2
    coef = 2.0 * math.sqrt(n / (2.0 * math.pi)) * a
    upper = math.sqrt(MIXTURE_UPPER_MULTIPLE * s2)
    peak = (b / a) ** 0.25
    points = [peak] if 0.0 < peak < upper else None

    def integrand(t):
        if t == 0.0:
            return coef if b == 0.0 else 0.0
        return coef * math.exp(-b / (t * t) - a * t * t)

    value, abserr, info, *rest = integrate.quad(
        integrand, 0.0, upper, points=points,
        epsabs=1e-12, epsrel=MIXTURE_TOL, limit=200, full_output=1,
    )
    ier = 0 if not rest else 1
    if ier or abserr > MIXTURE_TOL * max(1.0, abs(value)):
        raise NumericalError(
            "mixture quadrature did not converge",
            {"theta": theta, "n": n, "s2": s2, "abserr": abserr,
             "neval": info.get("neval"), "message": rest[0] if rest else ""},
        )
    return value


def mixture_check(n: int, s2: float, grid, ybar: float = 0.0) -> float:
    """Largest absolute gap between the numeric mixture and the closed-form Laplace.

    The closed form is ``LaplaceDist(ybar, sqrt(s2 / (2 n)))``.
    """
    _check_positive(s2, "s2")
    closed = LaplaceDist(ybar, math.sqrt(s2 / (2.0 * n)))
    worst = 0.0
    for theta in grid:
        theta = float(theta)
        if not math.isfinite(theta):
            raise DomainError("grid values must be finite")
        worst = max(worst, abs(mixture_pdf(theta, n, s2, ybar) - closed.pdf(theta)))
    return worst
