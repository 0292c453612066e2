"""Special functions: normal cdf/quantile, regularized incomplete beta, Student-t.

Normal cdf and quantile are the Cephes ``ndtr``/``ndtri`` routines as shipped
in :mod:`scipy.special`. ``ndtr`` evaluates ``erfc`` through Cephes' rational
approximations (absolute error below 1e-15 over the real line); ``ndtri`` is
the Cephes inverse built from three rational segments. Both are used for
every normal evaluation in the package, including the sampler, so draws and
densities share one path.

The Student-t functions do not call scipy: the cdf is written in terms of the
regularized incomplete beta function, which is evaluated with the modified
Lentz continued fraction (Numerical Recipes ``betacf``), and the quantile is
a bracketed bisection/Newton hybrid.
"""

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError, NumericalError

_BETACF_MAXITER = 20000
_BETACF_EPS = 1e-16
_TINY = 1e-300


def norm_cdf(x):
    """Standard normal cdf (Cephes ``ndtr``)."""
    return _sp.ndtr(x)


def norm_sf(x):
    return _sp.ndtr(-np.asarray(x, dtype=float))


def norm_logpdf(x):
    x = np.asarray(x, dtype=float)
    return -0.5 * x * x - 0.5 * math.log(2.0 * math.pi)


def norm_ppf(p):
    """Standard normal quantile (Cephes ``ndtri``).

    Values of ``p`` outside the open unit interval raise :class:`DomainError`
    instead of returning infinities.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("normal quantile requires 0 < p < 1")
    return _sp.ndtri(arr)


def _betacf(a, b, x):
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise NumericalError(
        "incomplete beta continued fraction did not converge",
        {"a": a, "b": b, "x": x, "iterations": _BETACF_MAXITER},
    )


def betainc(a, b, x, xc=None):
    """Regularized incomplete beta function ``I_x(a, b)``.

    Parameters
    ----------
    a, b : float
        Positive shape parameters.
    x : float
        Upper limit in ``[0, 1]``.
    xc : float, optional
        ``1 - x`` computed by the caller without cancellation. Supplying it
        matters when ``x`` is within a few ulps of 1.
    """
    if a <= 0 or b <= 0:
        raise DomainError("incomplete beta requires a > 0 and b > 0")
    if xc is None:
        xc = 1.0 - x
    if not (0.0 <= x <= 1.0):
        raise DomainError("incomplete beta requires 0 <= x <= 1")
    if x == 0.0:
        return 0.0
    if xc == 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(xc)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, xc) / b


def t_logpdf(t, nu):
    return (
        math.lgamma(0.5 * (nu + 1.0)) - math.lgamma(0.5 * nu)
        - 0.5 * math.log(nu * math.pi)
        - 0.5 * (nu + 1.0) * math.log1p(t * t / nu)
    )


def t_pdf(t, nu):
    return math.exp(t_logpdf(t, nu))


def t_cdf(t, nu):
    """Student-t cdf with ``nu`` degrees of freedom (any real ``nu > 0``)."""
    if nu <= 0:
        raise DomainError("Student-t requires nu > 0")
    if t == 0.0:
        return 0.5
    t2 = t * t
    # tail = Pr(T > |t|) = I_{nu/(nu+t^2)}(nu/2, 1/2) / 2
    x = nu / (nu + t2)
    xc = t2 / (nu + t2)
    tail = 0.5 * betainc(0.5 * nu, 0.5, x, xc)
    return 1.0 - tail if t > 0 else tail


def t_ppf(p, nu, tol=1e-12):
    """Student-t quantile by bracketed Newton iteration.

    The root of ``t_cdf(t) - p`` is bracketed on ``[0, hi]`` (by symmetry only
    the upper half is searched), Newton steps use the density, and any step
    leaving the bracket is replaced by bisection.
    """
    if not (0.0 < p < 1.0):
        raise DomainError("Student-t quantile requires 0 < p < 1")
    if nu <= 0:
        raise DomainError("Student-t requires nu > 0")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_ppf(1.0 - p, nu, tol)
    lo, hi = 0.0, 1.0
    while t_cdf(hi, nu) < p:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NumericalError("Student-t quantile bracket overflow", {"p": p, "nu": nu})
    t = 0.5 * (lo + hi)
    for _ in range(200):
        f = t_cdf(t, nu) - p
        if f == 0.0:
            return t
        if f > 0:
            hi = t
        else:
            lo = t
        dens = t_pdf(t, nu)
        step = f / dens if dens > 0 else math.inf
        t_new = t - step
        if lo < t_new < hi:
            if abs(step) <= tol * max(1.0, abs(t)):
                return t_new
        else:
            t_new = 0.5 * (lo + hi)
            if hi - lo <= tol * max(1.0, abs(t)):
                return t_new
        t = t_new
    raise NumericalError("Student-t quantile did not converge", {"p": p, "nu": nu})
