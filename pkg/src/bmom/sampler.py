"""Seeded Monte Carlo draws from the joint posterior and the predictive density.

Joint draws are composed in two stages: ``sigma^2`` from its exponential
density with mean ``s^2``, then ``beta`` from the conditional normal
``N(beta_hat, (X'X)^-1 sigma^2)`` at the drawn value. Predictive draws add a
third stage, ``y_f | sigma^2 ~ N(y_hat_f, (1 + x_f'(X'X)^-1 x_f) sigma^2)``;
marginally that is the Laplace predictive density.

Random numbers
--------------
Uniforms come from Philox4x32-10 (Salmon et al., 2011), a counter-based
generator: the 64-bit seed is the key, and the 128-bit counter is
``(draw index low word, draw index high word, block, stream)``. Each counter
block yields four 32-bit words which make two doubles
``u = ((w0 >> 6) * 2**26 + (w1 >> 6) + 0.5) * 2**-52`` in the open interval
``(0, 1)``. Streams are fixed: 0 for ``sigma^2``, 1 for the coefficient
normals, 2 for predictive noise. Draw ``i`` therefore depends only on
``(seed, i)``, so extending a run or splitting it across workers never
changes earlier values.

Normals are ``ndtri(u)``, the same quantile routine the densities use.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import special
from .densities import IntervalEstimate
from .errors import DomainError, InsufficientDataError, NumericalError

STREAM_SIGMA2 = 0
STREAM_BETA = 1
STREAM_PREDICTIVE = 2

_MASK32 = np.uint64(0xFFFFFFFF)
_PHILOX_M0 = np.uint64(0xD2511F53)
_PHILOX_M1 = np.uint64(0xCD9E8D57)
_PHILOX_W0 = 0x9E3779B9
_PHILOX_W1 = 0xBB67AE85
_SHIFT32 = np.uint64(32)


def philox4x32(counter, key, rounds=10):
    """Philox4x32 block function.

    Parameters
    ----------
    counter : array_like of uint32, shape (..., 4)
    key : pair of ints (each < 2**32)

    Returns
    -------
    ndarray of uint32, shape (..., 4)
    """
    c = np.asarray(counter, dtype=np.uint64)
    c0, c1, c2, c3 = (c[..., i].copy() for i in range(4))
    k0, k1 = int(key[0]) & 0xFFFFFFFF, int(key[1]) & 0xFFFFFFFF
    for r in range(rounds):
        p0 = _PHILOX_M0 * c0
        p1 = _PHILOX_M1 * c2
        hi0, lo0 = p0 >> _SHIFT32, p0 & _MASK32
        hi1, lo1 = p1 >> _SHIFT32, p1 & _MASK32
        c0 = hi1 ^ c1 ^ np.uint64(k0)
        c1 = lo1
        c2 = hi0 ^ c3 ^ np.uint64(k1)
        c3 = lo0
        k0 = (k0 + _PHILOX_W0) & 0xFFFFFFFF
        k1 = (k1 + _PHILOX_W1) & 0xFFFFFFFF
    return np.stack([c0, c1, c2, c3], axis=-1).astype(np.uint32)


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    return seed


def uniforms(seed, stream, start, count, width=1):
    """Open-interval uniforms for draws ``start .. start + count - 1``.

    Returns an array of shape ``(count, width)``; column ``c`` of draw ``i``
    comes from counter block ``c // 2``, slot ``c % 2``.
    """
    seed = _check_seed(seed)
    blocks = (width + 1) // 2
    idx = np.arange(start, start + count, dtype=np.uint64)
    ctr = np.empty((count, blocks, 4), dtype=np.uint64)
    ctr[..., 0] = (idx & _MASK32)[:, None]
    ctr[..., 1] = (idx >> _SHIFT32)[:, None]
    ctr[..., 2] = np.arange(blocks, dtype=np.uint64)[None, :]
    ctr[..., 3] = stream
    words = philox4x32(ctr, (seed & 0xFFFFFFFF, seed >> 32)).astype(np.float64)
    hi = np.floor(words[..., 0::2] / 64.0)
    lo = np.floor(words[..., 1::2] / 64.0)
    u = (hi * 67108864.0 + lo + 0.5) * 2.0 ** -52
    return u.reshape(count, 2 * blocks)[:, :width]


def sigma2_from_uniform(s2, u):
    """Inverse exponential cdf: ``-s2 * ln(u)``."""
    return -s2 * np.log(u)


@dataclass(frozen=True)
class DrawConfig:
    seed: int
    n_draws: int
    workers: int = 1

    def __post_init__(self):
        _check_seed(self.seed)
        if self.n_draws < 1:
            raise DomainError("n_draws must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")

    @classmethod
    def from_env(cls, n_draws, seed=None, env_var="BMOM_SEED", **kw):
        """Seed from the argument, else from ``$BMOM_SEED``, else an error."""
        if seed is None:
            raw = os.environ.get(env_var)
            if raw is None:
                raise DomainError(f"no seed given and ${env_var} is unset")
            try:
                seed = int(raw, 0)
            except ValueError:
                raise DomainError(f"${env_var} is not an integer: {raw!r}") from None
        return cls(seed, n_draws, **kw)


@dataclass(frozen=True)
class JointDraw:
    sigma2: float
    beta: np.ndarray


@dataclass(frozen=True, eq=False)
class JointDraws:
    """Column-oriented batch of joint draws; iterating yields :class:`JointDraw`."""

    sigma2: np.ndarray
    beta: np.ndarray

    def __len__(self):
        return self.sigma2.shape[0]

    def __iter__(self):
        for s, b in zip(self.sigma2, self.beta):
            yield JointDraw(float(s), b)

    def as_matrix(self):
        """``(n_draws, 1 + k)`` array with columns ``sigma2, beta_1 .. beta_k``."""
        return np.column_stack([self.sigma2, self.beta])


def _chunks(config):
    size = -(-config.n_draws // config.workers)
    return [(s, min(size, config.n_draws - s)) for s in range(0, config.n_draws, size)]


def _run(config, job):
    parts = _chunks(config)
    if config.workers == 1 or len(parts) == 1:
        results = [job(s, c) for s, c in parts]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda sc: job(*sc), parts))
    return results


def _cholesky(fit):
    try:
        return linalg.cholesky(fit.xtx_inv, lower=True)
    except linalg.LinAlgError as exc:
        raise NumericalError("(X'X)^-1 is not positive definite", {"k": fit.k}) from exc


def draw_joint(fit, config: DrawConfig) -> JointDraws:
    """Draws from the joint posterior of ``(beta, sigma^2)``."""
    if not fit.s2 > 0.0:
        raise DomainError("s2 must be > 0 to sample")
    chol = _cholesky(fit)
    k = fit.k

    def job(start, count):
        sig2 = sigma2_from_uniform(fit.s2, uniforms(config.seed, STREAM_SIGMA2, start, count)[:, 0])
        z = special.norm_ppf(uniforms(config.seed, STREAM_BETA, start, count, k))
        beta = fit.beta_hat + np.sqrt(sig2)[:, None] * (z @ chol.T)
        return sig2, beta

    parts = _run(config, job)
    return JointDraws(
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts], axis=0),
    )


def draw_predictive(fit, x_f, config: DrawConfig) -> np.ndarray:
    """Draws of a future observation at regressor vector ``x_f``.

    The predictive stage is the natural extension of the two-stage joint
    scheme: ``sigma^2`` first, then ``y_f`` from its conditional normal.
    """
    from .regression import predictive_point

    if not fit.s2 > 0.0:
        raise DomainError("s2 must be > 0 to sample")
    point = predictive_point(fit, x_f)

    def job(start, count):
        sig2 = sigma2_from_uniform(fit.s2, uniforms(config.seed, STREAM_SIGMA2, start, count)[:, 0])
        z = special.norm_ppf(uniforms(config.seed, STREAM_PREDICTIVE, start, count)[:, 0])
        return point.y_hat_f + np.sqrt(point.inflation * sig2) * z

    return np.concatenate(_run(config, job))


@dataclass(frozen=True, eq=False)
class DrawSummary:
    n: int
    mean: np.ndarray
    covariance: np.ndarray
    m2: np.ndarray
    m4: np.ndarray
    kurtosis: np.ndarray
    excess_kurtosis: np.ndarray
    intervals: dict = field(default_factory=dict)

    @property
    def std_error(self):
        return np.sqrt(np.diag(np.atleast_2d(self.covariance)) / self.n)


def summarize_draws(draws, levels=(0.95,)) -> DrawSummary:
    """Sample moments and equal-tail intervals of a batch of draws.

    ``draws`` is a 1-d array, a ``(n_draws, d)`` array, or :class:`JointDraws`
    (columns ``sigma2, beta...``). ``covariance`` uses the ``n - 1`` divisor;
    ``m2``/``m4`` are central moments with divisor ``n`` and ``kurtosis`` is
    ``m4 / m2**2``. Interval endpoints use type-7 (linear interpolation
    between order statistics) quantiles, mapping ``level`` to a list of
    per-column :class:`IntervalEstimate`.
    """
    if isinstance(draws, JointDraws):
        draws = draws.as_matrix()
    x = np.asarray(draws, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError("need at least 2 draws to summarize")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    sq = centered * centered
    m2 = sq.mean(axis=0)
    m4 = (sq * sq).mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        kurt = np.where(m2 > 0, m4 / (m2 * m2), np.nan)
    intervals = {}
    for level in levels:
        lo, hi = np.quantile(x, [0.5 - 0.5 * level, 0.5 + 0.5 * level], axis=0, method="linear")
        intervals[level] = [IntervalEstimate(level, float(a), float(b), "empirical") for a, b in zip(lo, hi)]
    return DrawSummary(n, mean, cov, m2, m4, kurt, kurt - 3.0, intervals)


def draws_to_csv(draws: JointDraws, names=None) -> str:
    """CSV text with header ``sigma2,beta_1..beta_k`` (or the given names)."""
    k = draws.beta.shape[1]
    header = ["sigma2"] + (list(names) if names else [f"beta_{j + 1}" for j in range(k)])
    lines = [",".join(header)]
    for row in draws.as_matrix():
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
