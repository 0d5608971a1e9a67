"""First and second moments of a univariate truncated normal distribution.

All formulas are evaluated on the standardized interval ``(alpha, beta)``.
Intervals lying in one tail are handled through the scaled complementary
error function so that far-tail intervals (where Phi(beta) - Phi(alpha)
underflows) keep full precision; very narrow intervals use a local
exponential-tilt expansion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx, ndtr

_SQRT_HALF_PI = np.sqrt(np.pi / 2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
_NARROW = 1e-5


@dataclass(frozen=True)
class TruncMoment:
    mean: float
    second: float

    @property
    def variance(self) -> float:
        return self.second - self.mean ** 2


def _mills_lower(x):
    """Phi(x) / phi(x) for x <= 0, finite down to -inf (where it is 0)."""
    return _SQRT_HALF_PI * erfcx(-x / np.sqrt(2.0))


def standard_moments(alpha, beta):
    """E[X] and E[X^2] for X ~ N(0, 1) truncated to (alpha, beta]; arrays broadcast."""
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    alpha = alpha.astype(float).copy()
    beta = beta.astype(float).copy()
    m1 = np.zeros(alpha.shape)
    m2 = np.ones(alpha.shape)

    # reflect so that the interval's centre is <= 0
    with np.errstate(invalid="ignore"):
        centre = alpha + beta
    flip = centre > 0
    alpha[flip], beta[flip] = -beta[flip], -alpha[flip]

    full = np.isneginf(alpha) & np.isposinf(beta)
    width = beta - alpha
    narrow = ~full & (width < _NARROW)
    tail = ~full & ~narrow & (beta <= 0)
    straddle = ~full & ~narrow & ~tail

    if narrow.any():
        c = 0.5 * (alpha[narrow] + beta[narrow])
        w2 = width[narrow] ** 2
        m1[narrow] = c - c * w2 / 12.0
        m2[narrow] = c * c - c * c * w2 / 6.0 + w2 / 12.0

    if tail.any():
        a, b = alpha[tail], beta[tail]
        lo_inf = np.isneginf(a)
        a_f = np.where(lo_inf, b - 1.0, a)  # placeholder where a = -inf
        em1 = np.expm1(-0.5 * (a_f - b) * (a_f + b))
        em1 = np.where(lo_inf, -1.0, em1)
        eps = em1 + 1.0
        denom = _mills_lower(b) - np.where(lo_inf, 0.0, eps * _mills_lower(a_f))
        num2 = np.where(lo_inf, -b, (a_f - b) + a_f * em1)
        m1[tail] = em1 / denom
        m2[tail] = 1.0 + num2 / denom

    if straddle.any():
        a, b = alpha[straddle], beta[straddle]
        d = ndtr(b) - ndtr(a)
        a_f = np.where(np.isinf(a), 0.0, a)
        b_f = np.where(np.isinf(b), 0.0, b)
        pa = np.where(np.isinf(a), 0.0, _INV_SQRT_2PI * np.exp(-0.5 * a_f * a_f))
        pb = np.where(np.isinf(b), 0.0, _INV_SQRT_2PI * np.exp(-0.5 * b_f * b_f))
        apa = a_f * pa
        bpb = b_f * pb
        m1[straddle] = (pa - pb) / d
        m2[straddle] = 1.0 + (apa - bpb) / d

    m1[flip] = -m1[flip]
    return m1, m2


def trunc_moments_array(mu, sigma2, a, b):
    """Vectorized truncated-normal moments; returns ``(mean, second)`` arrays."""
    mu = np.asarray(mu, float)
    sigma = np.sqrt(np.asarray(sigma2, float))
    with np.errstate(invalid="ignore"):
        alpha = (np.asarray(a, float) - mu) / sigma
        beta = (np.asarray(b, float) - mu) / sigma
    m1, m2 = standard_moments(alpha, beta)
    mean = mu + sigma * m1
    second = mu * mu + 2.0 * mu * sigma * m1 + sigma * sigma * m2
    return mean, second


def trunc_normal_moments(mu: float, sigma2: float, a: float, b: float) -> TruncMoment:
    """Moments of N(mu, sigma2) conditioned on a < Z <= b.

    Parameters
    ----------
    mu, sigma2 : float
        Mean and (positive) variance of the untruncated normal.
    a, b : float
        Interval endpoints; either may be infinite.

    Returns
    -------
    TruncMoment
        ``mean`` = E[Z | a < Z <= b] and ``second`` = E[Z^2 | a < Z <= b].
    """
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    if not a < b:
        raise ValueError(f"empty interval: a={a} >= b={b}")
    mean, second = trunc_moments_array(mu, sigma2, a, b)
    return TruncMoment(float(mean), float(second))
