"""Monte Carlo E-step: per-observation Gibbs chains over the latent vector."""
from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from ..marginals import LatentBounds, latent_bounds
from ..parallel import set_threads
from ..types import LatentMoments, psd_repair
from .approx import _theta_array, marginal_means

DEFAULT_SAMPLES = 1000
DEFAULT_BURNIN = 100
# Observations per reduction block; fixed so the summation order never
# depends on the thread count.
_CHUNK = 8

_SQRT2 = math.sqrt(2.0)

# Acklam's rational approximation to the normal quantile function.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


@njit(cache=True)
def ndtr(x):
    return 0.5 * math.erfc(-x / _SQRT2)


@njit(cache=True)
def ndtri(u):
    if u <= 0.0:
        return -np.inf
    if u >= 1.0:
        return np.inf
    if u < 0.02425:
        q = math.sqrt(-2.0 * math.log(u))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    elif u > 1.0 - 0.02425:
        q = math.sqrt(-2.0 * math.log1p(-u))
        x = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    else:
        q = u - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    # one Halley step
    e = ndtr(x) - u
    g = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - g / (1.0 + 0.5 * x * g)


@njit(cache=True)
def _upper_tail(a, b):
    # Exponential-proposal rejection sampler for N(0,1) on (a, b], a >= 5.
    span = b - a
    cap = 1.0 - math.exp(-a * span) if span < np.inf else 1.0
    while True:
        e = -math.log1p(-np.random.random() * cap) / a
        if np.random.random() < math.exp(-0.5 * e * e):
            return a + e


@njit(cache=True)
def rtnorm(a, b):
    """One draw from N(0, 1) truncated to (a, b]."""
    if a == -np.inf and b == np.inf:
        return np.random.normal()
    if a >= 5.0:
        return _upper_tail(a, b)
    if b <= -5.0:
        return -_upper_tail(-b, -a)
    flip = a > 0.0
    if flip:
        a, b = -b, -a
    pa = ndtr(a) if a > -np.inf else 0.0
    pb = ndtr(b) if b < np.inf else 1.0
    while True:
        x = ndtri(pa + (pb - pa) * np.random.random())
        if np.isfinite(x):
            break
    if x < a:
        x = a
    elif x > b:
        x = b
    return -x if flip else x


@njit(cache=True)
def _seeded_draws(seed, a, b, size):
    np.random.seed(seed)
    out = np.empty(size)
    for i in range(size):
        out[i] = rtnorm(a, b)
    return out


@njit(parallel=True, cache=True)
def _gibbs_kernel(lower, upper, fixed, z0, B, sd, samples, burnin, seeds, chunk):
    n, p = lower.shape
    nchunks = (n + chunk - 1) // chunk
    blocks = np.zeros((nchunks, p, p))
    for c in prange(nchunks):
        z = np.empty(p)
        local = np.empty((p, p))
        for i in range(c * chunk, min(n, (c + 1) * chunk)):
            np.random.seed(seeds[i])
            for j in range(p):
                z[j] = z0[i, j]
            local[:, :] = 0.0
            for it in range(burnin + samples):
                for j in range(p):
                    if fixed[i, j]:
                        continue
                    mu = 0.0
                    for k in range(p):
                        mu += B[j, k] * z[k]
                    s = sd[j]
                    z[j] = mu + s * rtnorm((lower[i, j] - mu) / s, (upper[i, j] - mu) / s)
                if it >= burnin:
                    for a in range(p):
                        za = z[a]
                        for b in range(a, p):
                            local[a, b] += za * z[b]
            for a in range(p):
                for b in range(a, p):
                    blocks[c, a, b] += local[a, b] / samples
    total = np.zeros((p, p))
    for c in range(nchunks):
        for a in range(p):
            for b in range(a, p):
                total[a, b] += blocks[c, a, b]
    for a in range(p):
        for b in range(a, p):
            total[a, b] /= n
            total[b, a] = total[a, b]
    return total


def observation_seeds(seed: int, n: int) -> np.ndarray:
    """Per-observation RNG seeds derived deterministically from (seed, i)."""
    return np.random.SeedSequence(int(seed)).generate_state(n, dtype=np.uint32).astype(np.int64)


def gibbs_moments(
    bounds: LatentBounds,
    theta,
    samples=DEFAULT_SAMPLES,
    burnin=DEFAULT_BURNIN,
    seed=0,
    ncores=1,
    normalize=True,
) -> LatentMoments:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    theta = _theta_array(theta)
    d = np.diag(theta)
    B = -theta / d[:, None]
    np.fill_diagonal(B, 0.0)
    sd = 1.0 / np.sqrt(d)
    n, _ = bounds.shape
    z0 = marginal_means(bounds)
    set_threads(ncores)
    rbar = _gibbs_kernel(
        np.ascontiguousarray(bounds.lower), np.ascontiguousarray(bounds.upper),
        np.ascontiguousarray(bounds.fixed), z0, B, sd, int(samples), int(burnin),
        observation_seeds(seed, n), _CHUNK,
    )
    if normalize:
        rbar = psd_repair(rbar)
    return LatentMoments(rbar, "gibbs")


def gibbs_expectation(data, cutpoints, theta_star, samples=DEFAULT_SAMPLES, burnin=DEFAULT_BURNIN,
                      seed=0, ncores=1, bounds=None) -> LatentMoments:
    """Gibbs E-step over an ObservedMatrix; deterministic given ``seed``."""
    if bounds is None:
        bounds = latent_bounds(data, cutpoints)
    return gibbs_moments(bounds, theta_star, samples, burnin, seed, ncores)
