"""First-order (mean-field) approximation of the latent second moments."""
from __future__ import annotations

import numpy as np

from ..marginals import LatentBounds, latent_bounds
from ..types import LatentMoments, psd_repair
from .truncnorm import standard_moments, trunc_moments_array


def _theta_array(theta):
    return np.asarray(getattr(theta, "theta", theta), dtype=float)


def marginal_means(bounds: LatentBounds) -> np.ndarray:
    """Cellwise truncated means under independent standard normals."""
    lo = np.where(bounds.fixed, -np.inf, bounds.lower)
    hi = np.where(bounds.fixed, np.inf, bounds.upper)
    m1, _ = standard_moments(lo, hi)
    return np.where(bounds.fixed, bounds.lower, m1)


def conditional_params(z: np.ndarray, theta: np.ndarray):
    """Conditional means and variances of each coordinate given surrogates of the rest.

    Uses the precision parametrization: mu_ij = -sum_{k != j} theta_jk z_ik / theta_jj
    and sigma2_j = 1 / theta_jj, which equal the Schur-complement forms in Sigma.
    """
    d = np.diag(theta)
    if np.any(d <= 0):
        raise np.linalg.LinAlgError(f"non-positive precision diagonal at {int(np.argmin(d))}")
    B = -theta / d[:, None]
    np.fill_diagonal(B, 0.0)
    return z @ B.T, 1.0 / d


def approx_moments(bounds: LatentBounds, theta, normalize=True) -> LatentMoments:
    theta = _theta_array(theta)
    n, p = bounds.shape
    z0 = marginal_means(bounds)
    mu, sigma2 = conditional_params(z0, theta)
    lo = np.where(bounds.fixed, -np.inf, bounds.lower)
    hi = np.where(bounds.fixed, np.inf, bounds.upper)
    e1, e2 = trunc_moments_array(mu, np.broadcast_to(sigma2, mu.shape), lo, hi)
    e1 = np.where(bounds.fixed, bounds.lower, e1)
    e2 = np.where(bounds.fixed, bounds.lower ** 2, e2)
    rbar = e1.T @ e1 / n
    np.fill_diagonal(rbar, e2.mean(axis=0))
    rbar = 0.5 * (rbar + rbar.T)
    if normalize:
        rbar = psd_repair(rbar)
    return LatentMoments(rbar, "approx")


def approx_expectation(data, cutpoints, theta_star, bounds=None) -> LatentMoments:
    """Approximate E-step over an ObservedMatrix with fixed cutpoints."""
    if bounds is None:
        bounds = latent_bounds(data, cutpoints)
    return approx_moments(bounds, theta_star)
