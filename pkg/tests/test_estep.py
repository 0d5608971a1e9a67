import numpy as np
import pytest

from netcopula.estep import approx_expectation, approx_moments, gibbs_expectation, gibbs_moments
from netcopula.estep.approx import conditional_params
from netcopula.marginals import LatentBounds, estimate_cutpoints, latent_bounds, normal_scores
from netcopula.types import CONTINUOUS, ObservedMatrix


def missing_bounds(n, p):
    return LatentBounds(np.full((n, p), -np.inf), np.full((n, p), np.inf), np.zeros((n, p), bool))


def binary_pair(n, rho, seed):
    rng = np.random.default_rng(seed)
    z = rng.multivariate_normal([0, 0], [[1, rho], [rho, 1]], size=n)
    return ObservedMatrix.from_array((z > 0).astype(float))


def test_conditional_params_match_schur_complement(rng):
    a = rng.standard_normal((6, 4))
    sigma = a.T @ a / 6 + np.eye(4)
    theta = np.linalg.inv(sigma)
    z = rng.standard_normal((3, 4))
    mu, s2 = conditional_params(z, theta)
    for j in range(4):
        rest = [k for k in range(4) if k != j]
        coef = sigma[j, rest] @ np.linalg.inv(sigma[np.ix_(rest, rest)])
        assert np.allclose(mu[:, j], z[:, rest] @ coef)
        schur = sigma[j, j] - coef @ sigma[rest, j]
        assert s2[j] == pytest.approx(schur)


def test_approx_all_missing_identity():
    r = approx_moments(missing_bounds(20, 4), np.eye(4)).rbar
    assert np.allclose(r, np.eye(4), atol=1e-15)


def test_approx_balanced_binary_diagonal_is_one():
    d = ObservedMatrix.from_array(np.array([[0, 0], [1, 1], [0, 1], [1, 0]], float))
    b = latent_bounds(d, estimate_cutpoints(d))
    r = approx_moments(b, np.eye(2), normalize=False).rbar
    assert np.allclose(np.diag(r), 1.0, atol=1e-14)


def test_approx_and_gibbs_binary_pair_attenuated():
    d = binary_pair(400, 0.5, 3)
    cp = estimate_cutpoints(d)
    theta = np.linalg.inv(np.array([[1, 0.5], [0.5, 1]]))
    ra = approx_expectation(d, cp, theta).rbar[0, 1]
    rg = gibbs_expectation(d, cp, theta, samples=2500, burnin=200, seed=1).rbar[0, 1]
    assert 0 < ra < 0.5 and 0 < rg < 0.5
    assert abs(ra - rg) <= 0.1


def test_gibbs_all_missing_identity():
    r = gibbs_moments(missing_bounds(50, 3), np.eye(3), samples=2000, burnin=100, seed=4,
                      normalize=False).rbar
    assert np.abs(r - np.eye(3)).max() <= 0.05


def test_gibbs_single_binary_observation():
    b = LatentBounds(np.array([[0.0]]), np.array([[np.inf]]), np.array([[False]]))
    r = gibbs_moments(b, np.eye(1), samples=40_000, burnin=100, seed=2, normalize=False).rbar
    # E[Z^2 | Z > 0] = 1; MC sd of the mean of Z^2 is sqrt(2 / samples)
    assert r[0, 0] == pytest.approx(1.0, abs=4 * np.sqrt(2 / 40_000))


def test_gibbs_determinism():
    d = binary_pair(60, 0.4, 0)
    cp = estimate_cutpoints(d)
    theta = np.linalg.inv(np.array([[1, 0.4], [0.4, 1]]))
    a = gibbs_expectation(d, cp, theta, samples=200, burnin=10, seed=7).rbar
    b = gibbs_expectation(d, cp, theta, samples=200, burnin=10, seed=7).rbar
    c = gibbs_expectation(d, cp, theta, samples=200, burnin=10, seed=8).rbar
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_continuous_data_reduce_to_score_correlation(rng):
    x = rng.standard_normal((80, 3)) @ np.array([[1, 0.5, 0], [0, 1, 0.3], [0, 0, 1]])
    d = ObservedMatrix.from_array(x, CONTINUOUS)
    cp = estimate_cutpoints(d)
    s = np.column_stack([normal_scores(x[:, j]) for j in range(3)])
    emp = s.T @ s / 80
    emp = emp / np.sqrt(np.outer(np.diag(emp), np.diag(emp)))
    theta = np.linalg.inv(emp)
    assert np.allclose(approx_expectation(d, cp, theta).rbar, emp, atol=1e-12)
    assert np.allclose(gibbs_expectation(d, cp, theta, samples=5, burnin=0).rbar, emp, atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_approx_gibbs_agree_small_p(seed):
    rng = np.random.default_rng(seed)
    p = 4
    theta = np.eye(p)
    for j in range(p - 1):
        theta[j, j + 1] = theta[j + 1, j] = -0.4
    sigma = np.linalg.inv(theta)
    s = np.sqrt(np.diag(sigma))
    sigma = sigma / np.outer(s, s)
    z = rng.multivariate_normal(np.zeros(p), sigma, size=250)
    d = ObservedMatrix.from_array((z > 0).astype(float))
    cp = estimate_cutpoints(d)
    th = np.linalg.inv(sigma)
    ra = approx_expectation(d, cp, th)
    rg = gibbs_expectation(d, cp, th, samples=1000, burnin=100, seed=seed)
    ra.check()
    rg.check()
    assert np.abs(ra.rbar - rg.rbar).max() <= 0.1


def test_missing_cells_handled():
    d = binary_pair(100, 0.5, 5)
    x = np.array(d.values)
    x[::7, 0] = np.nan
    d = ObservedMatrix.from_array(x)
    cp = estimate_cutpoints(d)
    theta = np.linalg.inv(np.array([[1, 0.5], [0.5, 1]]))
    approx_expectation(d, cp, theta).check()
    gibbs_expectation(d, cp, theta, samples=100, burnin=10).check()
