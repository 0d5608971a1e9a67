import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import oracle_kkt, random_corr
from netcopula.mstep import (
    PenaltySpec, SolverInfo, glasso, kkt_residual, penalized_objective, penalty_weights,
    scad_derivative, scad_glasso, solve, weighted_glasso,
)
from netcopula.types import LatentMoments, PrecisionEstimate


def two_by_two(r):
    return np.array([[1.0, r], [r, 1.0]])


def dual_grid_search(r, lam, m=200_001):
    """The 2x2 dual: maximize log(1 - w^2) over |w - r| <= lam."""
    w = np.linspace(r - lam, r + lam, m)
    w = w[np.abs(w) < 1]
    return w[np.argmax(np.log1p(-w ** 2))]


@pytest.mark.parametrize("r,lam", [(0.6, 0.2), (-0.7, 0.35), (0.3, 0.05), (0.9, 0.89)])
def test_two_by_two_closed_form(r, lam):
    est = glasso(two_by_two(r), lam)
    s12 = np.sign(r) * (abs(r) - lam)
    expected = np.linalg.inv(two_by_two(s12))
    assert np.abs(est.theta - expected).max() <= 1e-8
    assert est.sigma[0, 1] == pytest.approx(dual_grid_search(r, lam), abs=2 * lam / 200_000)
    exact = PrecisionEstimate.from_theta(expected, lam)
    assert kkt_residual(two_by_two(r), exact, PenaltySpec("l1", lam)) <= 1e-10


def test_full_shrinkage_diagonal(rng):
    S = random_corr(rng, 6) * 0.9 + 0.1 * np.eye(6)
    S[np.diag_indices(6)] = rng.uniform(0.5, 2, 6)
    off = np.abs(S - np.diag(np.diag(S))).max()
    est = glasso(S, off * 1.01)
    assert est.n_edges == 0
    assert np.allclose(np.diag(est.theta), 1 / np.diag(S), atol=1e-14)
    assert kkt_residual(S, est, PenaltySpec("l1", off * 1.01)) <= 1e-12


def test_p4_kkt_against_oracle(rng):
    for _ in range(5):
        S = random_corr(rng, 4)
        est = glasso(S, 0.2)
        assert oracle_kkt(S, est.theta, 0.2) <= 1e-4
        est.check()


def test_kkt_detects_perturbation(rng):
    S = random_corr(rng, 5)
    est = glasso(S, 0.1)
    theta = est.theta.copy()
    theta[0, 1] += 0.01
    theta[1, 0] += 0.01
    pert = PrecisionEstimate.from_theta(theta, 0.1)
    assert kkt_residual(S, pert, PenaltySpec("l1", 0.1)) > 1e-3
    assert kkt_residual(S, est, PenaltySpec("l1", 0.1)) < 1e-6


@given(st.integers(0, 10_000), st.sampled_from([4, 10]), st.floats(0.02, 0.5))
def test_permutation_equivariance(seed, p, lam):
    rng = np.random.default_rng(seed)
    S = random_corr(rng, p)
    perm = rng.permutation(p)
    a = glasso(S, lam, tol=1e-12).theta
    b = glasso(S[np.ix_(perm, perm)], lam, tol=1e-12).theta
    assert np.abs(a[np.ix_(perm, perm)] - b).max() <= 1e-10


def test_objective_monotone_over_sweeps(rng):
    for p in (5, 12, 25):
        S = random_corr(rng, p, dof=p // 2 + 2)
        S = 0.95 * S + 0.05 * np.eye(p)
        info = SolverInfo()
        weighted_glasso(S, np.full((p, p), 0.05), info=info, track_objective=True)
        obj = np.array(info.objectives)
        assert obj.size >= 1
        assert np.all(np.diff(obj) >= -1e-10)


def test_warm_start_agrees_with_cold(rng):
    S = random_corr(rng, 10)
    cold = glasso(S, 0.1)
    warm = glasso(S, 0.1, theta_init=glasso(S, 0.3).theta)
    assert np.abs(cold.theta - warm.theta).max() < 1e-6


def test_support_monotone_in_lambda_statistically():
    rng = np.random.default_rng(1)
    viol = total = 0
    for _ in range(20):
        S = random_corr(rng, 10)
        edges = [glasso(S, lam).n_edges for lam in np.geomspace(0.6, 0.02, 8)]
        viol += int(np.sum(np.diff(edges) < 0))
        total += len(edges) - 1
    assert viol / total <= 0.05


def test_rejects_indefinite_input():
    with pytest.raises(ValueError):
        glasso(np.array([[1.0, 2.0], [2.0, 1.0]]), 0.1)
    with pytest.raises(ValueError):
        glasso(np.eye(3), 0.0)


def test_accepts_latent_moments():
    est = glasso(LatentMoments(two_by_two(0.5), "test"), 0.1)
    assert est.n_edges == 1


def test_scad_derivative_regimes():
    lam, a = 0.2, 3.7
    assert scad_derivative(0.1, lam, a) == pytest.approx(lam)
    assert scad_derivative(a * lam, lam, a) == pytest.approx(0.0)
    assert scad_derivative(1.0, lam, a) == 0.0
    mid = scad_derivative(0.4, lam, a)
    assert 0 < mid < lam


def test_scad_first_weights_equal_lambda(rng):
    S = random_corr(rng, 6)
    w = penalty_weights(np.zeros((6, 6)), PenaltySpec("scad", 0.3, 3.7))
    assert np.allclose(w[~np.eye(6, dtype=bool)], 0.3)
    one = scad_glasso(S, 0.3, max_iter=1)
    assert np.abs(one.theta - glasso(S, 0.3).theta).max() <= 1e-12


def test_scad_less_biased_than_l1():
    # strong edge 0-1 plus a weak one; compare to the unpenalized refit on the support
    theta = np.array([[1.0, 0.8, 0.0], [0.8, 1.5, 0.1], [0.0, 0.1, 1.0]])
    sigma = np.linalg.inv(theta)
    rng = np.random.default_rng(0)
    z = rng.multivariate_normal(np.zeros(3), sigma, size=5000)
    S = np.corrcoef(z.T)
    l1 = glasso(S, 0.15)
    scad = scad_glasso(S, 0.15, 3.7)
    support = scad.adjacency() | np.eye(3, dtype=bool)
    # unpenalized MLE on the support: weighted glasso with huge weights off support
    w = np.where(support, 0.0, 1e3)
    oracle = weighted_glasso(S, w)
    assert abs(scad.theta[0, 1] - oracle[0, 1]) < abs(l1.theta[0, 1] - oracle[0, 1])


def test_scad_kkt_at_solution(rng):
    S = random_corr(rng, 8)
    pen = PenaltySpec("scad", 0.1, 3.7)
    est = solve(S, pen)
    assert kkt_residual(S, est, pen) <= 1e-4
    assert np.isfinite(penalized_objective(S, est.theta, pen))


def test_penalty_spec_validation():
    with pytest.raises(ValueError):
        PenaltySpec("scad", 0.1, 1.5)
    with pytest.raises(ValueError):
        PenaltySpec("l2", 0.1)
