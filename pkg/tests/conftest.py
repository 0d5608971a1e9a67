import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

warnings.filterwarnings("ignore", message=".*TBB.*")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_corr(rng, p, dof=None):
    """Random correlation matrix from a Wishart-like draw."""
    a = rng.standard_normal((dof or p + 2, p))
    c = a.T @ a
    d = np.sqrt(np.diag(c))
    return c / np.outer(d, d)


def oracle_kkt(S, theta, lam):
    """Independent KKT check for max log|T| - tr(ST) - lam * sum_{i!=j} |T_ij|."""
    W = np.linalg.inv(theta)
    G = S - W
    p = S.shape[0]
    worst = 0.0
    for i in range(p):
        for j in range(p):
            if i == j:
                worst = max(worst, abs(G[i, i]))
            elif abs(theta[i, j]) > 1e-10:
                worst = max(worst, abs(G[i, j] + lam * np.sign(theta[i, j])))
            else:
                worst = max(worst, max(0.0, abs(G[i, j]) - lam))
    return worst


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record a one-line acceptance verdict; all lines are echoed at session end."""

    def _report(number, title, passed, detail):
        line = f"[criterion {number}] {'PASS' if passed else 'FAIL'}: {title} -- {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
