import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from netcopula.estep.truncnorm import standard_moments, trunc_moments_array, trunc_normal_moments

mpmath.mp.dps = 40


def oracle(mu, s2, a, b):
    """Mean and second moment by quadrature of the truncated normal density."""
    mu, s = mpmath.mpf(mu), mpmath.sqrt(mpmath.mpf(s2))
    lo = mpmath.mpf(a) if np.isfinite(a) else -mpmath.inf
    hi = mpmath.mpf(b) if np.isfinite(b) else mpmath.inf
    dens = lambda x: mpmath.exp(-((x - mu) / s) ** 2 / 2)
    # split at the mode so quadrature resolves narrow tails
    pts = [lo] + ([mu] if lo < mu < hi else []) + [hi]
    z = mpmath.quad(dens, pts)
    m1 = mpmath.quad(lambda x: x * dens(x), pts) / z
    m2 = mpmath.quad(lambda x: x * x * dens(x), pts) / z
    return float(m1), float(m2)


def test_untruncated():
    m = trunc_normal_moments(0, 1, -np.inf, np.inf)
    assert m.mean == 0 and m.second == 1


def test_half_line():
    m = trunc_normal_moments(0, 1, 0, np.inf)
    assert m.mean == pytest.approx(math.sqrt(2 / math.pi), abs=1e-14)
    assert m.second == pytest.approx(1.0, abs=1e-14)


def test_symmetric_window():
    m = trunc_normal_moments(0, 1, -1, 1)
    assert abs(m.mean) < 1e-15
    assert m.second == pytest.approx(oracle(0, 1, -1, 1)[1], abs=1e-12)
    assert m.second == pytest.approx(0.29112509477, abs=1e-10)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        trunc_normal_moments(0, 1, 1, 1)
    with pytest.raises(ValueError):
        trunc_normal_moments(0, 0, -1, 1)


def test_deep_tail_is_finite():
    m = trunc_normal_moments(0, 1, 40, np.inf)
    assert 40 < m.mean < 40.03
    assert m.variance > 0
    m = trunc_normal_moments(0, 1, -np.inf, -60)
    assert -60.02 < m.mean < -60


def test_narrow_interval():
    m = trunc_normal_moments(0.3, 1, 1.0, 1.0 + 1e-9)
    assert m.mean == pytest.approx(1.0 + 5e-10, abs=1e-12)
    assert m.variance == pytest.approx(1e-18 / 12, rel=1e-2)


@given(st.floats(-2, 2), st.floats(0.25, 4), st.floats(-3, 3), st.floats(0.0, 3))
def test_mean_in_interval_and_variance_bounded(mu, s2, a, w):
    b = a + w + 1e-6
    m = trunc_normal_moments(mu, s2, a, b)
    assert a - 1e-9 <= m.mean <= b + 1e-9
    assert -1e-12 <= m.variance <= s2 + 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 1.0))
def test_mean_monotone_in_bounds(a, b, step):
    lo, hi = min(a, b), max(a, b) + 0.01
    base = trunc_normal_moments(0, 1, lo, hi).mean
    assert trunc_normal_moments(0, 1, lo + step * (hi - lo) * 0.5, hi).mean >= base - 1e-12
    assert trunc_normal_moments(0, 1, lo, hi + step).mean >= base - 1e-12


def test_vectorized_matches_scalar(rng):
    mu = rng.normal(size=50)
    s2 = rng.uniform(0.2, 3, size=50)
    a = rng.normal(size=50) - 1
    b = a + rng.uniform(0.001, 2, size=50)
    m1, m2 = trunc_moments_array(mu, s2, a, b)
    for k in range(50):
        m = trunc_normal_moments(mu[k], s2[k], a[k], b[k])
        assert m1[k] == pytest.approx(m.mean, abs=1e-15)
        assert m2[k] == pytest.approx(m.second, abs=1e-15)


def test_reflection_symmetry():
    m1, m2 = standard_moments(np.array([-2.0, 0.5]), np.array([1.0, 4.0]))
    r1, r2 = standard_moments(np.array([-1.0, -4.0]), np.array([2.0, -0.5]))
    assert np.allclose(m1, -r1, atol=1e-15) and np.allclose(m2, r2, atol=1e-15)
