"""Student-t machinery against the scipy inversion oracle."""

import numpy as np
import pytest
from scipy.special import betainc, stdtrit

from vqcbench.stats import (confidence_interval, regularized_incomplete_beta,
                            t_cdf, t_quantile)


def test_incomplete_beta_against_scipy():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = float(rng.uniform(0.2, 30))
        b = float(rng.uniform(0.2, 30))
        x = float(rng.uniform(0, 1))
        assert abs(regularized_incomplete_beta(a, b, x) - betainc(a, b, x)) < 1e-12


def test_incomplete_beta_edges():
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        regularized_incomplete_beta(0.0, 1.0, 0.5)


def test_t_cdf_midpoint_and_symmetry():
    assert t_cdf(0.0, 7) == 0.5
    for df in (1, 4, 44):
        for t in (0.5, 1.3, 2.8):
            assert abs(t_cdf(t, df) + t_cdf(-t, df) - 1.0) < 1e-13


def test_t_quantile_known_constants():
    assert abs(t_quantile(0.975, 4) - 2.776) < 1e-3
    assert abs(t_quantile(0.975, 44) - 2.0154) < 1e-3
    assert abs(t_quantile(0.975, 1) - 12.706204736) < 1e-6


def test_t_quantile_against_scipy_oracle():
    for df in (1, 2, 4, 10, 44, 100):
        for p in (0.6, 0.9, 0.975, 0.995):
            assert abs(t_quantile(p, df) - stdtrit(df, p)) < 1e-9
            assert abs(t_quantile(1 - p, df) + stdtrit(df, p)) < 1e-9


def test_t_quantile_domain():
    with pytest.raises(ValueError):
        t_quantile(0.0, 4)
    with pytest.raises(ValueError):
        t_quantile(1.0, 4)
    assert t_quantile(0.5, 9) == 0.0


def test_confidence_interval_n5():
    values = [0.91, 0.93, 0.92, 0.95, 0.94]
    mean, half = confidence_interval(values)
    assert abs(mean - 0.93) < 1e-12
    s = np.std(values, ddof=1)
    assert abs(half - 2.7764451051977987 * s / np.sqrt(5)) < 1e-9


def test_confidence_interval_constant_inputs():
    mean, half = confidence_interval([0.7, 0.7, 0.7, 0.7])
    assert mean == 0.7
    assert half == 0.0
    # values whose repeated sum rounds: half-width must still be exactly 0
    v = 0.9133333333333333
    mean, half = confidence_interval([v] * 5)
    assert mean == v
    assert half == 0.0


def test_confidence_interval_two_point():
    mean, half = confidence_interval([0.0, 1.0])
    assert mean == 0.5
    # t_{0.975,1} * (1/sqrt(2)) / sqrt(2) = 12.70620... * 0.5
    assert abs(half - 6.353102368087349) < 1e-6


def test_confidence_interval_requires_two_values():
    with pytest.raises(ValueError):
        confidence_interval([0.5])
