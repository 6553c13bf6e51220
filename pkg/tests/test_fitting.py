import math

import numpy as np
import pytest

from caustic_bench.fitting import FitError, fit_exponent, fit_log2, fit_with_retrench


def test_exact_power_law():
    fit = fit_exponent([(2.0**k, 4 * (2.0**k) ** 3) for k in range(6)])
    assert fit.slope == pytest.approx(3, abs=1e-12)
    assert fit.intercept == pytest.approx(2, abs=1e-12)
    assert fit.r_squared == 1
    assert fit.residual_max <= 1e-12


def test_perturbed_power_law():
    xs = [2.0**k for k in range(4, 17)]
    fit = fit_exponent([(x, x ** (1 / 6) * (1 + 0.01 * math.sin(x))) for x in xs])
    assert abs(fit.slope - 1 / 6) <= 0.01


def test_constant():
    fit = fit_exponent([(2.0**k, 5.0) for k in range(5)])
    assert fit.slope == pytest.approx(0, abs=1e-14)
    assert fit.r_squared == 1


def test_errors():
    with pytest.raises(FitError):
        fit_exponent([(1, 1), (2, 0), (4, 1)])
    with pytest.raises(FitError):
        fit_exponent([(1, 1), (2, 2)])
    with pytest.raises(FitError):
        fit_log2([(0, 1), (0, 2), (1, 3)])


def test_retrench_drops_one_point_only():
    rng = np.random.default_rng(1)
    pts = [(float(k), 0.5 * k) for k in range(6)]
    pts[0] = (0.0, 8.0)  # pre-asymptotic outlier
    fit = fit_with_retrench(pts, 0.98)
    assert fit.dropped == 1 and fit.slope == pytest.approx(0.5)
    noisy = [(float(k), float(rng.normal())) for k in range(8)]
    fit = fit_with_retrench(noisy, 0.98)
    assert fit.dropped == 1 and len(fit.samples) == 7


def test_good_fit_not_retrenched():
    fit = fit_with_retrench([(float(k), 2.0 * k + 1) for k in range(5)], 0.98)
    assert fit.dropped == 0 and len(fit.samples) == 5
