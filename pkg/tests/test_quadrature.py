import math

import numpy as np
import pytest

from caustic_bench.oscillatory import BumpAmplitude, OscIntegrand, integrate_osc
from caustic_bench.quadrature import QuadratureError, adaptive_gk, gauss_legendre


def test_constant_integrand():
    res = integrate_osc(OscIntegrand(lambda a: 0 * a, lambda a: np.ones_like(a), 0.0, (0.0, 1.0)), tol=1e-12)
    assert abs(res.value - 1) <= 1e-14
    assert res.converged and res.abs_error_estimate >= 0


def test_linear_phase_closed_form(oracle):
    res = integrate_osc(OscIntegrand(lambda a: a, lambda a: np.ones_like(a), 100.0, (-1.0, 1.0)), tol=1e-12)
    assert abs(res.value - oracle["sin100"]) <= 1e-10


def test_fresnel(oracle):
    res = integrate_osc(OscIntegrand(lambda a: a * a, lambda a: np.ones_like(a), 400.0, (-2.0, 2.0),
                                     breakpoints=(0.0,)), tol=1e-12)
    assert abs(abs(res.value) / oracle["fresnel_400"] - 1) <= 0.02


def test_oscillation_budget_sets_panel_floor():
    tau = 1000.0
    res = integrate_osc(OscIntegrand(lambda a: a, lambda a: np.ones_like(a), tau, (0.0, 1.0)), tol=1e-6)
    periods = tau / (2 * math.pi)
    assert res.panels_used >= 8 * periods


def test_tolerance_floor():
    with pytest.raises(ValueError):
        adaptive_gk(lambda a: a, (0.0, 1.0), 1e-13)


def test_panel_budget_exhausted_carries_partial_value():
    with pytest.raises(QuadratureError) as exc:
        adaptive_gk(lambda a: np.abs(a - 1 / 3) ** -0.9, (0.0, 1.0), 1e-12, max_panels=64)
    assert exc.value.panels_used >= 1
    assert np.isfinite(exc.value.abs_error_estimate)


def test_vector_components_share_panels():
    f = lambda a: np.stack([np.cos(a), np.sin(a)])
    res = adaptive_gk(f, (0.0, math.pi), 1e-12, n_comp=2)
    assert np.allclose(res.value, [0.0, 2.0], atol=1e-12)


def test_gauss_legendre_exact_on_polynomials():
    x, w = gauss_legendre(5, 0.5, 2.0)
    assert np.sum(w * x**9) == pytest.approx((2.0**10 - 0.5**10) / 10, rel=1e-13)


def test_halving_tol_is_stable():
    phase = lambda a: a**3 + 0.2 * a
    amp = BumpAmplitude()
    for tol in (1e-6, 1e-8, 1e-10):
        a = integrate_osc(OscIntegrand(phase, amp, 500.0, amp.support, amp.breakpoints), tol=tol).value
        b = integrate_osc(OscIntegrand(phase, amp, 500.0, amp.support, amp.breakpoints), tol=tol / 2).value
        assert abs(a - b) <= tol
