"""Oscillatory integrals ``u_tau``, piece kernels ``I_{lambda,sigma}`` and Airy values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .cutoffs import BumpPair, DyadicIndex, make_bump_pair
from .phases import PhaseFunction, find_stationary_points
from .quadrature import QuadratureResult, adaptive_gk, gauss_legendre

__all__ = [
    "BumpAmplitude", "OscIntegrand", "integrate_osc", "u_tau", "u_tau_many", "u_tau_grid",
    "piece_kernel", "piece_kernel_many", "airy", "AIRY_ZERO_VALUE",
]

AIRY_ZERO_VALUE = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)


@dataclass(frozen=True)
class BumpAmplitude:
    """``alpha -> rho((alpha - center) / scale)``."""

    scale: float = 1.0
    center: float = 0.0

    def __call__(self, alpha):
        return make_bump_pair().rho((np.asarray(alpha, dtype=float) - self.center) / self.scale)

    @property
    def support(self) -> Tuple[float, float]:
        return (self.center - 2.0 * self.scale, self.center + 2.0 * self.scale)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        c, s = self.center, self.scale
        return (c - 2 * s, c - s, c + s, c + 2 * s)


@dataclass
class OscIntegrand:
    """``prefactor * int e^{i tau phase(alpha)} amplitude(alpha) d alpha`` over ``interval``.

    ``phase`` and ``amplitude`` act on arrays of alpha.  ``breakpoints``
    should include every stationary point of the phase in the interval.
    """

    phase: Callable[[np.ndarray], np.ndarray]
    amplitude: Callable[[np.ndarray], np.ndarray]
    tau: float
    interval: Tuple[float, float]
    breakpoints: Sequence[float] = ()
    prefactor: float = 1.0

    def __call__(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        return np.exp(1j * self.tau * self.phase(alpha)) * self.amplitude(alpha)


def _variation_fn(phase_fn, tau: float):
    def variation(a, b):
        m = 0.5 * (a + b)
        pa, pm, pb = phase_fn(a), phase_fn(m), phase_fn(b)
        v = np.abs(pm - pa) + np.abs(pb - pm)
        if v.ndim > 1:
            v = v.max(axis=0)
        return abs(tau) * v
    return variation


def integrate_osc(integrand: OscIntegrand, tol: float = 1e-10, **kwargs) -> QuadratureResult:
    """Adaptive Gauss-Kronrod with at least 8 panels per period of the phase."""
    res = adaptive_gk(
        integrand, integrand.interval, tol,
        breakpoints=integrand.breakpoints,
        variation=_variation_fn(integrand.phase, integrand.tau),
        **kwargs,
    )
    return QuadratureResult(res.value * integrand.prefactor, res.abs_error_estimate * abs(integrand.prefactor),
                            res.panels_used, res.converged)


# --------------------------------------------------------------------------
# u_tau
# --------------------------------------------------------------------------

def _horner(coeffs: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Evaluate rows of ``coeffs`` (lowest degree first) at ``alpha``: shape (k, n)."""
    out = np.repeat(coeffs[:, -1:], alpha.size, axis=1)
    for j in range(coeffs.shape[1] - 2, -1, -1):
        out = out * alpha[None, :] + coeffs[:, j:j + 1]
    return out


def _default_amplitude(amplitude) -> BumpAmplitude:
    return BumpAmplitude() if amplitude is None else amplitude


def u_tau_many(phase: PhaseFunction, xs: Sequence[Sequence[float]], tau: float, amplitude=None,
               tol: float = 1e-8, **kwargs) -> QuadratureResult:
    """``u_tau`` at every base point in ``xs`` with one shared panel set.

    ``tol`` bounds the error of the raw integral, so the returned values carry
    absolute error ``tol * tau^(1/2)``.
    """
    if phase.n_alpha != 1:
        raise ValueError("u_tau needs a single angular variable")
    if tau < 1:
        raise ValueError("tau must be >= 1")
    amp = _default_amplitude(amplitude)
    xs = [np.atleast_1d(np.asarray(x, dtype=float)) for x in xs]
    coeffs = [phase.alpha_polynomial(x) for x in xs]
    width = max(c.size for c in coeffs)
    coef = np.zeros((len(xs), width))
    for i, c in enumerate(coeffs):
        coef[i, :c.size] = c
    lo, hi = amp.support
    breaks = set(amp.breakpoints)
    for x in xs:
        for sp in find_stationary_points(phase, x, (lo, hi)):
            breaks.add(sp.alpha)

    def phase_rows(alpha):
        return _horner(coef, np.atleast_1d(alpha))

    def f(alpha):
        return np.exp(1j * tau * phase_rows(alpha)) * amp(alpha)[None, :]

    res = adaptive_gk(f, (lo, hi), tol, n_comp=len(xs), breakpoints=sorted(breaks),
                      variation=_variation_fn(phase_rows, tau), **kwargs)
    scale = tau ** 0.5
    value = np.atleast_1d(res.value) * scale
    return QuadratureResult(value, res.abs_error_estimate * scale, res.panels_used, res.converged)


def u_tau(phase: PhaseFunction, x, tau: float, amplitude=None, tol: float = 1e-8, **kwargs) -> complex:
    """``tau^(1/2) int e^{i tau Phi(x, alpha)} a(alpha) d alpha`` (one angular variable)."""
    res = u_tau_many(phase, [x], tau, amplitude, tol, **kwargs)
    return complex(res.value[0])


def _linear_axis_profile(phase: PhaseFunction, x_fixed, axis: int) -> np.ndarray:
    """Alpha coefficients of ``Phi`` at ``x_fixed`` with ``x[axis] = 0``.

    Requires ``Phi`` to depend on ``x[axis]`` only through ``x[axis] * alpha``.
    """
    poly = phase.poly
    nx = phase.n_x
    for e, c in poly.terms.items():
        if e[axis] and (e[axis] != 1 or sum(e[:nx]) != 1 or e[nx] != 1 or c != 1):
            raise ValueError(f"u_tau_grid needs Phi linear in x{axis + 1} with coefficient alpha")
    x0 = np.array(x_fixed, dtype=float)
    x0[axis] = 0.0
    return phase.alpha_polynomial(x0)


def u_tau_grid(phase: PhaseFunction, tau: float, x_fixed, axis: int, window: Tuple[float, float],
               h_max: float, amplitude=None, oversample: float = 1.5):
    """``u_tau`` on a uniform grid in ``x[axis]`` covering ``window`` by one FFT.

    When ``Phi`` depends on ``x[axis]`` only through ``x[axis] * alpha`` the map
    ``x[axis] -> u_tau`` is a Fourier transform of ``e^{i tau Phi0} a``.  It is
    discretised by the trapezoidal rule, which converges spectrally for smooth
    compactly supported integrands; ``oversample`` is the margin over the local
    Nyquist rate.  Returns ``(t, values, h)`` restricted to ``window``.
    """
    if phase.n_alpha != 1:
        raise ValueError("u_tau_grid needs a single angular variable")
    amp = _default_amplitude(amplitude)
    phi0 = _linear_axis_profile(phase, x_fixed, axis)
    lo, hi = amp.support
    dphi0 = np.polynomial.polynomial.polyder(phi0) if phi0.size > 1 else np.zeros(1)
    probe = np.linspace(lo, hi, 4097)
    slope = float(np.max(np.abs(np.polynomial.polynomial.polyval(probe, dphi0))))
    x_abs = max(abs(window[0]), abs(window[1]))
    band = tau * (slope + x_abs)
    d_alpha = np.pi / (oversample * 2.0 * band)
    # x spacing is 2 pi / (tau N d_alpha)
    n_min = max(2.0 * np.pi / (tau * h_max * d_alpha), (hi - lo) / d_alpha + 1)
    n = 1 << int(math.ceil(math.log2(n_min)))
    alpha = lo + d_alpha * np.arange(n)
    g = np.zeros(n, dtype=complex)
    inside = alpha <= hi
    ai = alpha[inside]
    g[inside] = np.exp(1j * tau * np.polynomial.polynomial.polyval(ai, phi0)) * amp(ai)
    dx = 2.0 * np.pi / (tau * n * d_alpha)
    t = np.fft.fftfreq(n, d=1.0 / n) * dx
    vals = n * np.fft.ifft(g) * np.exp(1j * tau * t * lo) * d_alpha * tau**0.5
    order = np.argsort(t)
    t, vals = t[order], vals[order]
    keep = (t >= window[0]) & (t <= window[1])
    return t[keep], vals[keep], dx


# --------------------------------------------------------------------------
# (lambda, sigma) piece kernels
# --------------------------------------------------------------------------

_Z_NODES, _Z_WEIGHTS = gauss_legendre(32, 0.5, 2.0)


def _cutoff_breaks(d2_coeffs: np.ndarray, sigma: float, lo: float, hi: float, tilde: bool):
    levels = (-2 * sigma, -sigma, 2 * sigma, sigma) if tilde else (sigma / 2, 2 * sigma, -sigma / 2, -2 * sigma)
    out = []
    for lev in levels:
        c = d2_coeffs.copy()
        c[0] -= lev
        while c.size > 1 and c[-1] == 0:
            c = c[:-1]
        if c.size < 2:
            continue
        for r in np.polynomial.polynomial.polyroots(c):
            if abs(r.imag) < 1e-9 and lo < r.real < hi:
                out.append(float(r.real))
    return out


def piece_kernel_many(phase: PhaseFunction, index: DyadicIndex, xs, bumps: Optional[BumpPair] = None,
                      amplitude=None, rel_tol: float = 1e-7) -> np.ndarray:
    """``I_{lambda,sigma}(x)`` for each base point in ``xs``.

    ``lambda^(1/2) int beta(z) int e^{i lambda z Phi} b(alpha) c(Phi''/sigma) d alpha dz``
    with ``c = beta(sign * .)`` for ordinary pieces and ``rho`` for the
    near-caustic piece; the ``z`` integral is a fixed 32-point Gauss-Legendre
    rule and the inner one is adaptive.
    """
    if phase.n_alpha != 1:
        raise ValueError("piece kernels need a single angular variable")
    b = bumps or make_bump_pair()
    amp = _default_amplitude(amplitude)
    lam, sigma = index.lam, index.sigma
    xs = [np.atleast_1d(np.asarray(x, dtype=float)) for x in xs]
    nx = len(xs)
    coeffs = [phase.alpha_polynomial(x) for x in xs]
    width = max(c.size for c in coeffs)
    coef = np.zeros((nx, width))
    for i, c in enumerate(coeffs):
        coef[i, :c.size] = c
    d2 = np.array([np.polynomial.polynomial.polyder(c, 2) if c.size > 2 else np.zeros(1) for c in coef])
    lo, hi = amp.support
    breaks = set(amp.breakpoints)
    for row in d2:
        breaks.update(_cutoff_breaks(row, sigma, lo, hi, index.tilde))

    zw = _Z_WEIGHTS * b.beta(_Z_NODES)
    nz = zw.size

    def cut(alpha):
        dd = _horner(d2, alpha)
        if index.tilde:
            return b.rho(dd / sigma)
        return b.beta(index.sign * dd / sigma)

    def phase_rows(alpha):
        return _horner(coef, np.atleast_1d(alpha))

    def f(alpha):
        ph = phase_rows(alpha)  # (nx, n)
        base = amp(alpha)[None, :] * cut(alpha)  # (nx, n)
        osc = np.exp(1j * lam * _Z_NODES[None, :, None] * ph[:, None, :])  # (nx, nz, n)
        return (osc * base[:, None, :]).reshape(nx * nz, -1)

    variation = _variation_fn(phase_rows, 2.0 * lam)
    edges = np.array(sorted(breaks | {lo, hi}))
    edges = edges[(edges >= lo) & (edges <= hi)]
    # between consecutive level crossings the cutoff is either 0 or positive
    mids = 0.5 * (edges[:-1] + edges[1:])
    active = np.any(cut(mids) * amp(mids)[None, :] > 0, axis=0)
    spans = []
    for k in np.flatnonzero(active):
        if spans and spans[-1][1] == edges[k]:
            spans[-1][1] = edges[k + 1]
        else:
            spans.append([edges[k], edges[k + 1]])

    def integrate(tol):
        total = np.zeros(nx * nz, dtype=complex)
        for a, c in spans:
            res = adaptive_gk(f, (a, c), tol, n_comp=nx * nz, breakpoints=edges, variation=variation)
            total += np.atleast_1d(res.value)
        return total.reshape(nx, nz)

    inner = integrate(1e-6)
    scale = float(np.max(np.abs(inner))) if inner.size else 0.0
    if scale > 0:
        inner = integrate(max(rel_tol * scale, 1e-12))
    return lam**0.5 * (inner @ zw)


def piece_kernel(phase: PhaseFunction, index: DyadicIndex, x, bumps: Optional[BumpPair] = None,
                 amplitude=None) -> complex:
    return complex(piece_kernel_many(phase, index, [x], bumps, amplitude)[0])


# --------------------------------------------------------------------------
# Airy function
# --------------------------------------------------------------------------

def airy(s, n_terms: int = 60) -> float:
    """Airy ``Ai(s)`` for ``|s| <= 10`` from its two Maclaurin branches.

    The series is summed in 40-digit arithmetic; both branches have terms far
    larger than the result for large negative ``s``.
    """
    import mpmath

    if np.ndim(s):
        return np.array([airy(v, n_terms) for v in np.asarray(s, dtype=float)])
    s = float(s)
    if abs(s) > 10:
        raise ValueError("airy series is only used for |s| <= 10")
    if n_terms < 40:
        raise ValueError("at least 40 terms")
    with mpmath.workdps(40):
        z = mpmath.mpf(s)
        z3 = z**3
        f_term = mpmath.mpf(1)
        g_term = z
        f_sum, g_sum = f_term, g_term
        for k in range(1, n_terms):
            # ratio of consecutive terms of 3^k (1/3)_k z^{3k} / (3k)!
            f_term *= z3 / ((3 * k - 1) * (3 * k))
            g_term *= z3 / ((3 * k) * (3 * k + 1))
            f_sum += f_term
            g_sum += g_term
        c1 = mpmath.mpf(3) ** (mpmath.mpf(-2) / 3) / mpmath.gamma(mpmath.mpf(2) / 3)
        c2 = mpmath.mpf(3) ** (mpmath.mpf(-1) / 3) / mpmath.gamma(mpmath.mpf(1) / 3)
        return float(c1 * f_sum - c2 * g_sum)
