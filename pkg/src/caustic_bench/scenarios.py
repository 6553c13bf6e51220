"""Built-in sweep scenarios: one measurement and one predicted exponent each."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Mapping, Tuple

import numpy as np

from . import exponents
from .cutoffs import make_bump_pair
from .estimates import (GridSpec, atom_factor, ff_star_piece_norm, make_atom, sublevel_measure,
                        sup_norm, lq_norm_samples, vanishing_integral)
from .oscillatory import BumpAmplitude, piece_kernel_many, u_tau_grid, u_tau_many
from .phases import make_model_phase, parse_phase

# (value, error estimate) at one ladder point
Measurement = Tuple[float, float]


@dataclass(frozen=True)
class SigmaPiece:
    """A piece label with an arbitrary (not necessarily dyadic) ``sigma``."""

    lam: float
    sigma: float
    sign: int = 1
    tilde: bool = False


@dataclass(frozen=True)
class Scenario:
    name: str
    parameter: str  # tau | sigma | lambda | gap
    ladder: Tuple[float, float, float]  # log2 min, log2 max, log2 step
    tolerance: float
    citation: str
    defaults: Mapping[str, object]
    predict: Callable[[Mapping[str, object]], Fraction]
    measure: Callable[[float, Mapping[str, object]], Measurement]
    description: str = ""


# --------------------------------------------------------------------------
# measurements
# --------------------------------------------------------------------------

def _sup_on_fft_line(phase, tau, x_fixed, axis, window, h, amp) -> Measurement:
    """Sup of ``|u_tau|`` along one base axis: FFT grid, then quadrature refinement."""
    t, v, dx = u_tau_grid(phase, tau, x_fixed, axis, window, h, amp)
    grid = GridSpec(float(t[0]), float(t[0] + dx * (len(t) - 1)), dx)
    errs = [0.0]

    def f(ts):
        pts = []
        for tt in ts:
            x = list(x_fixed)
            x[axis] = float(tt)
            pts.append(x)
        res = u_tau_many(phase, pts, tau, amp)
        errs.append(res.abs_error_estimate)
        return res.value

    est = sup_norm(f, grid, values=v[:grid.nodes().size])
    return est.value, max(errs)


def measure_fold_sup(tau: float, fixed) -> Measurement:
    s = tau ** (-2.0 / 3.0)
    lo, hi = fixed["window"]
    return _sup_on_fft_line(make_model_phase(1), tau, [0.0, 0.0], 0, (lo * s, hi * s),
                            s * fixed["h"], BumpAmplitude(fixed["amplitude_scale"]))


def measure_cusp_sup(tau: float, fixed) -> Measurement:
    phase = make_model_phase(2)
    amp = BumpAmplitude(fixed["amplitude_scale"])
    s1, s2 = tau ** -0.5, tau ** -0.75
    x1_lo, x1_hi = fixed["window_x1"]
    x2_hi = fixed["window_x2"]
    h = fixed["h"]

    def row_max(X1):
        # even amplitude: |u| is symmetric in x2, so x2 >= 0 suffices
        _, v, _ = u_tau_grid(phase, tau, [X1 * s1, 0.0, 0.0], 1, (0.0, x2_hi * s2), h * s2, amp)
        return float(np.max(np.abs(v)))

    step = fixed["step_x1"]
    coarse = np.arange(x1_lo, x1_hi + step / 2, step)
    vals = [row_max(X) for X in coarse]
    best_x = float(coarse[int(np.argmax(vals))])
    fine = best_x + (step / 8) * np.arange(-8, 9)
    fvals = [row_max(X) for X in fine]
    x1 = float(fine[int(np.argmax(fvals))])
    return _sup_on_fft_line(phase, tau, [x1 * s1, 0.0, 0.0], 1, (0.0, x2_hi * s2), h * s2, amp)


def measure_nondeg_sup(tau: float, fixed) -> Measurement:
    phase = parse_phase("a^2 + x1*a")
    lo, hi = fixed["window"]
    return _sup_on_fft_line(phase, tau, [0.0], 0, (lo, hi), fixed["h"] / tau,
                            BumpAmplitude(fixed["amplitude_scale"]))


def measure_fold_lq(tau: float, fixed) -> Measurement:
    q = float(exponents.parse_exponent(fixed["q"]))
    lo, hi = fixed["window"]
    # 16 samples per local period 2 pi / tau of |u|^q
    t, v, dx = u_tau_grid(make_model_phase(1), tau, [0.0, 0.0], 0, (lo, hi), 2 * math.pi / (16 * tau),
                          BumpAmplitude(fixed["amplitude_scale"]))
    value = lq_norm_samples(v, dx, q)
    # half the samples: a cheap stability indicator for the midpoint sum
    coarse = lq_norm_samples(v[::2], 2 * dx, q)
    return value, abs(value - coarse)


def fold_piece_sup(lam: float, sigma: float, n_points: int = 24) -> Measurement:
    """Sup of ``|I_{lambda,sigma}|`` over fold base points whose double root sits in the cutoff support."""
    phase = make_model_phase(1)
    piece = SigmaPiece(lam, sigma)

    def f(a0):
        a0 = np.asarray(a0, dtype=float)
        # x1 = -3 a0^2, x2 = 2 a0^3 makes alpha = a0 a stationary zero of the phase
        return piece_kernel_many(phase, piece, [[-3 * a * a, 2 * a**3] for a in a0])

    lo, hi = sigma / 12, sigma / 3  # 6 a0 in [sigma/2, 2 sigma]
    est = sup_norm(f, GridSpec(lo, hi, (hi - lo) / n_points))
    return est.value, 0.0


def measure_piece_sup_sigma(sigma: float, fixed) -> Measurement:
    return fold_piece_sup(2.0 ** int(fixed["l"]), sigma)


def measure_piece_l2_sigma(sigma: float, fixed) -> Measurement:
    m = int(fixed["m"])
    est = ff_star_piece_norm(_l2_model_phase(m), SigmaPiece(2.0 ** int(fixed["l"]), sigma))
    return est.value, 0.0


def _l2_model_phase(m: int):
    # Phi0'' vanishes to order m at alpha = 0
    return parse_phase(f"a^{m + 2} + x1*a + x2")


def measure_vanishing(sigma: float, fixed) -> Measurement:
    m = int(fixed["m"])
    return vanishing_integral([0.0] * m + [1.0], sigma), 1e-10


def measure_sublevel(lam: float, fixed) -> Measurement:
    phi = np.polynomial.Polynomial([0.0, -1.0, 0.0, 1.0 / 3.0])
    value = sublevel_measure(phi, lam, float(fixed["sigma"]), float(fixed["gamma"]))
    return value, 2 * min(1e-5, 1 / (100 * lam))


def measure_atom(lam: float, fixed) -> Measurement:
    return atom_factor(lam, make_atom(0.0, float(fixed["r"]))), 0.0


def precaustic_amplitude(s: float, fixed) -> Tuple[float, float, float]:
    """``sup |u_tau|`` over the two stationary points of ``a^3/3 - s a`` and ``|Phi''|`` there."""
    phase = parse_phase("a^3/3 - x1*a")
    root = math.sqrt(s)
    tau = float(fixed["tau_scale"]) * s ** -1.5
    best, err = 0.0, 0.0
    for c in (-root, root):
        amp = BumpAmplitude(scale=root / 2, center=c)
        res = u_tau_many(phase, [[s]], tau, amp)
        best = max(best, abs(complex(res.value[0])))
        err = max(err, res.abs_error_estimate)
    return best, err, 2 * root


def measure_precaustic(s: float, fixed) -> Measurement:
    value, err, _ = precaustic_amplitude(s, fixed)
    return value, err


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

def _lq_prediction(fixed) -> Fraction:
    return exponents.predicted_lq_growth(fixed["q"], 1)


SCENARIOS: Dict[str, Scenario] = {}


def _register(s: Scenario) -> None:
    SCENARIOS[s.name] = s


_register(Scenario(
    "fold-sup", "tau", (6, 16, 1), 0.03, "fold-order",
    {"window": (-3.0, 1.0), "h": 1 / 32, "amplitude_scale": 0.5},
    lambda f: exponents.kappa(1), measure_fold_sup,
    "sup |u_tau| for the fold over x1 in [-3, 1] tau^(-2/3)"))
_register(Scenario(
    "cusp-sup", "tau", (6, 16, 1), 0.03, "cusp-order",
    {"window_x1": (-4.0, 1.0), "step_x1": 0.25, "window_x2": 3.0, "h": 1 / 16, "amplitude_scale": 0.5},
    lambda f: exponents.kappa(2), measure_cusp_sup,
    "sup |u_tau| for the cusp over the tau^(-1/2) x tau^(-3/4) window"))
_register(Scenario(
    "nondeg-sup", "tau", (6, 16, 1), 0.03, "nondegenerate-bound",
    {"window": (-0.5, 0.5), "h": 1 / 4, "amplitude_scale": 0.5},
    lambda f: Fraction(0), measure_nondeg_sup,
    "sup |u_tau| for a^2 + x a on a fixed window"))
_register(Scenario(
    "fold-lq", "tau", (6, 16, 1), 0.03, "lq-critical-exponent",
    {"q": "3", "window": (-4.0, 1.0), "amplitude_scale": 0.5},
    _lq_prediction, measure_fold_lq,
    "L^q norm of the fold u_tau over x1 in [-4, 1]"))
_register(Scenario(
    "piece-sup-sigma", "sigma", (-4, -1, 0.5), 0.1, "piece-sup-bound",
    {"l": 12},
    lambda f: Fraction(-1, 2), measure_piece_sup_sigma,
    "sup_x |I_{lambda,sigma}(x)| for the fold at fixed lambda"))
_register(Scenario(
    "piece-l2-sigma", "sigma", (-8, -1, 1), 0.1, "piece-l1-l2-bound",
    {"l": 10, "m": 1},
    lambda f: Fraction(1, 2 * int(f["m"])), measure_piece_l2_sigma,
    "L^2 norm of the piece kernel via the F*F diagonal"))
_register(Scenario(
    "vanishing", "sigma", (-12, -2, 1), 0.02, "vanishing-lemma",
    {"m": 2},
    lambda f: Fraction(1, int(f["m"])), measure_vanishing,
    "int beta(a^m / sigma) d a"))
_register(Scenario(
    "sublevel", "lambda", (4, 14, 1), 0.05, "sublevel-set-estimate",
    {"sigma": 1.0, "gamma": -2.0 / 3.0},
    lambda f: Fraction(-1, 2), measure_sublevel,
    "|{|Phi - gamma| <= 1/lambda, |Phi''| >= sigma}| for Phi = a^3/3 - a at its critical value"))
_register(Scenario(
    "atom-factor", "lambda", (4, 8, 1), 0.1, "atom-cancellation-factor",
    {"r": 2.0 ** -10},
    lambda f: Fraction(1), measure_atom,
    "sup |F_lambda a| / ||F_lambda||_{L1->Linf} for a mean-zero atom with lambda r < 1"))
_register(Scenario(
    "precaustic-gap", "gap", (-8, -2, 1), 0.05, "precaustic-gap",
    {"tau_scale": 2.0 ** 10},
    lambda f: Fraction(-1, 4), measure_precaustic,
    "stationary-point amplitude of a^3/3 - s a at tau = tau_scale s^(-3/2)"))


def ladder_points(lo: float, hi: float, step: float):
    n = int(round((hi - lo) / step))
    return [lo + k * step for k in range(n + 1)]


# the acceptance suite: (scenario, overrides)
SUITE = (
    ("fold-sup", {}),
    ("cusp-sup", {}),
    ("nondeg-sup", {}),
    ("fold-lq", {"q": "3"}),
    ("fold-lq", {"q": "8"}),
    ("piece-sup-sigma", {"l": 10}),
    ("piece-sup-sigma", {"l": 12}),
    ("piece-l2-sigma", {"m": 1}),
    ("vanishing", {"m": 1}),
    ("vanishing", {"m": 2}),
    ("vanishing", {"m": 3}),
    ("sublevel", {}),
    ("atom-factor", {}),
    ("precaustic-gap", {}),
)
