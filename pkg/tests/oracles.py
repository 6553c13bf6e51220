"""Independent reference computations for the derived test values.

Run ``python tests/oracles.py`` to regenerate ``frozen_oracles.json``.  Nothing
here imports the package under test: the values come from sympy, mpmath and
scipy closed forms, so the tests compare two unrelated code paths.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import sympy as sp

FROZEN = Path(__file__).with_name("frozen_oracles.json")


def airy_values():
    return {
        "ai0": float(mpmath.airyai(0)),
        "ai1": float(mpmath.airyai(1)),
        "ai_max": float(mpmath.airyai(mpmath.findroot(lambda s: mpmath.airyai(s, derivative=1), -1.0))),
        "ai_argmax": float(mpmath.findroot(lambda s: mpmath.airyai(s, derivative=1), -1.0)),
        "samples": {str(s): float(mpmath.airyai(s)) for s in (-10, -7.5, -3.2, -1, 0.5, 2, 4.4, 7, 10)},
    }


def fold_closed_form(tau: float, x: float) -> float:
    """``|tau^(1/2) int e^{i tau (a^3 + x a)} da|`` over the whole line."""
    s = 3 ** (-1 / 3) * tau ** (2 / 3) * x
    return float(tau**0.5 * 2 * mpmath.pi * (3 * tau) ** (-1 / 3) * abs(mpmath.airyai(s)))


def fold_values():
    out = {}
    for l in (8, 10, 12):
        tau = 2.0**l
        for label, x in (("0", 0.0), ("+s", tau ** (-2 / 3)), ("-s", -(tau ** (-2 / 3))), ("+0.1", 0.1), ("-0.1", -0.1)):
            out[f"{l}:{label}"] = [x, fold_closed_form(tau, x)]
    out["tau4096_x0"] = fold_closed_form(4096.0, 0.0)
    return out


def airy_lq_slopes():
    """Fitted tau-exponents of the L^q norm over x in [-4, 1] of the whole-line fold profile."""
    from scipy.special import airy as sc_airy

    out = {}
    for q in (3, 8):
        ls = np.arange(6, 17)
        norms = []
        for l in ls:
            tau = 2.0**l
            c = 3 ** (-1 / 3) * tau ** (2 / 3)
            # 40 samples per local Airy period at the far end of the window
            n = int(40 * 5 * c * math.sqrt(4 * c) / (2 * math.pi)) + 1
            x = np.linspace(-4.0, 1.0, n)
            u = tau ** (1 / 6) * 2 * math.pi * 3 ** (-1 / 3) * np.abs(sc_airy(c * x)[0])
            h = x[1] - x[0]
            norms.append((np.sum(u**q) * h) ** (1 / q))
        out[str(q)] = float(np.polyfit(ls, np.log2(norms), 1)[0])
    return out


def derivative_values():
    a, x1, x2, x3 = sp.symbols("a x1 x2 x3")
    fold = a**3 + x1 * a + x2
    cusp = a**4 + x1 * a**2 + x2 * a + x3
    return {
        "fold_aa_at_1": float(sp.diff(fold, a, 2).subs(a, 1)),
        "fold_x1": str(sp.diff(fold, x1)),
        "cusp_aaa_at_half": float(sp.diff(cusp, a, 3).subs(a, sp.Rational(1, 2))),
    }


def _in_triangle_barycentric(p, tri):
    """Strict interior test by barycentric coordinates in rationals."""
    (x1, y1), (x2, y2), (x3, y3) = tri
    x, y = p
    det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3)
    l1 = ((y2 - y3) * (x - x3) + (x3 - x2) * (y - y3)) / det
    l2 = ((y3 - y1) * (x - x3) + (x1 - x3) * (y - y3)) / det
    l3 = 1 - l1 - l2
    return l1 > 0 and l2 > 0 and l3 > 0


def exponent_values():
    F = Fraction
    qm, pm = F(4), F(4, 3)
    A1 = [(F(1, 2), F(1, 2)), (F(1), F(1)), (F(1), 1 / qm)]
    C1 = [(F(1), F(0)), (F(1), 1 / qm), (F(1, 2), F(1, 2)), (1 / pm, F(0))]
    p_a = (F(9, 10), F(3, 5))
    # hull test: split the quadrilateral along the diagonal (1, 1/4)-(3/4, 0);
    # the query point lies on the other diagonal
    p_c = (F(4, 5), F(1, 5))
    in_c = _in_triangle_barycentric(p_c, [C1[1], C1[2], C1[3]]) or _in_triangle_barycentric(p_c, [C1[1], C1[3], C1[0]])
    n, mu = 2, 0
    dp, dq = p_a[0] - F(1, 2), F(1, 2) - p_a[1]
    order_a = mu + n * dp + dq
    # dual point (1 - v, 1 - u) with the B formula mu + n dq' + dp'
    u2, v2 = 1 - p_a[1], 1 - p_a[0]
    order_b = mu + n * (F(1, 2) - v2) + (u2 - F(1, 2))
    kap = F(1, 6)
    hardy_inf = F(1, 2) + F(1, 2) + kap * (F(1, 2) - F(1, 4)) / (F(1, 2) - F(1, 4))
    hardy_3 = F(1, 2) + (F(1, 2) - F(1, 3))
    dq4 = F(1, 4)
    halfwave = [(3 + 1) * dq4, dq4, (3 + 1) * dq4 + 2 * kap * dq4]
    growth8 = kap * ((F(1, 2) - F(1, 8)) - F(1, 4)) / (F(1, 2) - F(1, 4))
    return {
        "A1_contains_point": _in_triangle_barycentric(p_a, A1),
        "C1_contains_point": in_c,
        "order_A": str(order_a), "order_B_dual": str(order_b),
        "hardy_inf": str(hardy_inf), "hardy_3": str(hardy_3),
        "halfwave": [str(v) for v in halfwave],
        "growth_8": str(growth8),
    }


def schur_values():
    rng = np.random.default_rng(42)
    A, B, C = rng.normal(size=(3, 3)), rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    D = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    M = sp.Matrix(np.block([[A, B], [C, D]]).tolist())
    return {"seed42_det": float(M.det())}


def sublevel_values():
    # first-order width of {|a^3/3 - 1| <= 1/lambda} near a* = 3^(1/3)
    lam = 1e4
    a_star = 3 ** (1 / 3)
    lo = float(sp.nsolve(sp.Symbol("a") ** 3 / 3 - (1 - 1 / lam), a_star))
    hi = float(sp.nsolve(sp.Symbol("a") ** 3 / 3 - (1 + 1 / lam), a_star))
    return {"cubic_width_first_order": 2 / (lam * a_star**2), "cubic_width_exact": hi - lo,
            "square_lambda100": 2 * 100 ** -0.5}


def vanishing_values():
    return {"square_support_sigma_0.01": 2 * (math.sqrt(0.02) - math.sqrt(0.005))}


def main():
    data = {
        "airy": airy_values(),
        "fold": fold_values(),
        "airy_lq_slopes": airy_lq_slopes(),
        "derivatives": derivative_values(),
        "exponents": exponent_values(),
        "schur": schur_values(),
        "sublevel": sublevel_values(),
        "vanishing": vanishing_values(),
        "nondeg_sqrt_pi": math.sqrt(math.pi),
        "fresnel_400": math.sqrt(math.pi / 400),
        "sin100": 2 * math.sin(100) / 100,
    }
    FROZEN.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
