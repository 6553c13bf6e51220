import math

import numpy as np
import pytest

from caustic_bench.estimates import (GridSpec, ResolutionError, atom_factor, ff_star_piece_norm,
                                     l1_l2_piece_proxy, lq_norm, make_atom, sublevel_measure, sup_norm,
                                     vanishing_integral)
from caustic_bench.oscillatory import BumpAmplitude, piece_kernel_many, u_tau_grid, u_tau_many
from caustic_bench.phases import make_model_phase
from caustic_bench.scenarios import SigmaPiece

P = np.polynomial.Polynomial


@pytest.fixture(scope="module")
def fold():
    return make_model_phase(1)


def test_sup_constant():
    est = sup_norm(lambda x: np.full(np.shape(x), 2 + 0j), GridSpec(0.0, 1.0, 0.1))
    assert est.value == 2 and est.method == "sup-grid"


def test_sup_sine():
    assert sup_norm(np.sin, GridSpec(0.0, math.pi, math.pi / 500)).value == pytest.approx(1, abs=1e-3)
    est = sup_norm(lambda x: np.sin(50 * x), GridSpec(0.0, math.pi, math.pi / 500))
    assert est.value == pytest.approx(1, abs=1e-3)


def test_sup_refinement_never_decreases():
    f = lambda x: np.sin(37 * x) * np.exp(-x)
    for h in (0.1, 0.05, 0.01):
        g = GridSpec(0.0, 2.0, h)
        assert sup_norm(f, g).value >= float(np.max(np.abs(f(g.nodes()))))


def _fold_sup(fold, tau, h):
    t, v, dx = u_tau_grid(fold, tau, [0.0, 0.0], 0, (-1.0, 1.0), h, BumpAmplitude())
    grid = GridSpec(float(t[0]), float(t[0] + dx * (t.size - 1)), dx)
    f = lambda xs: u_tau_many(fold, [[x, 0.0] for x in xs], tau).value
    return sup_norm(f, grid, values=v[:grid.nodes().size]).value


def test_sup_of_fold_against_airy(fold, oracle):
    tau = 2.0**10
    want = tau ** (1 / 6) * 2 * math.pi * 3 ** (-1 / 3) * oracle["airy"]["ai_max"]
    coarse = _fold_sup(fold, tau, 2.0**-12)
    assert coarse == pytest.approx(want, rel=0.03)
    assert _fold_sup(fold, tau, 2.0**-13) == pytest.approx(coarse, rel=0.03)


def test_lq_examples():
    one = lambda x: np.ones_like(x)
    assert lq_norm(one, GridSpec(0.0, 1.0, 0.125), 2).value == pytest.approx(1, rel=1e-14)
    assert lq_norm(lambda x: x, GridSpec(0.0, 1.0, 1e-4), 2).value == pytest.approx(1 / math.sqrt(3), abs=1e-3)
    g = GridSpec(0.0, 3.0, 0.01)
    assert lq_norm(np.cos, g, math.inf).value == sup_norm(np.cos, g).value
    with pytest.raises(ValueError):
        lq_norm(one, g, 0.5)


def test_lq_grid_stability():
    f = lambda x: np.exp(1j * 40 * x**2) / (1 + x * x)
    a = lq_norm(f, GridSpec(-2.0, 2.0, 1e-3), 4).value
    b = lq_norm(f, GridSpec(-2.0, 2.0, 5e-4), 4).value
    assert abs(a / b - 1) <= 0.03


def test_proxy_zero_kernel(fold):
    est = l1_l2_piece_proxy(fold, SigmaPiece(1024.0, 2.0**8), [[0.0, 0.0]],
                            (GridSpec(-0.1, 0.1, 0.05), GridSpec(-0.1, 0.1, 0.05)))
    assert est.value == 0


def test_proxy_matches_plancherel(fold):
    piece = SigmaPiece(64.0, 0.5)
    grids = (GridSpec(-2.0, 2.0, 1 / 16), GridSpec(-0.4, 0.4, 1 / 64))
    proxy = l1_l2_piece_proxy(fold, piece, [[0.0, 0.0]], grids).value
    assert proxy == pytest.approx(ff_star_piece_norm(fold, piece).value, rel=0.02)


def test_proxy_cauchy_schwarz(fold):
    rng = np.random.default_rng(3)
    g1, g2 = GridSpec(-3.0, 3.0, 1 / 8), GridSpec(-3.0, 3.0, 1 / 8)
    X1, X2 = np.meshgrid(g1.midpoints(), g2.midpoints(), indexing="ij")
    cell = g1.h * g2.h
    for sigma in (0.5, 0.25):
        piece = SigmaPiece(8.0, sigma)
        y = rng.uniform(-0.2, 0.2, size=2)
        vals = np.abs(piece_kernel_many(fold, piece, list(np.stack([X1.ravel() - y[0], X2.ravel() - y[1]], 1))))
        proxy = l1_l2_piece_proxy(fold, piece, [y], (g1, g2)).value
        assert proxy == pytest.approx(math.sqrt(np.sum(vals**2) * cell), rel=1e-12)
        assert proxy <= math.sqrt(vals.max() * np.sum(vals) * cell)


def test_ff_star_sigma_ratio(fold):
    lam = 2.0**10
    hi = ff_star_piece_norm(fold, SigmaPiece(lam, 0.5)).value
    lo = ff_star_piece_norm(fold, SigmaPiece(lam, 0.125)).value
    predicted = (0.5 / 0.125) ** 0.5
    assert predicted / 2 <= hi / lo <= predicted * 2


def test_sublevel_examples(oracle):
    assert sublevel_measure(P([0, 0, 1]), 100, 1, 0) == pytest.approx(0.2, rel=1e-3)
    assert sublevel_measure(P([0, 0, 0, 1]), 1e6, 2, 0) == 0
    got = sublevel_measure(P([0, 0, 0, 1 / 3]), 1e4, 0.1, 1)
    assert got == pytest.approx(oracle["sublevel"]["cubic_width_first_order"], rel=0.1)
    assert got == pytest.approx(oracle["sublevel"]["cubic_width_exact"], rel=0.02)


def test_sublevel_validation():
    with pytest.raises(ValueError):
        sublevel_measure(P([0, 1]), 0.5, 1, 0)
    # 120 narrow components of a degree-60 Chebyshev level set, a few cells each
    cheb = np.polynomial.Chebyshev.basis(60).convert(kind=P)
    with pytest.raises(ResolutionError):
        sublevel_measure(cheb, 1e3, 1e-9, 0.0, interval=(-1.0, 1.0), max_refinements=0)


def test_sublevel_grid_stability():
    phi = P([0, 1, 0, 1 / 3])
    for lam, sigma, gamma in ((2.0**6, 0.25, 0.4), (2.0**10, 0.5, -1.1)):
        a = sublevel_measure(phi, lam, sigma, gamma)
        b = sublevel_measure(phi, lam, sigma, gamma, max_refinements=4)
        assert abs(a - b) <= 0.03 * max(a, b) + 1e-6


def test_vanishing_examples():
    v1 = vanishing_integral(P([0, 1]), 0.01)
    assert 0.005 <= v1 <= 0.03
    v2 = vanishing_integral(P([0, 0, 1]), 0.01)
    assert 0 < v2 <= 2 * (math.sqrt(0.02) - math.sqrt(0.005)) + 1e-12
    with pytest.raises(ValueError):
        vanishing_integral(P([0, 1]), 1.5)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_vanishing_slope(m):
    from caustic_bench.fitting import fit_exponent

    f = P([0.0] * m + [1.0])
    samples = [(2.0**-k, vanishing_integral(f, 2.0**-k)) for k in range(2, 13)]
    assert fit_exponent(samples).slope == pytest.approx(1 / m, abs=0.02)


def test_atom_invariants():
    for r in (1.0, 0.25, 2.0**-8):
        atom = make_atom(0.3, r)
        lo, hi = atom.support
        assert hi - lo == pytest.approx(r)
        y = np.linspace(lo - r, hi + r, 400_001)
        a = atom.profile(y)
        dy = y[1] - y[0]
        assert np.all(a[(y < lo) | (y > hi)] == 0)
        assert abs(np.sum(a) * dy) <= 1e-12
        assert np.max(np.abs(a)) <= 1 / r * (1 + 1e-12)
        assert np.sum(np.abs(a)) * dy <= 1
        assert abs(atom.fourier(np.array([0.0]))[0]) <= 1e-12


def test_atom_domain():
    with pytest.raises(ValueError):
        make_atom(0.0, 1.5)
    with pytest.raises(ValueError):
        make_atom(0.0, 0.0)


def test_atom_factor_examples():
    lam = 2.0**10
    f1 = atom_factor(lam, make_atom(0.0, 1 / lam))
    assert 1 / 4 <= f1 <= 1
    assert atom_factor(lam, make_atom(0.0, 8 / lam)) <= 0.5
    assert atom_factor(lam, make_atom(0.0, 1 / (8 * lam))) <= 0.5


def test_atom_factor_unimodal():
    lam = 2.0**10
    ks = list(range(-6, 7))
    vals = [atom_factor(lam, make_atom(0.0, 2.0**k / lam)) for k in ks]
    peak = ks[int(np.argmax(vals))]
    assert abs(peak) <= 2
    assert vals[0] <= max(vals) / 4 and vals[-1] <= max(vals) / 4
