"""Grid norms, kernel-level operator norm proxies, sublevel measures and atoms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .cutoffs import BumpPair, DyadicIndex, make_bump_pair
from .oscillatory import BumpAmplitude, piece_kernel_many
from .phases import PhaseFunction
from .quadrature import adaptive_gk, gauss_legendre

__all__ = [
    "GridSpec", "NormEstimate", "sup_norm", "lq_norm", "lq_norm_samples", "l1_l2_piece_proxy",
    "ff_star_piece_norm", "ResolutionError", "sublevel_measure", "vanishing_integral",
    "Atom", "make_atom", "atom_factor",
]

P = np.polynomial.Polynomial


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    h: float
    refine_depth: int = 1

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        if self.hi < self.lo:
            raise ValueError("empty grid interval")

    def nodes(self) -> np.ndarray:
        n = int(math.floor((self.hi - self.lo) / self.h + 1e-9))
        return self.lo + self.h * np.arange(n + 1)

    def midpoints(self) -> np.ndarray:
        n = max(1, int(round((self.hi - self.lo) / self.h)))
        return self.lo + (np.arange(n) + 0.5) * self.h


@dataclass(frozen=True)
class NormEstimate:
    value: float
    grid: GridSpec
    method: str  # sup-grid | lq-grid | ff-star
    argmax: Optional[float] = None


def sup_norm(f: Callable[[np.ndarray], np.ndarray], grid: GridSpec, top: int = 3,
             values: Optional[np.ndarray] = None) -> NormEstimate:
    """Grid maximum of ``|f|``, refined at spacing ``h/8`` around the ``top`` largest nodes.

    ``values`` may supply ``f`` on ``grid.nodes()`` when a cheaper evaluator
    exists for the whole grid; ``f`` is then only called for the refinement.
    """
    x = grid.nodes()
    v = np.abs(np.asarray(f(x) if values is None else values))
    if v.shape != x.shape:
        raise ValueError("values do not match the grid nodes")
    best_i = int(np.argmax(v))
    best, best_x = float(v[best_i]), float(x[best_i])
    h = grid.h
    candidates = x[np.argsort(-v, kind="stable")[:top]]
    for _ in range(grid.refine_depth):
        new_candidates = []
        for c in np.sort(candidates):
            xs = np.clip(c + (h / 8) * np.arange(-8, 9), grid.lo, grid.hi)
            vs = np.abs(np.asarray(f(xs)))
            i = int(np.argmax(vs))
            if vs[i] > best:
                best, best_x = float(vs[i]), float(xs[i])
            new_candidates.append(xs[i])
        candidates = np.array(new_candidates)
        h /= 8
    return NormEstimate(best, grid, "sup-grid", best_x)


def lq_norm_samples(values: np.ndarray, h: float, q: float) -> float:
    a = np.abs(np.asarray(values))
    if math.isinf(q):
        return float(a.max())
    # scale out the maximum so large q does not overflow
    m = float(a.max()) if a.size else 0.0
    if m == 0:
        return 0.0
    return m * float(np.sum((a / m) ** q) * h) ** (1.0 / q)


def lq_norm(f: Callable[[np.ndarray], np.ndarray], grid: GridSpec, q: float) -> NormEstimate:
    """``(sum |f(x_i)|^q h)^(1/q)`` over grid midpoints; ``q = inf`` is :func:`sup_norm`."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if math.isinf(q):
        return sup_norm(f, grid)
    x = grid.midpoints()
    return NormEstimate(lq_norm_samples(f(x), grid.h, q), grid, "lq-grid")


# --------------------------------------------------------------------------
# L^1 -> L^2 proxies for piece operators
# --------------------------------------------------------------------------

def l1_l2_piece_proxy(phase: PhaseFunction, index: DyadicIndex, y_grid: Sequence[Sequence[float]],
                      x_grid: Tuple[GridSpec, GridSpec], bumps: Optional[BumpPair] = None,
                      amplitude=None) -> NormEstimate:
    """``sup_y ||K(., y)||_{L^2}`` for the translation-invariant kernel ``K(x, y) = I(x - y)``.

    ``I`` is the piece kernel of a phase with two base variables; ``x_grid``
    is a product of two grids whose midpoints are used.
    """
    g1, g2 = x_grid
    x1, x2 = g1.midpoints(), g2.midpoints()
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    best = 0.0
    for y in y_grid:
        pts = np.stack([X1.ravel() - y[0], X2.ravel() - y[1]], axis=1)
        vals = piece_kernel_many(phase, index, list(pts), bumps, amplitude)
        best = max(best, float(np.sqrt(np.sum(np.abs(vals) ** 2) * g1.h * g2.h)))
    return NormEstimate(best, g1, "ff-star")


def _linear_base_split(phase: PhaseFunction) -> np.ndarray:
    """Return ``Phi0`` coefficients for ``Phi = Phi0(alpha) + x1 alpha + x2`` or raise."""
    poly = phase.poly
    if phase.n_x != 2 or phase.n_alpha != 1:
        raise ValueError("needs two base variables and one angle")
    phi0 = np.zeros(poly.degree_in(phase.alpha_names[0]) + 1)
    for e, c in poly.terms.items():
        if e[:2] == (0, 0):
            phi0[e[2]] += float(c)
        elif e in ((1, 0, 1), (0, 1, 0)) and c == 1:
            continue
        else:
            raise ValueError("needs Phi = Phi0(alpha) + x1*alpha + x2")
    return phi0


def ff_star_piece_norm(phase: PhaseFunction, index: DyadicIndex, bumps: Optional[BumpPair] = None,
                       amplitude=None) -> NormEstimate:
    """Square root of the ``F*F`` kernel diagonal for ``Phi0(alpha) + x1 alpha + x2``.

    With ``xi = lambda z (alpha, 1)`` the piece kernel is a Fourier transform,
    so Plancherel gives
    ``||I||_2^2 = (2 pi)^2 / lambda * int beta(z)^2 / z dz * int |b c(Phi0''/sigma)|^2 d alpha``.
    """
    b = bumps or make_bump_pair()
    amp = amplitude or BumpAmplitude()
    phi0 = _linear_base_split(phase)
    d2 = np.polynomial.polynomial.polyder(phi0, 2) if phi0.size > 2 else np.zeros(1)
    lam, sigma = index.lam, index.sigma
    z, wz = gauss_legendre(64, 0.5, 2.0)
    zint = float(np.sum(wz * b.beta(z) ** 2 / z))

    def cut(alpha):
        dd = np.polynomial.polynomial.polyval(alpha, d2)
        c = b.rho(dd / sigma) if index.tilde else b.beta(index.sign * dd / sigma)
        return (amp(alpha) * c) ** 2

    lo, hi = amp.support
    breaks = list(amp.breakpoints)
    for lev in (sigma / 2, sigma, 2 * sigma, -sigma / 2, -sigma, -2 * sigma):
        c = d2.copy()
        c[0] -= lev
        if c.size > 1 and np.any(c[1:] != 0):
            for r in np.polynomial.polynomial.polyroots(np.trim_zeros(c, "b")):
                if abs(r.imag) < 1e-12 and lo < r.real < hi:
                    breaks.append(float(r.real))
    aint = adaptive_gk(cut, (lo, hi), max(1e-12, 1e-9 * sigma), breakpoints=breaks).value.real
    value = math.sqrt(max(aint, 0.0) * zint / lam) * 2.0 * math.pi
    return NormEstimate(value, GridSpec(lo, hi, hi - lo), "ff-star")


# --------------------------------------------------------------------------
# Sublevel sets and vanishing integrals
# --------------------------------------------------------------------------

class ResolutionError(RuntimeError):
    pass


def _as_poly(f) -> np.polynomial.Polynomial:
    if isinstance(f, np.polynomial.Polynomial):
        return f
    return P(np.asarray(f, dtype=float))


def _real_roots(p: np.polynomial.Polynomial, lo: float, hi: float):
    p = p.trim()
    if p.degree() < 1:
        return []
    r = p.roots()
    return [float(v.real) for v in r if abs(v.imag) < 1e-9 and lo <= v.real <= hi]


def _count_measure(phi, d2, gamma, lam, sigma, brackets, lo, hi, h):
    n_cells = int(math.floor((hi - lo) / h))
    ranges = []
    for a, b in brackets:
        k0 = max(int(math.floor((a - lo) / h)) - 2, 0)
        k1 = min(int(math.ceil((b - lo) / h)) + 2, n_cells - 1)
        if ranges and k0 <= ranges[-1][1] + 1:
            ranges[-1][1] = max(ranges[-1][1], k1)
        else:
            ranges.append([k0, k1])
    total = 0
    for k0, k1 in ranges:
        x = lo + h * (np.arange(k0, k1 + 1) + 0.5)
        ok = (np.abs(phi(x) - gamma) <= 1.0 / lam) & (np.abs(d2(x)) >= sigma)
        total += int(np.count_nonzero(ok))
    return total * h


def sublevel_measure(phi, lam: float, sigma: float, gamma: float, interval: Tuple[float, float] = (-2.0, 2.0),
                     max_refinements: int = 3) -> float:
    """Measure of ``{alpha in K : |Phi - gamma| <= 1/lambda, |Phi''| >= sigma}``.

    Cells are counted on the uniform midpoint grid of spacing
    ``min(1e-5, 1/(100 lambda))``, restricted to brackets between the real
    roots of ``Phi - gamma -+ 1/lambda`` where the set can be nonempty.  The
    count is repeated at half spacing; they must agree within 2% (or within
    four fine cells for nearly empty sets), halving up to ``max_refinements``
    times before giving up.
    """
    if lam < 1 or sigma <= 0:
        raise ValueError("need lambda >= 1 and sigma > 0")
    phi = _as_poly(phi)
    d2 = phi.deriv(2)
    lo, hi = interval
    cuts = {lo, hi}
    for shift in (gamma + 1.0 / lam, gamma - 1.0 / lam):
        cuts.update(_real_roots(phi - shift, lo, hi))
    cuts = sorted(cuts)
    brackets = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = 0.5 * (a + b)
        if abs(phi(m) - gamma) <= 1.0 / lam:
            brackets.append((a, b))
    if not brackets:
        return 0.0
    h = min(1e-5, 1.0 / (100.0 * lam))
    for _ in range(max_refinements + 1):
        coarse = _count_measure(phi, d2, gamma, lam, sigma, brackets, lo, hi, h)
        fine = _count_measure(phi, d2, gamma, lam, sigma, brackets, lo, hi, h / 2)
        if abs(coarse - fine) <= max(0.02 * max(coarse, fine), 4 * h / 2):
            return fine
        h /= 2
    raise ResolutionError(f"resolution insufficient for sublevel set at lambda={lam}, sigma={sigma}")


def vanishing_integral(f, sigma: float, bumps: Optional[BumpPair] = None,
                       interval: Tuple[float, float] = (-2.0, 2.0), tol: float = 1e-10) -> float:
    """``int_K beta(f(alpha) / sigma) d alpha`` by adaptive quadrature split at the level crossings."""
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")
    b = bumps or make_bump_pair()
    f = _as_poly(f)
    lo, hi = interval
    breaks = set()
    for lev in (sigma / 2, sigma, 2 * sigma):
        breaks.update(_real_roots(f - lev, lo, hi))
    edges = sorted(breaks | {lo, hi})
    total = 0.0
    for a, c in zip(edges[:-1], edges[1:]):
        m = 0.5 * (a + c)
        if c > a and b.beta(f(m) / sigma) > 0:
            total += adaptive_gk(lambda s: b.beta(f(s) / sigma), (a, c), tol).value.real
    return total


# --------------------------------------------------------------------------
# Atoms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """``H (phi((y - c + r/4) / (r/4)) - phi((y - c - r/4) / (r/4)))`` with ``sup = 1/r``."""

    center: float
    r: float
    n: int = 1
    height: float = field(init=False)

    def __post_init__(self):
        # raw mollifier peaks at e^-1
        object.__setattr__(self, "height", math.e / self.r)

    def profile(self, y):
        y = np.asarray(y, dtype=float)
        q = self.r / 4
        shape = lambda s: np.where(np.abs(s) < 1, np.exp(-1.0 / np.maximum(1 - s * s, 1e-300)), 0.0)
        return self.height * (shape((y - self.center + q) / q) - shape((y - self.center - q) / q))

    @property
    def support(self) -> Tuple[float, float]:
        return (self.center - self.r / 2, self.center + self.r / 2)

    def fourier(self, theta) -> np.ndarray:
        """``int e^{-2 pi i theta y} a(y) dy``."""
        theta = np.asarray(theta, dtype=float)
        q = self.r / 4
        # enough nodes for the largest frequency requested
        n_s = 200 + int(8 * float(np.max(np.abs(theta), initial=0.0)) * q)
        s, w = gauss_legendre(n_s, -1.0, 1.0)
        shape = np.exp(-1.0 / (1 - s * s))
        bump_hat = (np.exp(-2j * np.pi * np.outer(theta * q, s)) * (shape * w)).sum(axis=1) * q
        shift = np.exp(-2j * np.pi * theta * (self.center - q)) - np.exp(-2j * np.pi * theta * (self.center + q))
        return self.height * bump_hat * shift


def make_atom(center: float, r: float, n: int = 1) -> Atom:
    if not 0 < r <= 1:
        raise ValueError("atom side length must lie in (0, 1]")
    if n != 1:
        raise NotImplementedError("atoms are one-dimensional")
    return Atom(float(center), float(r), n)


def atom_factor(lam: float, atom: Atom, x_grid: Optional[np.ndarray] = None,
                bumps: Optional[BumpPair] = None) -> float:
    """``sup_x |F_lambda a(x)|`` over ``||F_lambda||_{L^1 -> L^inf} = 1.5 lambda``.

    ``F_lambda`` has kernel ``int e^{2 pi i theta (x - y)} beta(|theta|/lambda) d theta``.
    """
    b = bumps or make_bump_pair()
    reach = atom.r + 8.0 / lam
    if x_grid is None:
        x_grid = atom.center + np.linspace(-reach, reach, 32 * int(lam * reach) + 1)
    else:
        reach = max(reach, float(np.max(np.abs(np.asarray(x_grid) - atom.center))))
    # about 20 nodes per oscillation of e^{2 pi i theta x} across the band
    n_theta = 200 + int(30 * lam * reach)
    th, w = gauss_legendre(n_theta, 0.5 * lam, 2.0 * lam)
    weights = w * b.beta(th / lam)
    ahat_pos = atom.fourier(th)
    ahat_neg = atom.fourier(-th)
    x = np.asarray(x_grid, dtype=float)
    vals = (np.exp(2j * np.pi * np.outer(x, th)) * (weights * ahat_pos)).sum(axis=1)
    vals += (np.exp(-2j * np.pi * np.outer(x, th)) * (weights * ahat_neg)).sum(axis=1)
    return float(np.max(np.abs(vals))) / (1.5 * lam)
