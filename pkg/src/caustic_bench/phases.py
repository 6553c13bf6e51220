"""Phase functions, the caustic-distance function and caustic classification.

A phase is a polynomial ``Phi(x, alpha)`` in base variables ``x1..xN`` and
angular variables (``a`` when there is one, ``a1..aK`` otherwise).  The
homogeneous phase is ``|theta| * Phi``; every quantity computed here is
homogeneous of degree zero, so the ``|theta|`` factor never appears.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .polynomial import Polynomial, determinant, parse_polynomial

CAUSTIC_TOL = 1e-10
DERIV_TOL = 1e-8
ROOT_TOL = 1e-12


class PhaseDomainError(ValueError):
    """Point outside the phase domain, or derivative order too high."""


class DegenerateCausticError(ValueError):
    """No fiber derivative of the caustic distance is non-vanishing up to ``m_max``."""


class ReductionError(RuntimeError):
    """Newton elimination of angular variables failed."""


def _alpha_names(n_alpha: int) -> Tuple[str, ...]:
    return ("a",) if n_alpha == 1 else tuple(f"a{i}" for i in range(1, n_alpha + 1))


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """Polynomial phase ``Phi(x, alpha)`` on a compact box."""

    poly: Polynomial
    n_x: int
    n_alpha: int
    domain: Tuple[Tuple[float, float], ...]
    max_order: int
    name: str = ""
    _derivs: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_polynomial(cls, poly: Polynomial, n_x: int, n_alpha: int,
                        domain=None, max_order: Optional[int] = None, name: str = "") -> "PhaseFunction":
        if domain is None:
            domain = ((-2.0, 2.0),) * (n_x + n_alpha)
        if max_order is None:
            max_order = poly.degree + 1
        return cls(poly, n_x, n_alpha, tuple(tuple(map(float, d)) for d in domain), max_order, name)

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.poly.variables

    @property
    def x_names(self) -> Tuple[str, ...]:
        return self.variables[: self.n_x]

    @property
    def alpha_names(self) -> Tuple[str, ...]:
        return self.variables[self.n_x:]

    def derivative(self, multi_index: Sequence[int]) -> Polynomial:
        key = tuple(int(k) for k in multi_index)
        if key not in self._derivs:
            self._derivs[key] = self.poly.diff(key)
        return self._derivs[key]

    def alpha_index(self, orders: Sequence[int]) -> Tuple[int, ...]:
        return (0,) * self.n_x + tuple(orders)

    def __call__(self, x, alpha):
        return self.poly(*_split_args(self, x, alpha))

    def alpha_derivative(self, x, alpha, order: int):
        """``d^order Phi / d alpha^order`` for a single angular variable."""
        if self.n_alpha != 1:
            raise ValueError("alpha_derivative needs exactly one angular variable")
        return self.derivative(self.alpha_index((order,)))(*_split_args(self, x, alpha))

    def alpha_derivatives(self, x, alpha, max_order: int) -> np.ndarray:
        return np.array([self.alpha_derivative(x, alpha, k) for k in range(max_order + 1)])

    def alpha_polynomial(self, x) -> np.ndarray:
        """Float coefficients of ``alpha -> Phi(x, alpha)`` (one angular variable)."""
        fixed = dict(zip(self.x_names, np.atleast_1d(np.asarray(x, dtype=float))))
        return self.poly.univariate_coefficients(self.alpha_names[0], fixed)

    def angular_hessian(self, x, alpha) -> np.ndarray:
        k = self.n_alpha
        h = np.empty((k, k))
        for i in range(k):
            for j in range(k):
                orders = [0] * k
                orders[i] += 1
                orders[j] += 1
                h[i, j] = self.derivative(self.alpha_index(orders))(*_split_args(self, x, alpha))
        return h

    def caustic_distance_polynomial(self) -> Polynomial:
        key = "D"
        if key not in self._derivs:
            k = self.n_alpha
            rows = []
            for i in range(k):
                row = []
                for j in range(k):
                    orders = [0] * k
                    orders[i] += 1
                    orders[j] += 1
                    row.append(self.derivative(self.alpha_index(orders)))
                rows.append(row)
            self._derivs[key] = determinant(rows)
        return self._derivs[key]

    def in_domain(self, x, alpha, slack: float = 1e-12) -> bool:
        pt = np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)),
                             np.atleast_1d(np.asarray(alpha, dtype=float))])
        if pt.size != self.n_x + self.n_alpha:
            return False
        return all(lo - slack <= v <= hi + slack for v, (lo, hi) in zip(pt, self.domain))

    def __str__(self) -> str:
        return self.poly.to_text()


def _split_args(phase: PhaseFunction, x, alpha):
    xs = np.atleast_1d(np.asarray(x, dtype=float)) if np.ndim(x) <= 1 else None
    if xs is None:
        raise ValueError("x must be a scalar or a 1-d sequence")
    if xs.size != phase.n_x:
        raise ValueError(f"expected {phase.n_x} base coordinates, got {xs.size}")
    if phase.n_alpha == 1:
        alphas = [np.asarray(alpha, dtype=float)]
    else:
        a = np.asarray(alpha, dtype=float)
        if a.shape[0] != phase.n_alpha:
            raise ValueError(f"expected {phase.n_alpha} angular coordinates")
        alphas = [a[i] for i in range(phase.n_alpha)]
    return list(xs) + alphas


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

def make_model_phase(m: int) -> PhaseFunction:
    """The A_{m+1} model ``a^(m+2) + x1 a^m + ... + xm a + x(m+1)``."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise PhaseDomainError(f"model index must be an integer >= 1, got {m!r}")
    m = int(m)
    names = tuple(f"x{i}" for i in range(1, m + 2)) + ("a",)
    terms = {(0,) * (m + 1) + (m + 2,): Fraction(1)}
    for i in range(1, m + 2):
        exp = [0] * (m + 2)
        exp[i - 1] = 1
        exp[-1] = m + 1 - i
        terms[tuple(exp)] = Fraction(1)
    poly = Polynomial(names, terms)
    return PhaseFunction.from_polynomial(poly, m + 1, 1, max_order=m + 3, name=f"A{m + 1}")


NAMED_PHASES = {"fold": 1, "cusp": 2, "swallowtail": 3, "butterfly": 4}


def parse_phase(text: str, domain=None) -> PhaseFunction:
    """Parse phase text such as ``a^3 + x1*a + x2`` into a :class:`PhaseFunction`.

    Named phases (``fold``, ``cusp``, ``swallowtail``, ``butterfly``, ``A<k>``)
    resolve to model phases.
    """
    key = text.strip()
    if key in NAMED_PHASES:
        return make_model_phase(NAMED_PHASES[key])
    named = re.fullmatch(r"A(\d+)", key)
    if named:
        return make_model_phase(int(named.group(1)) - 1)
    names = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", key))
    xs = sorted((int(n[1:]) for n in names if re.fullmatch(r"x\d+", n)))
    alphas = sorted((int(n[1:]) for n in names if re.fullmatch(r"a\d+", n)))
    n_x = max(xs) if xs else 0
    if "a" in names and alphas:
        raise ValueError("use either 'a' or 'a1..aK' for angular variables, not both")
    n_alpha = max(alphas) if alphas else 1
    variables = tuple(f"x{i}" for i in range(1, n_x + 1)) + _alpha_names(n_alpha)
    poly = parse_polynomial(key, variables)
    return PhaseFunction.from_polynomial(poly, n_x, n_alpha, domain=domain)


# --------------------------------------------------------------------------
# point operations
# --------------------------------------------------------------------------

def _check_point(phase: PhaseFunction, x, alpha) -> None:
    if not phase.in_domain(x, alpha):
        raise PhaseDomainError(f"point (x={x}, alpha={alpha}) outside the phase domain")


def eval_derivative(phase: PhaseFunction, point, multi_index: Sequence[int]) -> float:
    """Exact partial derivative of the phase at ``point = (x, alpha)``.

    ``multi_index`` lists derivative orders for every variable, base variables
    first.
    """
    x, alpha = point
    if len(multi_index) != phase.n_x + phase.n_alpha:
        raise PhaseDomainError("multi-index length does not match the variable count")
    if any(k < 0 for k in multi_index) or sum(multi_index) > phase.max_order:
        raise PhaseDomainError(f"derivative order {sum(multi_index)} exceeds {phase.max_order}")
    _check_point(phase, x, alpha)
    return float(phase.derivative(multi_index)(*_split_args(phase, x, alpha)))


def caustic_distance(phase: PhaseFunction, point) -> float:
    """Determinant of the angular Hessian of ``Phi`` at ``point``."""
    x, alpha = point
    _check_point(phase, x, alpha)
    if phase.n_alpha == 1:
        return float(phase.alpha_derivative(x, alpha, 2))
    return float(phase.caustic_distance_polynomial()(*_split_args(phase, x, alpha)))


@dataclass(frozen=True)
class StationaryPoint:
    alpha: float
    multiplicity: int  # order of the first non-vanishing alpha-derivative of Phi'


def _newton_polish(coeffs: np.ndarray, root: float, iters: int = 60) -> float:
    p = np.polynomial.Polynomial(coeffs)
    dp = p.deriv()
    for _ in range(iters):
        d = dp(root)
        if d == 0:
            break
        step = p(root) / d
        root -= step
        if abs(step) <= ROOT_TOL * 1e-3:
            break
    return float(root)


def find_stationary_points(phase: PhaseFunction, x, alpha_interval: Tuple[float, float]) -> List[StationaryPoint]:
    """Real roots of ``d Phi / d alpha`` in ``alpha_interval``, ascending."""
    if phase.n_alpha != 1:
        raise ValueError("stationary-point search needs exactly one angular variable")
    lo, hi = alpha_interval
    coeffs = np.polynomial.polynomial.polyder(phase.alpha_polynomial(x))
    scale = max(np.max(np.abs(coeffs)), 1.0) if coeffs.size else 1.0
    if coeffs.size == 0 or np.all(np.abs(coeffs) <= 1e-300):
        return []
    # trim vanishing leading coefficients
    while coeffs.size > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if coeffs.size == 1:
        return []
    raw = np.polynomial.polynomial.polyroots(coeffs)
    cand = sorted(r.real for r in raw if abs(r.imag) <= 1e-6 * max(1.0, abs(r)))
    # cluster (numerically split) multiple roots
    clusters: List[List[float]] = []
    for r in cand:
        if clusters and abs(r - clusters[-1][-1]) <= 1e-5 * max(1.0, abs(r)):
            clusters[-1].append(r)
        else:
            clusters.append([r])
    derivs = [coeffs]
    for _ in range(len(coeffs)):
        derivs.append(np.polynomial.polynomial.polyder(derivs[-1]) if derivs[-1].size > 1 else np.zeros(1))
    out: List[StationaryPoint] = []
    for cl in clusters:
        k = len(cl)
        guess = float(np.mean(cl))
        # the (k-1)-th derivative has a simple root at a k-fold root
        root = _newton_polish(derivs[k - 1], guess) if derivs[k - 1].size > 1 else guess
        if not (lo - ROOT_TOL <= root <= hi + ROOT_TOL):
            continue
        mult = 1
        for j in range(1, len(derivs)):
            val = np.polynomial.polynomial.polyval(root, derivs[j])
            if abs(val) > DERIV_TOL * scale:
                mult = j
                break
        if abs(root) < ROOT_TOL:
            root = 0.0
        out.append(StationaryPoint(root, mult))
    return out


@dataclass(frozen=True)
class CausticProfile:
    corank: int
    index_m: Optional[int]
    kappa: Fraction
    q_m: Optional[Fraction]
    p_m: Optional[Fraction]
    location: Tuple[Tuple[float, ...], Tuple[float, ...]]

    @staticmethod
    def thresholds(m: int) -> Tuple[Fraction, Fraction, Fraction]:
        """``(kappa, q_m, p_m)`` for index ``m``."""
        kappa = Fraction(1, 2) - Fraction(1, m + 2)
        q_m = 2 + Fraction(2, m)
        p_m = 2 - Fraction(2, m + 2)
        return kappa, q_m, p_m

    def to_dict(self) -> dict:
        return {
            "corank": self.corank,
            "index_m": self.index_m if self.index_m is not None else "none",
            "kappa": str(self.kappa),
            "q_m": str(self.q_m) if self.q_m is not None else None,
            "p_m": str(self.p_m) if self.p_m is not None else None,
            "location": {"x": list(self.location[0]), "alpha": list(self.location[1])},
        }


def _fiber_jet(phase, x, alpha, n: int) -> np.ndarray:
    """``[Phi', Phi'', ..., Phi^(n)]`` along alpha (one angular variable)."""
    jet = phase.alpha_derivatives(x, alpha, n)
    return np.asarray(jet[1:], dtype=float)


def classify_caustic(phase, point, m_max: int = 6,
                     caustic_tol: float = CAUSTIC_TOL, deriv_tol: float = DERIV_TOL) -> CausticProfile:
    """Corank and index of the caustic at a critical point of ``alpha -> Phi``.

    Works for polynomial phases and for reduced phases (anything exposing
    ``n_alpha`` and ``alpha_derivatives`` in the one-angle case).
    """
    x, alpha = point
    loc = (tuple(np.atleast_1d(np.asarray(x, dtype=float)).tolist()),
           tuple(np.atleast_1d(np.asarray(alpha, dtype=float)).tolist()))
    if phase.n_alpha == 1:
        jet = _fiber_jet(phase, x, alpha, m_max + 2)
        grad = np.array([jet[0]])
        dist = jet[1]
        fiber = jet[2:]  # d^j D / d alpha^j, j = 1..m_max
    else:
        if not isinstance(phase, PhaseFunction):
            raise ValueError("multi-angle classification needs a polynomial phase")
        args = _split_args(phase, x, alpha)
        grad = np.array([
            phase.derivative(phase.alpha_index([1 if i == j else 0 for i in range(phase.n_alpha)]))(*args)
            for j in range(phase.n_alpha)
        ])
        dist = float(phase.caustic_distance_polynomial()(*args))
        fiber = None
    if np.max(np.abs(grad)) > caustic_tol:
        raise ValueError(f"not a critical point: |dPhi/dalpha| = {np.max(np.abs(grad)):.3e}")
    if abs(dist) > caustic_tol:
        return CausticProfile(0, None, Fraction(0), None, None, loc)
    if fiber is None:
        fiber = _multi_angle_fiber_derivatives(phase, x, alpha, m_max)
    for j in range(1, m_max + 1):
        if abs(fiber[j - 1]) > deriv_tol:
            kappa, q_m, p_m = CausticProfile.thresholds(j)
            return CausticProfile(1, j, kappa, q_m, p_m, loc)
    raise DegenerateCausticError(f"degenerate beyond supported index (m_max={m_max})")


def _multi_angle_fiber_derivatives(phase: PhaseFunction, x, alpha, m_max: int) -> List[float]:
    hess = phase.angular_hessian(x, alpha)
    w, v = np.linalg.eigh(hess)
    null = np.abs(w) <= max(1e-8, 1e-8 * np.max(np.abs(w)))
    if np.count_nonzero(null) != 1:
        raise DegenerateCausticError(f"corank {np.count_nonzero(null)} caustics are not supported")
    direction = v[:, np.argmax(null)]
    dpoly = phase.caustic_distance_polynomial()
    args = _split_args(phase, x, alpha)
    k = phase.n_alpha
    out = []
    for j in range(1, m_max + 1):
        total = 0.0
        for beta in _compositions(j, k):
            coef = math.factorial(j) / math.prod(math.factorial(b) for b in beta)
            weight = coef * math.prod(direction[i] ** beta[i] for i in range(k))
            if weight:
                total += weight * float(dpoly.diff((0,) * phase.n_x + beta)(*args))
        out.append(total)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# --------------------------------------------------------------------------
# block determinants and variable reduction
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SchurBlocks:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        a, b, c, d = self.A, self.B, self.C, self.D
        if a.shape[0] != a.shape[1] or d.shape[0] != d.shape[1]:
            raise ValueError("A and D must be square")
        if b.shape != (a.shape[0], d.shape[0]) or c.shape != (d.shape[0], a.shape[0]):
            raise ValueError("block shapes do not compose")

    def full(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])


def schur_determinant(blocks: SchurBlocks) -> Tuple[float, float]:
    """``(det(A - B D^-1 C) det D, det [[A, B], [C, D]])`` computed independently."""
    det_d = np.linalg.det(blocks.D)
    if abs(det_d) <= 1e-12:
        raise np.linalg.LinAlgError("singular D block")
    schur = blocks.A - blocks.B @ np.linalg.solve(blocks.D, blocks.C)
    lhs = float(np.linalg.det(schur) * det_d)
    rhs = float(np.linalg.det(blocks.full()))
    return lhs, rhs


class ReducedPhase:
    """``psi(x, rho) = Phi(x, rho, Sigma(x, rho))`` with ``Sigma`` found by Newton.

    ``keep`` lists the angular indices retained as ``rho``; the others are
    eliminated through ``d Phi / d sigma = 0``.
    """

    def __init__(self, phase: PhaseFunction, keep: Sequence[int], sigma_guess: Sequence[float],
                 newton_tol: float = 1e-12, max_iter: int = 50,
                 jet_radius: float = 0.5, jet_degree: int = 8):
        self.phase = phase
        self.keep = tuple(keep)
        self.drop = tuple(i for i in range(phase.n_alpha) if i not in self.keep)
        if not self.drop:
            raise ValueError("nothing to eliminate")
        self.n_x = phase.n_x
        self.n_alpha = len(self.keep)
        self.sigma_guess = np.asarray(sigma_guess, dtype=float)
        self.newton_tol = newton_tol
        self.max_iter = max_iter
        self.jet_radius = jet_radius
        self.jet_degree = jet_degree
        k = phase.n_alpha
        self._grad_sigma = [phase.derivative(phase.alpha_index([1 if i == s else 0 for i in range(k)]))
                            for s in self.drop]
        self._hess_sigma = [[phase.derivative(phase.alpha_index(
            [(i == s) + (i == t) for i in range(k)])) for t in self.drop] for s in self.drop]

    def _assemble(self, rho, sigma) -> np.ndarray:
        alpha = np.empty(self.phase.n_alpha)
        alpha[list(self.keep)] = np.atleast_1d(rho)
        alpha[list(self.drop)] = sigma
        return alpha

    def solve_sigma(self, x, rho) -> np.ndarray:
        sigma = self.sigma_guess.copy()
        for _ in range(self.max_iter):
            args = _split_args(self.phase, x, self._assemble(rho, sigma))
            g = np.array([p(*args) for p in self._grad_sigma])
            if np.max(np.abs(g)) <= self.newton_tol:
                return sigma
            h = np.array([[p(*args) for p in row] for row in self._hess_sigma])
            if abs(np.linalg.det(h)) <= 1e-14:
                raise ReductionError("singular sigma-Hessian during elimination")
            sigma = sigma - np.linalg.solve(h, g)
        args = _split_args(self.phase, x, self._assemble(rho, sigma))
        if np.max(np.abs([p(*args) for p in self._grad_sigma])) <= self.newton_tol:
            return sigma
        raise ReductionError(f"Newton did not converge in {self.max_iter} iterations")

    def __call__(self, x, rho) -> float:
        sigma = self.solve_sigma(x, rho)
        return float(self.phase(x, self._assemble(rho, sigma)))

    def hessian_fd(self, x, rho, step: float = 1e-4) -> np.ndarray:
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        k = rho.size
        h = np.empty((k, k))
        e = np.eye(k) * step
        for i in range(k):
            for j in range(k):
                if i == j:
                    h[i, i] = (self(x, rho + e[i]) - 2 * self(x, rho) + self(x, rho - e[i])) / step**2
                else:
                    h[i, j] = (self(x, rho + e[i] + e[j]) - self(x, rho + e[i] - e[j])
                               - self(x, rho - e[i] + e[j]) + self(x, rho - e[i] - e[j])) / (4 * step**2)
        return h

    def alpha_derivatives(self, x, alpha, max_order: int) -> np.ndarray:
        """Derivatives of ``psi`` in its single angle from a Chebyshev fit around ``alpha``."""
        if self.n_alpha != 1:
            raise ValueError("jet needs a single retained angle")
        r, n = self.jet_radius, self.jet_degree
        nodes = np.cos(np.pi * (np.arange(n + 1) + 0.5) / (n + 1))
        vals = np.array([self(x, float(alpha) + r * t) for t in nodes])
        cheb = np.polynomial.Chebyshev.fit(nodes, vals, n, domain=[-1, 1])
        out = [float(cheb(0.0))]
        for k in range(1, max_order + 1):
            out.append(float(cheb.deriv(k)(0.0)) / r**k if k <= n else 0.0)
        return np.array(out)


def reduce_variables(phase: PhaseFunction, keep: Sequence[int], base_point,
                     fd_step: float = 1e-4) -> Tuple[ReducedPhase, float]:
    """Eliminate the angular variables not in ``keep`` and check the determinant relation.

    Returns the reduced phase and the residual
    ``|det psi''_rho rho * det Phi''_sigma sigma - det Phi''_alpha alpha|`` at the
    base point, with ``sigma`` replaced by its solution ``Sigma(x, rho)``.
    """
    if phase.n_alpha < 2:
        raise ValueError("reduction needs at least two angular variables")
    x, alpha = base_point
    alpha = np.asarray(alpha, dtype=float)
    drop = [i for i in range(phase.n_alpha) if i not in keep]
    reduced = ReducedPhase(phase, keep, alpha[drop])
    rho = alpha[list(keep)]
    sigma = reduced.solve_sigma(x, rho)
    full_alpha = reduced._assemble(rho, sigma)
    hess = phase.angular_hessian(x, full_alpha)
    h_ss = hess[np.ix_(drop, drop)]
    det_ss = np.linalg.det(h_ss)
    if abs(det_ss) <= 1e-12:
        raise ReductionError("singular sigma-Hessian at the base point")
    reduced.sigma_guess = sigma
    det_psi = np.linalg.det(reduced.hessian_fd(x, rho, fd_step))
    residual = abs(det_psi * det_ss - np.linalg.det(hess))
    return reduced, float(residual)
