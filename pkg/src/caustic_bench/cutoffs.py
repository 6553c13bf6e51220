"""Smooth bump pair, dyadic partitions of unity and (lambda, sigma) pieces."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

_N_SUB = 512
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _mollifier_shape(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s, dtype=float)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


class BumpPair:
    """The cutoffs ``rho`` and ``beta = rho(t) - rho(2t)``.

    ``rho`` is 1 on [-1, 1], 0 outside [-2, 2], and on ``1 <= |t| <= 2`` equals
    the tail mass of the normalised mollifier ``c exp(-1/(1-s^2))`` beyond
    ``s = 2|t| - 3``.  Tail masses are tabulated on 512 subintervals of
    [-1, 1] with 10-point Gauss-Legendre; a point evaluation adds one more
    Gauss-Legendre panel from the point to the next table node.
    """

    def __init__(self, n_sub: int = _N_SUB):
        self.n_sub = n_sub
        self.edges = np.linspace(-1.0, 1.0, n_sub + 1)
        h = self.edges[1] - self.edges[0]
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        nodes = mids[:, None] + 0.5 * h * _GL_NODES[None, :]
        panel = 0.5 * h * (_mollifier_shape(nodes) @ _GL_WEIGHTS)
        self.norm = float(np.sum(panel))
        # tail[k] = normalised mass of [edges[k], 1]
        tail = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]]) / self.norm
        tail[0] = 1.0
        self.tail = tail
        self._h = h

    def mollifier(self, s) -> np.ndarray:
        return _mollifier_shape(np.asarray(s, dtype=float)) / self.norm

    def _tail_mass(self, s: np.ndarray) -> np.ndarray:
        k = np.clip(np.floor((s + 1.0) / self._h).astype(np.int64), 0, self.n_sub - 1)
        right = self.edges[k + 1]
        half = 0.5 * (right - s)
        nodes = 0.5 * (right + s)[..., None] + half[..., None] * _GL_NODES
        partial = half * (_mollifier_shape(nodes) @ _GL_WEIGHTS) / self.norm
        return self.tail[k + 1] + partial

    def rho(self, t) -> np.ndarray:
        t = np.abs(np.asarray(t, dtype=float))
        out = np.where(t <= 1.0, 1.0, 0.0)
        mid = (t > 1.0) & (t < 2.0)
        if np.any(mid):
            # table rounding can overshoot [0, 1] by an ulp
            out[mid] = np.clip(self._tail_mass(2.0 * t[mid] - 3.0), 0.0, 1.0)
        return out if out.ndim else float(out)

    def beta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t, dtype=float)
        pos = (t > 0.5) & (t < 2.0)
        if np.any(pos):
            tp = t[pos]
            out[pos] = np.maximum(self.rho(tp) - self.rho(2.0 * tp), 0.0)
        return out if out.ndim else float(out)

    def rho_support(self) -> Tuple[float, float]:
        return (-2.0, 2.0)

    def beta_support(self) -> Tuple[float, float]:
        return (0.5, 2.0)


@lru_cache(maxsize=1)
def make_bump_pair() -> BumpPair:
    return BumpPair()


def partition_residual(t, j_max: int, bumps: Optional[BumpPair] = None) -> float:
    """``|sum_{+-} sum_{j=0}^{j_max} beta(+-2^-j t/2) + rho(|t|) - 1|``."""
    b = bumps or make_bump_pair()
    t = float(t)
    total = 0.0
    # sum small terms first: only a handful are nonzero
    for j in range(j_max, -1, -1):
        u = 2.0 ** (-j) * t / 2.0
        total += b.beta(u) + b.beta(-u)
    total += b.rho(abs(t))
    return abs(total - 1.0)


def sigma0(lam: int, m: int) -> Tuple[int, float]:
    """``(j0, 2^-j0)`` with ``j0 = floor(l m / (m + 2))`` for ``lam = 2^l``."""
    l = _log2_exact(lam)
    if l < 1 or m < 1:
        raise ValueError("need lambda >= 2 and m >= 1")
    j0 = (l * m) // (m + 2)
    return j0, 2.0 ** (-j0)


def _log2_exact(lam) -> int:
    lam_i = int(lam)
    if lam_i != lam or lam_i < 1 or lam_i & (lam_i - 1):
        raise ValueError(f"lambda must be a power of two, got {lam!r}")
    return lam_i.bit_length() - 1


@dataclass(frozen=True)
class DyadicIndex:
    """A frequency/caustic-distance piece; ``j is None`` marks the near-caustic piece."""

    l: int
    j: Optional[int]
    sign: int = 1
    j0: int = 0

    @property
    def lam(self) -> float:
        return 2.0 ** self.l

    @property
    def tilde(self) -> bool:
        return self.j is None

    @property
    def sigma(self) -> float:
        # the near-caustic cutoff needs j0 >= 1 for the D-cutoffs to telescope
        return 2.0 ** -(max(self.j0, 1) if self.j is None else self.j)

    def __str__(self) -> str:
        j = "tilde" if self.j is None else str(self.j)
        return f"l={self.l},j={j},s={'+' if self.sign > 0 else '-'}"

    @classmethod
    def parse(cls, text: str, m: int) -> "DyadicIndex":
        fields = dict(part.split("=") for part in text.split(","))
        l = int(fields["l"])
        j0, _ = sigma0(2**l, m)
        j = None if fields["j"] == "tilde" else int(fields["j"])
        return cls(l, j, 1 if fields["s"] == "+" else -1, j0)

    def cutoff(self, theta_abs, dist, bumps: Optional[BumpPair] = None):
        """Product cutoff of this piece at ``(|theta|, D)``."""
        b = bumps or make_bump_pair()
        freq = b.beta(np.asarray(theta_abs, dtype=float) / self.lam)
        dist = np.asarray(dist, dtype=float)
        if self.tilde:
            return freq * b.rho(dist / self.sigma)
        return freq * b.beta(self.sign * dist / self.sigma)


def enumerate_pieces(lambda_max: int, m: int) -> List[DyadicIndex]:
    """All pieces with ``2 <= lambda <= lambda_max``, ordered by ``(l, j, sign)``.

    Within each ``l`` the near-caustic piece comes last; the minus sign precedes
    the plus sign.
    """
    L = _log2_exact(lambda_max)
    if L < 1:
        raise ValueError("lambda_max must be >= 2")
    pieces = []
    for l in range(1, L + 1):
        j0, _ = sigma0(2**l, m)
        for j in range(1, j0):
            for sign in (-1, 1):
                pieces.append(DyadicIndex(l, j, sign, j0))
        pieces.append(DyadicIndex(l, None, 1, j0))
    return pieces


def coverage_residual(theta_abs: float, dist: float, lambda_max: int, m: int,
                      bumps: Optional[BumpPair] = None) -> float:
    """How far the enumerated pieces plus the off-caustic remainders are from summing to 1.

    Valid for ``2 <= |theta| <= lambda_max``; the remainder at each frequency
    is ``beta(|theta|/lambda) (1 - rho(2|D|))``.
    """
    b = bumps or make_bump_pair()
    total = 0.0
    for piece in enumerate_pieces(lambda_max, m):
        total += float(piece.cutoff(theta_abs, dist, b))
    L = _log2_exact(lambda_max)
    for l in range(1, L + 1):
        total += float(b.beta(theta_abs / 2.0**l)) * (1.0 - float(b.rho(2.0 * abs(dist))))
    return abs(total - 1.0)
