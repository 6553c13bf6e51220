"""Exact exponent calculus: (1/p, 1/q) regions and the Sobolev orders attached to them.

Points are handled in reciprocal coordinates ``(u, v) = (1/p, 1/q)`` with
``p = inf`` mapped to ``u = 0``.  Everything here is rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

Rational = Union[int, Fraction, str, float]
Point = Tuple[Fraction, Fraction]

BOUNDARY = "boundary"
OUTSIDE = "outside"


class OrderError(ValueError):
    pass


def parse_exponent(value: Rational) -> Union[Fraction, float]:
    """``'5/4'``, ``'inf'``, ``3`` or a Fraction; infinity comes back as ``math.inf``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return math.inf if math.isinf(value) else Fraction(value).limit_denominator(10**9)
    if isinstance(value, int):
        return Fraction(value)
    text = str(value).strip().lower()
    if text in ("inf", "infinity", "oo", "∞"):
        return math.inf
    return Fraction(text)


def reciprocal(value: Rational) -> Fraction:
    v = parse_exponent(value)
    if v == math.inf:
        return Fraction(0)
    if v <= 0:
        raise ValueError("Lebesgue exponents must be positive")
    return 1 / v


def fmt(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(value)


def kappa(m: int) -> Fraction:
    return Fraction(1, 2) - Fraction(1, m + 2)


def q_threshold(m: int) -> Fraction:
    return 2 + Fraction(2, m)


def p_threshold(m: int) -> Fraction:
    return 2 - Fraction(2, m + 2)


def dual(point: Point) -> Point:
    """``(1/p, 1/q) -> (1/q', 1/p')``."""
    u, v = point
    return (1 - v, 1 - u)


@dataclass(frozen=True)
class Region:
    label: str  # A_m | B_m | C_m
    m: int
    vertices: Tuple[Point, ...]

    def to_dict(self) -> dict:
        return {"label": self.label, "vertices": [[str(u), str(v)] for u, v in self.vertices]}


def _ccw(vertices: List[Point]) -> Tuple[Point, ...]:
    area2 = sum(a[0] * b[1] - b[0] * a[1] for a, b in zip(vertices, vertices[1:] + vertices[:1]))
    return tuple(vertices if area2 > 0 else vertices[::-1])


def region_vertices(m: int) -> Dict[str, Region]:
    if m < 1:
        raise ValueError("m must be >= 1")
    half = Fraction(1, 2)
    iq = 1 / q_threshold(m)
    ip = 1 / p_threshold(m)
    one, zero = Fraction(1), Fraction(0)
    a = ((half, half), (one, one), (one, iq))
    b = ((zero, zero), (half, half), (ip, zero))
    c = ((one, zero), (one, iq), (half, half), (ip, zero))
    return {"A": Region(f"A_{m}", m, a), "B": Region(f"B_{m}", m, b), "C": Region(f"C_{m}", m, c)}


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _locate(point: Point, vertices: Tuple[Point, ...]) -> str:
    """``inside`` / ``edge`` / ``out`` for a convex polygon."""
    vertices = _ccw(list(vertices))
    signs = []
    for a, b in zip(vertices, vertices[1:] + vertices[:1]):
        signs.append(_cross(a, b, point))
    if all(s > 0 for s in signs):
        return "inside"
    if all(s >= 0 for s in signs):
        return "edge"
    return "out"


def classify_point(point: Point, m: int) -> str:
    regions = region_vertices(m)
    where = {k: _locate(point, r.vertices) for k, r in regions.items()}
    if any(w == "edge" for w in where.values()):
        return BOUNDARY
    for k, w in where.items():
        if w == "inside":
            return regions[k].label
    return OUTSIDE


def classify_pq(p: Rational, q: Rational, m: int) -> str:
    """Open-region label ``A_m``/``B_m``/``C_m``, ``boundary`` or ``outside``."""
    u, v = reciprocal(p), reciprocal(q)
    if not (0 <= u <= 1 and 0 <= v <= 1):
        raise ValueError("need 1 <= p, q <= inf")
    return classify_point((u, v), m)


@dataclass(frozen=True)
class SobolevOrder:
    order: Optional[Fraction]
    region: str
    formula_id: str

    def to_dict(self) -> dict:
        out = {"order": fmt(self.order), "region": self.region, "formula": self.formula_id}
        if self.order is not None:
            out["order_decimal"] = float(self.order)
        return out


def _order_in(label: str, u: Fraction, v: Fraction, m: int, n: int, mu: Fraction) -> SobolevOrder:
    dp = u - Fraction(1, 2)
    dq = Fraction(1, 2) - v
    k = kappa(m)
    kind = label[0]
    if kind == "A":
        return SobolevOrder(mu + n * dp + dq, label, "A")
    if kind == "B":
        return SobolevOrder(mu + n * dq + dp, label, "B")
    shared = (dp + dq) * (Fraction(1, 2) + k)
    # q <= p' is u + v >= 1; both branches agree on u + v = 1
    if u + v >= 1:
        return SobolevOrder(mu + n * dp + shared + (dq - dp), label, "C:q<=p'")
    return SobolevOrder(mu + n * dq + shared + (dp - dq), label, "C:q>p'")


def sobolev_order(p: Rational, q: Rational, m: int, n: int, mu: Rational = 0) -> SobolevOrder:
    """Sobolev order of the ``L^p -> L^q`` bound for a caustic of index ``m``."""
    u, v = reciprocal(p), reciprocal(q)
    label = classify_point((u, v), m)
    if label == BOUNDARY:
        raise OrderError("boundary point: the estimate only holds with an epsilon loss there")
    if label == OUTSIDE:
        raise OrderError("not covered: (1/p, 1/q) lies outside the A, B and C regions")
    return _order_in(label, u, v, m, n, Fraction(parse_exponent(mu)))


def order_formula(kind: str, point: Point, m: int, n: int, mu: Rational = 0) -> Fraction:
    """Evaluate one region's formula at any point, used for limits along shared edges."""
    u, v = point
    return _order_in(f"{kind}_{m}", u, v, m, n, Fraction(parse_exponent(mu))).order


def _delta_q(q: Rational) -> Fraction:
    return Fraction(1, 2) - reciprocal(q)


def hardy_order(q: Rational, m: int, n: int, mu: Rational = 0) -> SobolevOrder:
    """Order of the local Hardy space ``h^1 -> L^q`` bound, for folds and cusps only."""
    if m not in (1, 2):
        raise OrderError("outside the hypothesis: only m = 1 or m = 2 is covered")
    qv = parse_exponent(q)
    if qv < 2:
        raise ValueError("need q >= 2")
    mu = Fraction(parse_exponent(mu))
    dq = _delta_q(q)
    base = mu + Fraction(n, 2) + dq
    qm = q_threshold(m)
    if qv == qm:
        return SobolevOrder(None, "endpoint", "endpoint not covered")
    if qv < qm:
        return SobolevOrder(base, "h1", "h1:q<q_m")
    return SobolevOrder(base + predicted_lq_growth(q, m), "h1", "h1:q>q_m")


@dataclass(frozen=True)
class HalfWaveOrders:
    uniform_order: Fraction
    blowup_exponent: Fraction
    robust_order: Fraction

    def to_dict(self) -> dict:
        return {"uniform": str(self.uniform_order), "blowup": str(self.blowup_exponent),
                "robust": str(self.robust_order)}


def halfwave_orders(q: Rational, n: int, m: int) -> HalfWaveOrders:
    qv = parse_exponent(q)
    if qv == math.inf:
        raise OrderError("need q < inf")
    if qv < 2:
        raise ValueError("need q >= 2")
    dq = _delta_q(q)
    uniform = (n + 1) * dq
    return HalfWaveOrders(uniform, dq, uniform + 2 * kappa(m) * dq)


def predicted_lq_growth(q: Rational, m: int) -> Fraction:
    """Exponent of tau by which ``||u_tau||_{L^q}`` exceeds the caustic-free rate."""
    qv = parse_exponent(q)
    if qv < 2:
        raise ValueError("need q >= 2")
    if qv <= q_threshold(m):
        return Fraction(0)
    dq = _delta_q(q)
    dqm = _delta_q(q_threshold(m))
    return kappa(m) * (dq - dqm) / (Fraction(1, 2) - dqm)
