"""Sparse multivariate polynomials with exact rational coefficients.

Polynomials are stored as ``{exponent tuple: Fraction}`` maps over a fixed,
ordered list of variable names. Differentiation and arithmetic are exact;
evaluation converts coefficients to double precision once and is vectorised
over numpy arrays.

The text grammar accepted by :func:`parse_polynomial` is::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*       # '/' only by constants
    factor := ('+' | '-') factor | power
    power  := atom ('^' uint)?
    atom   := number | name | '(' expr ')'

with ``number`` an integer or decimal literal (read exactly) and ``name`` one
of the declared variables.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

Exponent = Tuple[int, ...]


class PolynomialParseError(ValueError):
    """Raised for malformed polynomial text; ``position`` is 0-based."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Polynomial:
    """Exact polynomial in a fixed tuple of variables."""

    __slots__ = ("variables", "terms", "_compiled")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, Fraction] | None = None):
        self.variables = tuple(variables)
        clean: Dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            if len(exp) != len(self.variables):
                raise ValueError("exponent length does not match variable count")
            c = Fraction(c)
            if c != 0:
                clean[tuple(int(e) for e in exp)] = clean.get(tuple(exp), Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}
        self._compiled = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, variables: Sequence[str], value) -> "Polynomial":
        return cls(variables, {(0,) * len(variables): Fraction(value)})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Polynomial":
        idx = list(variables).index(name)
        exp = tuple(1 if i == idx else 0 for i in range(len(variables)))
        return cls(variables, {exp: Fraction(1)})

    # -- algebra ----------------------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if other.variables != self.variables:
            raise ValueError("polynomials over different variable lists")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.variables, Fraction(other))

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Polynomial(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(self.variables, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    # -- calculus -------------------------------------------------------------
    def diff(self, multi_index: Sequence[int]) -> "Polynomial":
        """Exact partial derivative; ``multi_index[i]`` is the order in variable i."""
        if len(multi_index) != len(self.variables):
            raise ValueError("multi-index length does not match variable count")
        out: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            coef = c
            new = []
            for ei, ki in zip(e, multi_index):
                if ki > ei:
                    coef = Fraction(0)
                    break
                coef *= math.perm(ei, ki)
                new.append(ei - ki)
            if coef != 0:
                out[tuple(new)] = coef
        return Polynomial(self.variables, out)

    def diff_var(self, name: str, order: int = 1) -> "Polynomial":
        idx = self.variables.index(name)
        return self.diff(tuple(order if i == idx else 0 for i in range(len(self.variables))))

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        idx = self.variables.index(name)
        return max((e[idx] for e in self.terms), default=0)

    def substitute(self, values: Mapping[str, float | Fraction]) -> "Polynomial":
        """Fix some variables; returns a polynomial over the remaining ones."""
        keep = [v for v in self.variables if v not in values]
        keep_idx = [self.variables.index(v) for v in keep]
        out: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            coef = Fraction(c)
            for i, v in enumerate(self.variables):
                if v in values and e[i]:
                    coef *= Fraction(values[v]) ** e[i]
            key = tuple(e[i] for i in keep_idx)
            out[key] = out.get(key, Fraction(0)) + coef
        return Polynomial(keep, out)

    def univariate_coefficients(self, name: str, fixed: Mapping[str, float]) -> np.ndarray:
        """Float coefficients (lowest degree first) in ``name`` with the rest fixed."""
        idx = self.variables.index(name)
        deg = self.degree_in(name)
        coeffs = np.zeros(deg + 1)
        others = [(i, v) for i, v in enumerate(self.variables) if i != idx]
        for e, c in self.terms.items():
            val = float(c)
            for i, v in others:
                if e[i]:
                    val *= float(fixed[v]) ** e[i]
            coeffs[e[idx]] += val
        return coeffs

    # -- evaluation -------------------------------------------------------------
    def _compile(self):
        if self._compiled is None:
            exps = np.array(sorted(self.terms), dtype=np.int64).reshape(-1, len(self.variables))
            coefs = np.array([float(self.terms[tuple(e)]) for e in exps], dtype=float)
            self._compiled = (exps, coefs)
        return self._compiled

    def __call__(self, *args):
        """Evaluate with one argument per variable (scalars or broadcastable arrays)."""
        if len(args) != len(self.variables):
            raise ValueError(f"expected {len(self.variables)} arguments, got {len(args)}")
        exps, coefs = self._compile()
        arrays = [np.asarray(a, dtype=float) for a in args]
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        total = np.zeros(shape)
        # fixed term order keeps evaluation bit-reproducible
        for e, c in zip(exps, coefs):
            term = np.full(shape, c)
            for a, k in zip(arrays, e):
                if k:
                    term = term * a**k
            total = total + term
        if total.ndim == 0:
            return float(total)
        return total

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda t: (-sum(t), tuple(-x for x in t))):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = f"{mag}"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Exact determinant of a small square matrix of polynomials (Laplace expansion)."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return matrix[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def monomials(variables: Sequence[str], max_degree: int) -> Iterable[Exponent]:
    for e in product(range(max_degree + 1), repeat=len(variables)):
        if sum(e) <= max_degree:
            yield e


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise PolynomialParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Polynomial:
        result = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolynomialParseError(f"unexpected token {val!r}", pos)
        return result

    def expr(self) -> Polynomial:
        result = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Polynomial:
        result = self.factor()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.factor()
            if op == "*":
                result = result * rhs
            else:
                if any(sum(e) for e in rhs.terms) or not rhs.terms:
                    raise PolynomialParseError("division only by nonzero constants", pos)
                result = result * (1 / next(iter(rhs.terms.values())))
        return result

    def factor(self) -> Polynomial:
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            inner = self.factor()
            return inner if op == "+" else -inner
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                raise PolynomialParseError("exponent must be a non-negative integer", pos)
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return Polynomial.constant(self.variables, Fraction(val))
        if kind == "name":
            if val not in self.variables:
                raise PolynomialParseError(f"unknown variable {val!r}", pos)
            return Polynomial.variable(self.variables, val)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise PolynomialParseError(f"unexpected token {val or 'end of input'!r}", pos)


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``text`` as a polynomial over ``variables``."""
    return _Parser(text, variables).parse()
