"""Exact sparse polynomials over the Gaussian rationals Q(i).

Polynomials are immutable maps from exponent tuples to nonzero
:class:`GaussianRational` coefficients.  Variables are addressed by
0-based index; their printed names are ``z1, z2, ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import ExponentOverflow, PolynomialSyntaxError, UnknownVariable

MAX_EXPONENT = 2**31 - 1


class GaussianRational:
    """A complex number ``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = GaussianRational.coerce(other)
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conjugate()
        return GaussianRational(num.re / norm, num.im / norm)

    def __pow__(self, k: int):
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return _format_coeff(self)


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_coeff(c: GaussianRational) -> str:
    if c.im == 0:
        return _format_rational(c.re)
    if c.re == 0:
        return _format_rational(c.im) + "i"
    sign = "+" if c.im > 0 else "-"
    return f"({_format_rational(c.re)}{sign}{_format_rational(abs(c.im))}i)"


def _check_exponent(e: int) -> int:
    if e < 0 or e > MAX_EXPONENT:
        raise ExponentOverflow(f"exponent {e} outside [0, 2^31-1]")
    return e


class Polynomial:
    """Sparse multivariate polynomial in ``n_vars`` variables."""

    __slots__ = ("n_vars", "_terms")

    def __init__(self, n_vars: int, terms: Mapping[tuple, object] = ()):
        if n_vars < 1:
            raise ValueError("n_vars must be positive")
        self.n_vars = n_vars
        clean = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n_vars:
                raise ValueError(f"multi-index {exps} has length != {n_vars}")
            for e in exps:
                _check_exponent(e)
            coeff = GaussianRational.coerce(coeff)
            total = clean.get(exps, GaussianRational(0)) + coeff
            if total:
                clean[exps] = total
            else:
                clean.pop(exps, None)
        self._terms = clean

    @classmethod
    def zero(cls, n_vars: int) -> Polynomial:
        return cls(n_vars)

    @classmethod
    def constant(cls, n_vars: int, value) -> Polynomial:
        return cls(n_vars, {(0,) * n_vars: value})

    @classmethod
    def variable(cls, n_vars: int, var: int) -> Polynomial:
        exps = [0] * n_vars
        exps[var] = 1
        return cls(n_vars, {tuple(exps): 1})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n_vars == other.n_vars and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_vars, frozenset(self._terms.items())))

    def _check_same(self, other: Polynomial):
        if other.n_vars != self.n_vars:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n_vars, other)
        self._check_same(other)
        return Polynomial(self.n_vars, list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n_vars, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n_vars, other)
        self._check_same(other)
        acc = []
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                acc.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return Polynomial(self.n_vars, acc)

    __rmul__ = __mul__

    def scale(self, c) -> Polynomial:
        return Polynomial(self.n_vars, {e: v * c for e, v in self._terms.items()})

    def constant_term(self) -> GaussianRational:
        return self._terms.get((0,) * self.n_vars, GaussianRational(0))

    def variables(self) -> set[int]:
        """Indices of variables appearing with positive exponent."""
        return {i for exps in self._terms for i, e in enumerate(exps) if e}

    def degree_in(self, var: int) -> int:
        return max((exps[var] for exps in self._terms), default=0)

    def __repr__(self):
        return f"Polynomial({self.n_vars}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


class UnivariatePolynomial:
    """Polynomial in a single variable tau, stored as exponent -> coefficient."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, object] = ()):
        clean = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            c = GaussianRational.coerce(c)
            total = clean.get(e, GaussianRational(0)) + c
            if total:
                clean[int(e)] = total
            else:
                clean.pop(int(e), None)
        self._terms = clean

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def order(self) -> int | None:
        """Lowest exponent with nonzero coefficient; None for the zero polynomial."""
        return min(self._terms) if self._terms else None

    def derivative(self) -> UnivariatePolynomial:
        return UnivariatePolynomial({e - 1: c * e for e, c in self._terms.items() if e})

    def __eq__(self, other):
        if not isinstance(other, UnivariatePolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other):
        return UnivariatePolynomial(list(self._terms.items()) + list(other._terms.items()))

    def __mul__(self, other):
        if not isinstance(other, UnivariatePolynomial):
            return UnivariatePolynomial({e: c * other for e, c in self._terms.items()})
        acc = [(e1 + e2, c1 * c2) for e1, c1 in self._terms.items() for e2, c2 in other._terms.items()]
        return UnivariatePolynomial(acc)

    def __repr__(self):
        body = " + ".join(f"{_format_coeff(c)}*t^{e}" for e, c in sorted(self._terms.items()))
        return f"UnivariatePolynomial({body or '0'})"


# --- text format ---------------------------------------------------------


def format_poly(p: Polynomial) -> str:
    """Canonical text form; ``parse_poly(format_poly(p), p.n_vars) == p``."""
    if p.is_zero():
        return "0"
    # descending total degree, then lexicographically descending exponents
    keys = sorted(p._terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
    out = []
    for k, exps in enumerate(keys):
        c = p._terms[exps]
        negative = (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0)
        mag = -c if negative else c
        factors = [f"z{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
        if mag == 1 and factors:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(mag)] + factors)
        if k == 0:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


class _Parser:
    def __init__(self, text: str, n_vars: int):
        self.text = text
        self.n_vars = n_vars
        self.pos = 0

    def error(self, message):
        raise PolynomialSyntaxError(message, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def uint(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected unsigned integer")
        return int(self.text[start:self.pos])

    def rational(self, allow_sign=False) -> Fraction:
        sign = 1
        if allow_sign and self.peek() in ("+", "-"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        num = self.uint()
        if self.peek() == "/":
            self.pos += 1
            at = self.pos
            den = self.uint()
            if den == 0:
                self.pos = at
                self.error("zero denominator")
            return Fraction(sign * num, den)
        return Fraction(sign * num)

    def coeff(self) -> GaussianRational:
        if self.peek() == "(":
            self.pos += 1
            re = self.rational(allow_sign=True)
            im = Fraction(0)
            if self.peek() == "i":
                self.pos += 1
                re, im = Fraction(0), re
            elif self.peek() in ("+", "-"):
                sign = -1 if self.text[self.pos] == "-" else 1
                self.pos += 1
                im = sign * self.rational()
                self.take("i")
            self.take(")")
            return GaussianRational(re, im)
        q = self.rational()
        if self.peek() == "i":
            self.pos += 1
            return GaussianRational(0, q)
        return GaussianRational(q)

    def factor(self, exps: list):
        self.take("z")
        at = self.pos
        idx = self.uint()
        if not 1 <= idx <= self.n_vars:
            raise UnknownVariable(f"z{idx} at position {at} (n_vars={self.n_vars})")
        e = 1
        if self.peek() == "^":
            self.pos += 1
            e = self.uint()
            if e > MAX_EXPONENT:
                raise ExponentOverflow(f"exponent {e} at position {self.pos} exceeds 2^31-1")
        total = exps[idx - 1] + e
        if total > MAX_EXPONENT:
            raise ExponentOverflow(f"exponent of z{idx} exceeds 2^31-1")
        exps[idx - 1] = total

    def term(self):
        exps = [0] * self.n_vars
        coeff = GaussianRational(1)
        ch = self.peek()
        if ch == "z":
            self.factor(exps)
        elif ch.isdigit() or ch == "(":
            coeff = self.coeff()
            if self.peek() != "*":
                return tuple(exps), coeff
            self.pos += 1
            self.factor(exps)
        else:
            self.error("expected term")
        while self.peek() == "*":
            self.pos += 1
            self.factor(exps)
        return tuple(exps), coeff

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        acc = []
        exps, c = self.term()
        acc.append((exps, c * sign))
        while self.peek() in ("+", "-"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
            exps, c = self.term()
            acc.append((exps, c * sign))
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return Polynomial(self.n_vars, acc)


def parse_poly(text: str, n_vars: int) -> Polynomial:
    """Parse ``text`` (e.g. ``"z3^4 - z2^3 + z1"``) into an exact polynomial.

    Grammar: ``expr := [sign] term (('+'|'-') term)*``, ``term := coeff |
    [coeff '*'] factor ('*' factor)*``, ``factor := 'z' uint ['^' uint]``,
    ``coeff := rational | rational 'i' | '(' rational [('+'|'-') rational 'i'] ')'``.
    The literal ``0`` parses to the zero polynomial.
    """
    if text.strip() == "0":
        return Polynomial.zero(n_vars)
    return _Parser(text, n_vars).expr()


# --- calculus and evaluation ---------------------------------------------


def wirtinger_derivative(p: Polynomial, var: int, order: int = 1) -> Polynomial:
    """Holomorphic derivative ``d^order/dz_var^order`` of ``p``."""
    if not 0 <= var < p.n_vars:
        raise IndexError(f"variable index {var} out of range")
    if order == 0:
        return p
    acc = []
    for exps, c in p.items():
        e = exps[var]
        if e < order:
            continue
        falling = math.perm(e, order)
        new = list(exps)
        new[var] = e - order
        acc.append((tuple(new), c * falling))
    return Polynomial(p.n_vars, acc)


def gradient(p: Polynomial) -> list[Polynomial]:
    return [wirtinger_derivative(p, i, 1) for i in range(p.n_vars)]


def evaluate(p: Polynomial, point: Sequence[complex]) -> complex:
    """Floating evaluation at a single complex point."""
    if len(point) != p.n_vars:
        raise ValueError("point length must equal n_vars")
    total = 0j
    for exps, c in p.items():
        term = complex(c)
        for z, e in zip(point, exps):
            if e:
                term *= complex(z) ** e
        total += term
    return total


def evaluate_exact(p: Polynomial, point: Sequence) -> GaussianRational:
    """Exact evaluation at a point with Gaussian-rational coordinates."""
    if len(point) != p.n_vars:
        raise ValueError("point length must equal n_vars")
    point = [GaussianRational.coerce(z) for z in point]
    total = GaussianRational(0)
    for exps, c in p.items():
        term = c
        for z, e in zip(point, exps):
            if e:
                term = term * z**e
        total = total + term
    return total


def compose_monomial_curve(
    p: Polynomial, exps: Sequence[int], coeffs: Sequence | None = None
) -> UnivariatePolynomial:
    """Substitute ``z_i = coeffs[i] * tau^exps[i]``; an exponent of 0 means z_i = 0.

    ``coeffs`` defaults to all ones.
    """
    if len(exps) != p.n_vars:
        raise ValueError("exponent vector length must equal n_vars")
    if coeffs is None:
        coeffs = [GaussianRational(1)] * p.n_vars
    coeffs = [GaussianRational.coerce(c) for c in coeffs]
    acc = []
    for mono, c in p.items():
        if any(e and a == 0 for e, a in zip(mono, exps)):
            continue
        deg = sum(e * a for e, a in zip(mono, exps))
        if deg > MAX_EXPONENT:
            raise ExponentOverflow(f"composed degree {deg} exceeds 2^31-1")
        term = c
        for e, k in zip(mono, coeffs):
            if e:
                term = term * k**e
        acc.append((deg, term))
    return UnivariatePolynomial(acc)


@dataclass(frozen=True)
class SupportOrders:
    """Exponent scans of one variable; ``None`` encodes infinity."""

    pure_min: int | None
    min_positive: int | None
    _exponents: tuple = ()

    def max_below(self, bound: int) -> int:
        return max((e for e in self._exponents if e <= bound), default=0)


def support_orders(p: Polynomial, var: int) -> SupportOrders:
    """Scan the exponents of ``z_var`` across the monomials of ``p``.

    ``pure_min`` is the least d >= 1 such that ``z_var^d`` occurs with no other
    variable; ``min_positive`` the least positive exponent of z_var over all
    monomials; ``max_below(b)`` the largest such exponent that is <= b (0 if none).
    """
    if not 0 <= var < p.n_vars:
        raise IndexError(f"variable index {var} out of range")
    pure = []
    positive = []
    for exps in p._terms:
        e = exps[var]
        if e == 0:
            continue
        positive.append(e)
        if all(x == 0 for i, x in enumerate(exps) if i != var):
            pure.append(e)
    return SupportOrders(
        pure_min=min(pure, default=None),
        min_positive=min(positive, default=None),
        _exponents=tuple(sorted(set(positive))),
    )


# --- vectorized floating evaluation --------------------------------------


class CompiledPolynomial:
    """Float snapshot of a polynomial for batched evaluation with numpy."""

    __slots__ = ("n_vars", "exps", "coeffs", "max_deg")

    def __init__(self, p: Polynomial):
        self.n_vars = p.n_vars
        items = sorted(p.items())
        if items:
            self.exps = np.array([e for e, _ in items], dtype=np.int64)
            self.coeffs = np.array([complex(c) for _, c in items], dtype=np.complex128)
        else:
            self.exps = np.zeros((0, p.n_vars), dtype=np.int64)
            self.coeffs = np.zeros(0, dtype=np.complex128)
        self.max_deg = self.exps.max(axis=0) if len(items) else np.zeros(p.n_vars, dtype=np.int64)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        """Evaluate at points ``z`` of shape (N, n_vars); returns shape (N,)."""
        z = np.asarray(z, dtype=np.complex128)
        n_pts = z.shape[0]
        if not len(self.coeffs):
            return np.zeros(n_pts, dtype=np.complex128)
        mono = np.ones((n_pts, len(self.coeffs)), dtype=np.complex128)
        for i in range(self.n_vars):
            d = int(self.max_deg[i])
            if d == 0:
                continue
            table = np.empty((n_pts, d + 1), dtype=np.complex128)
            table[:, 0] = 1.0
            for k in range(1, d + 1):
                table[:, k] = table[:, k - 1] * z[:, i]
            mono *= table[:, self.exps[:, i]]
        return mono @ self.coeffs

    def abs_bound(self, radius: float) -> float:
        """Upper bound for |p| on the closed polydisc of the given radius."""
        if not len(self.coeffs):
            return 0.0
        return float(np.sum(np.abs(self.coeffs) * radius ** self.exps.sum(axis=1)))

