"""Univariate polynomials with exact rational coefficients.

These carry the per-vector annihilators and the matrix minimal polynomial.
Coefficients are stored lowest degree first; the zero polynomial is the empty
coefficient tuple (degree -1). General arithmetic preserves leading
coefficients; only gcd/lcm (and the minimal polynomial built on them) are
normalized monic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import ShapeError
from .scalars import format_rational

Scalar = Union[int, Fraction]


def _coerce(values: Iterable[Scalar]) -> tuple[Fraction, ...]:
    coeffs = [Fraction(v) for v in values]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Polynomial:
    """Immutable polynomial over the rationals, lowest-degree-first coefficients."""

    coefficients: tuple[Fraction, ...]

    def __init__(self, coefficients: Iterable[Scalar] = ()):
        object.__setattr__(self, "coefficients", _coerce(coefficients))

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, *roots: Scalar) -> "Polynomial":
        """Monic product of (x - r) over the given roots."""
        p = cls.one()
        for r in roots:
            p = p * cls((-Fraction(r), 1))
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return self.coefficients[-1]

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coefficients):
            return self.coefficients[k]
        return Fraction(0)

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        lead = self.leading
        return Polynomial(c / lead for c in self.coefficients)

    def __bool__(self) -> bool:
        return not self.is_zero

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return Polynomial(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coefficients)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero or other.is_zero:
            return Polynomial.zero()
        a, b = self.coefficients, other.coefficients
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Polynomial(out)

    def scale(self, factor: Scalar) -> "Polynomial":
        return Polynomial(Fraction(factor) * c for c in self.coefficients)

    def __divmod__(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Exact long division: self = other * quot + rem, deg(rem) < deg(other)."""
        if other.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coefficients)
        div = other.coefficients
        dq = len(rem) - len(div)
        if dq < 0:
            return Polynomial.zero(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = div[-1]
        for k in range(dq, -1, -1):
            factor = rem[k + len(div) - 1] / lead
            quot[k] = factor
            for i, c in enumerate(div):
                rem[k + i] -= factor * c
        return Polynomial(quot), Polynomial(rem)

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[1]

    def divides(self, other: "Polynomial") -> bool:
        if self.is_zero:
            return other.is_zero
        return (other % self).is_zero

    def __call__(self, value):
        """Horner evaluation; exact for int/Fraction, numeric for float/complex."""
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            exact = Fraction(0)
            for c in reversed(self.coefficients):
                exact = exact * value + c
            return exact
        if isinstance(value, complex):
            acc = 0j
            for c in reversed(self.coefficients):
                acc = acc * value + complex(float(c))
            return acc
        out = 0.0
        for c in reversed(self.coefficients):
            out = out * value + float(c)
        return out

    def __str__(self) -> str:
        return format_poly(self)


def poly_gcd_lcm(p: Polynomial, q: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Monic gcd and lcm; gcd * lcm equals the monic normalization of p*q."""
    if p.is_zero and q.is_zero:
        raise ZeroDivisionError("gcd of two zero polynomials")
    a, b = p, q
    while not b.is_zero:
        a, b = b, a % b
    gcd = a.monic()
    if p.is_zero or q.is_zero:
        return gcd, Polynomial.zero()
    lcm = ((p // gcd) * q).monic()
    return gcd, lcm


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    return poly_gcd_lcm(p, q)[0]


def poly_lcm(p: Polynomial, q: Polynomial) -> Polynomial:
    return poly_gcd_lcm(p, q)[1]


def poly_eval_matrix(p: Polynomial, matrix):
    """Evaluate p(A) by the Horner recurrence: at most deg(p) matrix products.

    Exact for rational matrices; float matrices get float-converted
    coefficients.
    """
    from .matrix import Matrix  # local import: matrix never imports poly

    if matrix.rows != matrix.cols:
        raise ShapeError(f"p(A) needs a square matrix, got {matrix.rows}x{matrix.cols}")
    n = matrix.rows
    rational = matrix.domain == "rational"

    def scalar(c: Fraction):
        return c if rational else float(c)

    if p.is_zero:
        return Matrix.zeros(n, n, domain=matrix.domain)
    coeffs = p.coefficients
    result = Matrix.identity(n, domain=matrix.domain).scale(scalar(coeffs[-1]))
    for c in reversed(coeffs[:-1]):
        result = result @ matrix
        if c != 0:
            result = result + Matrix.identity(n, domain=matrix.domain).scale(scalar(c))
    return result


def format_poly(p: Polynomial) -> str:
    """Display form like "x^2 - 5x + 6", highest degree first."""
    if p.is_zero:
        return "0"
    parts: list[str] = []
    for k in range(p.degree, -1, -1):
        c = p.coefficient(k)
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = format_rational(mag)
        else:
            x = "x" if k == 1 else f"x^{k}"
            body = x if mag == 1 else f"{format_rational(mag)}{x}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)
