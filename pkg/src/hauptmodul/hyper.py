"""Gauss hypergeometric series and the Q-value of the Gauss equation.

The 2F1 coefficients are generated by the ratio recursion
a_{n+1} = (n+a)(n+b) / ((n+1)(n+c)) * a_n, so successive coefficients satisfy
it exactly by construction; the closed Pochhammer form is what the tests
check against.  Parameters are exact rationals: every downstream use is
rational, and complex parameters would force inexact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Polynomial, RationalFunction, Scalar
from .series import LaurentSeries

__all__ = ["HypergeometricParams", "pochhammer", "hypergeometric_series", "gauss_q"]


def _is_nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


@dataclass(frozen=True)
class HypergeometricParams:
    """Parameter triple (a, b, c) of the Gauss equation.

    c must not be zero or a negative integer, otherwise the series is
    undefined; such c is rejected rather than regularized.
    """

    a: Fraction
    b: Fraction
    c: Fraction

    def __init__(self, a: Scalar, b: Scalar, c: Scalar):
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        if _is_nonpositive_integer(c):
            raise ValueError("parameter c must not be zero or a negative integer")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)


def pochhammer(a: Scalar, n: int) -> Fraction:
    """Rising factorial (a)_n = a(a+1)...(a+n-1), with (a)_0 = 1."""
    if n < 0:
        raise ValueError("pochhammer requires n >= 0")
    a = Fraction(a)
    out = Fraction(1)
    for k in range(n):
        out *= a + k
    return out


def hypergeometric_series(p: HypergeometricParams, a0: Scalar = 1, order: int = 16) -> LaurentSeries:
    """2F1(a, b; c; z) * a0 as a power series through z^{order-1}."""
    if order < 1:
        raise ValueError("order must be >= 1")
    a, b, c = p.a, p.b, p.c
    coeffs = [Fraction(a0)]
    for n in range(order - 1):
        ratio = (n + a) * (n + b) / ((n + 1) * (n + c))
        coeffs.append(coeffs[-1] * ratio)
    return LaurentSeries(0, coeffs, order)


def gauss_q(p: HypergeometricParams) -> RationalFunction:
    """Q-value of the Gauss equation after normalizing away the first-order term.

    Q(z) = [-c^2 + z(2ab(z-2) + z - a^2 z - b^2 z) + 2c(1 + (a+b-1)z)]
           / (4 (z-1)^2 z^2),
    returned gcd-reduced.  Symmetric in a and b.
    """
    a, b, c = p.a, p.b, p.c
    num = Polynomial(
        [
            2 * c - c * c,
            2 * c * (a + b - 1) - 4 * a * b,
            2 * a * b + 1 - a * a - b * b,
        ]
    )
    den = 4 * (Polynomial([-1, 1]) ** 2) * Polynomial([0, 0, 1])
    return RationalFunction(num, den)
