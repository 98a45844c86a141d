"""Recovering a hauptmodul from its Q-value via Frobenius series.

At z = 0 the equation 4 z^2 y'' + G(z) y = 0 with G = 4 z^2 Q = N/M, G(0) = 1,
has the indicial equation 4 r(r-1) + 1 = 0 with double root 1/2.  The basis is

    y1 = z^{1/2} h(z),                 h(0) = 1,
    y2 = y1 log z + z^{1/2} k(z),      k(0) = 0,

and substituting the ansatz gives the coefficient recursions

    4 n^2 h_n = - sum_{j=1}^{n} g_j h_{n-j}
    4 n^2 k_n = - sum_{j=1}^{n} g_j k_{n-j} - 8 n h_n.

The z^{1/2} prefactor is never materialized: the ratio y2/y1 = log z + k/h
eliminates it, and the uniformizing coordinate is q(z) = z exp(k/h), a plain
power series with unit leading coefficient (the k(0) = 0 gauge pins the
additive freedom y2 -> y2 + lambda*y1).  Reverting q(z) and taking the
reciprocal recovers the modular function t(q) = q^{-1} + c + O(q).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import RationalFunction
from .schwarzfit import QValue
from .series import LaurentSeries, derivative, exp_series, revert

__all__ = [
    "FrobeniusBasis",
    "normalize_to_q",
    "frobenius_log_basis",
    "ratio_exponential",
    "recover_hauptmodul",
    "basis_residual",
]


@dataclass(frozen=True)
class FrobeniusBasis:
    """Unit parts of the solution basis and the uniformizing coordinate.

    h is the unit series of y1 = z^{1/2} h; k the non-log unit part of
    y2 = y1 log z + z^{1/2} k; q_of_z = z exp(k/h).
    """

    h: LaurentSeries
    k: LaurentSeries
    q_of_z: LaurentSeries


def normalize_to_q(p: RationalFunction, r: RationalFunction) -> RationalFunction:
    """Potential of the normal form y'' + Q y = 0 of y'' + p y' + r y = 0.

    Substituting y = g f with g = exp(-1/2 int p) removes the first-order
    term and leaves Q = r - p^2/4 - p'/2.
    """
    return r - (p * p) * Fraction(1, 4) - p.derivative() * Fraction(1, 2)


def frobenius_log_basis(q_value: QValue, order: int) -> FrobeniusBasis:
    """Solution basis of 4 z^2 y'' + G y = 0 at z = 0, G = N/M expanded to `order`."""
    g = q_value.indicial_series(order)
    if g.truncation_order < 1 or g.coeff(0) != 1:
        raise ValueError("indicial series must start with constant 1")
    gc = {n: g.coeff(n) for n in range(1, g.truncation_order) if g.coeff(n)}
    n_terms = g.truncation_order
    h = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
    k = [Fraction(0)] * n_terms
    for n in range(1, n_terms):
        sh = Fraction(0)
        sk = Fraction(0)
        for j, gj in gc.items():
            if j > n:
                continue
            if h[n - j]:
                sh += gj * h[n - j]
            if k[n - j]:
                sk += gj * k[n - j]
        h[n] = -sh / (4 * n * n)
        k[n] = (-sk - 8 * n * h[n]) / (4 * n * n)
    h_series = LaurentSeries(0, h, n_terms)
    k_series = LaurentSeries(0, k, n_terms)
    return FrobeniusBasis(h_series, k_series, ratio_exponential_parts(h_series, k_series))


def ratio_exponential_parts(h: LaurentSeries, k: LaurentSeries) -> LaurentSeries:
    """q(z) = z exp(k/h) from the unit parts of the basis."""
    if h.coeff(0) != 1 or (not k.is_zero() and k.valuation < 1):
        raise ValueError("need h(0) = 1 and k(0) = 0")
    return exp_series(k / h).shift(1)


def ratio_exponential(basis: FrobeniusBasis) -> LaurentSeries:
    """The uniformizing coordinate q(z) = z exp(k/h) of a basis."""
    return ratio_exponential_parts(basis.h, basis.k)


def recover_hauptmodul(q_value: QValue, order: int) -> LaurentSeries:
    """t(q) = q^{-1} + c + O(q) whose uniformizing equation has the given Q-value.

    The chain is: Frobenius basis, q(z) = z exp(k/h), series reversion to
    z(q), reciprocal.  Coefficients a(-1)..a(order) are exact.
    """
    work = order + 4
    basis = frobenius_log_basis(q_value, work)
    z_of_q = revert(basis.q_of_z)
    t = z_of_q.inverse()
    return t.truncate(order + 1)


def basis_residual(q_value: QValue, basis: FrobeniusBasis, which: str = "h") -> LaurentSeries:
    """Residual of 4 z^2 y'' + G y for a basis element, as a series in z.

    For y1 = z^{1/2} h the residual is z^{1/2} (4 z^2 h'' + 4 z h' - h + G h),
    reported without the z^{1/2} prefactor.  For y2 the log z terms multiply
    exactly the y1 residual and cancel once y1 solves the equation; what
    remains is the same operator applied to k plus the cross term 8 z h'.
    """
    u = basis.h if which == "h" else basis.k
    g = q_value.indicial_series(u.truncation_order)
    z2_upp = derivative(derivative(u)).shift(2) * 4
    z_up = derivative(u).shift(1) * 4
    resid = z2_upp + z_up - u + g * u
    if which == "k":
        resid = resid + 8 * derivative(basis.h).shift(1)
    return resid
