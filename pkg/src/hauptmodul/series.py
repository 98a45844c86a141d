"""Truncated formal Laurent series over exact rationals.

A series is stored as a leading exponent, a contiguous block of coefficients,
and a truncation order: coefficients of q^n for n >= truncation_order are
*unknown*, not zero.  Every operation computes the provable truncation order
of its result from its inputs, so a coefficient is never reported unless the
inputs determine it.  The bookkeeping is pessimistic and explicit:

* ``f * g`` is known through min(ord(f) + val(g), ord(g) + val(f));
* ``f / g`` loses val(g) orders;
* ``derivative`` loses one order;
* ``compose(f, g)`` with val(g) = v is known through min(v*ord(f), ord(g)).

All values are immutable and all operations pure.  Series with a genuine
log q term are deliberately not representable here; the frobenius module
carries the logarithmic part structurally as a separate field.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import Polynomial, Scalar

__all__ = [
    "LaurentSeries",
    "arith",
    "derivative",
    "compose",
    "exp_series",
    "log_series",
    "revert",
    "schwarzian",
]


class LaurentSeries:
    """Laurent series sum_{n >= lead} c_n q^n with coefficients known for n < truncation_order."""

    __slots__ = ("lead", "coeffs", "truncation_order")

    def __init__(self, lead: int, coeffs: Iterable[Scalar], truncation_order: int):
        cs = [Fraction(c) for c in coeffs]
        keep = max(0, truncation_order - lead)
        del cs[keep:]
        while len(cs) < keep:
            cs.append(Fraction(0))
        while cs and cs[0] == 0:
            cs.pop(0)
            lead += 1
        if not cs:
            lead = truncation_order
        object.__setattr__(self, "lead", lead)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "truncation_order", truncation_order)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentSeries is immutable")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, order: int) -> LaurentSeries:
        return cls(order, (), order)

    @classmethod
    def one(cls, order: int) -> LaurentSeries:
        return cls.monomial(1, 0, order)

    @classmethod
    def q(cls, order: int) -> LaurentSeries:
        """The identity series q."""
        return cls.monomial(1, 1, order)

    @classmethod
    def monomial(cls, c: Scalar, exponent: int, order: int) -> LaurentSeries:
        if order <= exponent:
            raise ValueError("truncation order must exceed the exponent")
        return cls(exponent, [c], order)

    @classmethod
    def from_terms(cls, terms: Mapping[int, Scalar], order: int) -> LaurentSeries:
        """Series with the given exponent -> coefficient map, exact below `order`."""
        terms = {e: c for e, c in terms.items() if e < order}
        if not terms:
            return cls.zero(order)
        lo = min(terms)
        cs = [Fraction(0)] * (order - lo)
        for e, c in terms.items():
            cs[e - lo] = Fraction(c)
        return cls(lo, cs, order)

    @classmethod
    def from_polynomial(cls, p: Polynomial, order: int) -> LaurentSeries:
        """p(q) as a series, exact through `order`."""
        return cls(0, p.coeffs, order)

    # ------------------------------------------------------------------
    # inspection

    def is_zero(self) -> bool:
        """Identically zero as far as the truncation order knows."""
        return not self.coeffs

    @property
    def valuation(self) -> int:
        """Exponent of the first nonzero known term (= truncation order when none)."""
        return self.lead

    def coeff(self, n: int) -> Fraction:
        if n >= self.truncation_order:
            raise ValueError(
                f"coefficient of q^{n} is beyond the truncation order {self.truncation_order}"
            )
        if n < self.lead:
            return Fraction(0)
        return self.coeffs[n - self.lead]

    def coeff_range(self, lo: int, hi: int) -> list[Fraction]:
        """Coefficients of q^lo .. q^{hi-1}."""
        return [self.coeff(n) for n in range(lo, hi)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.lead == other.lead
            and self.coeffs == other.coeffs
            and self.truncation_order == other.truncation_order
        )

    def __hash__(self) -> int:
        return hash((self.lead, self.coeffs, self.truncation_order))

    def agrees_with(self, other: LaurentSeries) -> bool:
        """Coefficient-wise equality over the common known range."""
        hi = min(self.truncation_order, other.truncation_order)
        lo = min(self.lead, other.lead)
        return all(self.coeff(n) == other.coeff(n) for n in range(lo, hi))

    def truncate(self, order: int) -> LaurentSeries:
        if order > self.truncation_order:
            raise ValueError("cannot extend the known range by truncation")
        if order == self.truncation_order:
            return self
        return LaurentSeries(self.lead, self.coeffs, order)

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            e = self.lead + i
            if e == 0:
                terms.append(f"{c}")
            elif e == 1:
                terms.append(f"{c}*q")
            else:
                terms.append(f"{c}*q^{e}")
            if len(terms) == 8:
                terms.append("...")
                break
        body = " + ".join(terms) if terms else "0"
        return f"<{body} + O(q^{self.truncation_order})>"

    # ------------------------------------------------------------------
    # ring operations

    def __add__(self, other: LaurentSeries | Scalar) -> LaurentSeries:
        if isinstance(other, (int, Fraction)):
            if other == 0 or self.truncation_order <= 0:
                return self
            other = LaurentSeries.monomial(other, 0, self.truncation_order)
        order = min(self.truncation_order, other.truncation_order)
        lo = min(self.lead, other.lead, order)
        cs = [Fraction(0)] * (order - lo)
        for i, c in enumerate(self.coeffs):
            e = self.lead + i
            if e < order:
                cs[e - lo] += c
        for i, c in enumerate(other.coeffs):
            e = other.lead + i
            if e < order:
                cs[e - lo] += c
        return LaurentSeries(lo, cs, order)

    __radd__ = __add__

    def __neg__(self) -> LaurentSeries:
        return LaurentSeries(self.lead, [-c for c in self.coeffs], self.truncation_order)

    def __sub__(self, other: LaurentSeries | Scalar) -> LaurentSeries:
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> LaurentSeries:
        return (-self) + other

    def __mul__(self, other: LaurentSeries | Scalar) -> LaurentSeries:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return LaurentSeries.zero(self.truncation_order)
            return LaurentSeries(
                self.lead, [c * other for c in self.coeffs], self.truncation_order
            )
        # For a series that is zero to truncation, lead equals the truncation
        # order, which keeps this formula correct in the degenerate case.
        order = min(self.truncation_order + other.lead, other.truncation_order + self.lead)
        lo = self.lead + other.lead
        n_out = order - lo
        if n_out <= 0:
            return LaurentSeries.zero(order)
        out = [Fraction(0)] * n_out
        gc = other.coeffs
        for i, a in enumerate(self.coeffs):
            if a == 0 or i >= n_out:
                continue
            jmax = min(len(gc), n_out - i)
            for j in range(jmax):
                b = gc[j]
                if b:
                    out[i + j] += a * b
        return LaurentSeries(lo, out, order)

    __rmul__ = __mul__

    def __truediv__(self, other: LaurentSeries | Scalar) -> LaurentSeries:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return LaurentSeries(
                self.lead, [c / other for c in self.coeffs], self.truncation_order
            )
        return self * other.inverse()

    def inverse(self) -> LaurentSeries:
        """Multiplicative inverse; the series must not be zero to truncation."""
        if self.is_zero():
            raise ZeroDivisionError("division by a series that is zero to its truncation order")
        u = self.coeffs
        n = len(u)
        u0 = u[0]
        inv = [Fraction(1) / u0]
        for k in range(1, n):
            s = Fraction(0)
            for j in range(1, k + 1):
                if u[j]:
                    s += u[j] * inv[k - j]
            inv.append(-s / u0)
        # self = q^lead * unit with (order - lead) known unit terms; the
        # inverse unit is known to the same relative depth.
        return LaurentSeries(-self.lead, inv, self.truncation_order - 2 * self.lead)

    def __pow__(self, n: int) -> LaurentSeries:
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return LaurentSeries.one(max(1, self.truncation_order))
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def shift(self, k: int) -> LaurentSeries:
        """Multiply by q^k."""
        return LaurentSeries(self.lead + k, self.coeffs, self.truncation_order + k)


def arith(kind: str, f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    """Dispatch add/sub/mul/div; the operators are the idiomatic surface."""
    if kind == "add":
        return f + g
    if kind == "sub":
        return f - g
    if kind == "mul":
        return f * g
    if kind == "div":
        return f / g
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def derivative(f: LaurentSeries) -> LaurentSeries:
    """Termwise d/dq; the truncation order drops by one."""
    cs = [Fraction(f.lead + i) * c for i, c in enumerate(f.coeffs)]
    return LaurentSeries(f.lead - 1, cs, f.truncation_order - 1)


def compose(f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    """f(g(q)) for a power series f and a series g of valuation >= 1."""
    v = g.valuation
    if v < 1:
        raise ValueError("inner series must have valuation >= 1")
    if f.lead < 0:
        raise ValueError("outer series must be a power series (no pole part)")
    order = min(v * f.truncation_order, g.truncation_order)
    gg = g.truncate(order) if g.truncation_order > order else g
    acc = LaurentSeries.zero(order)
    # Horner from the top known coefficient down; trailing factors of g cover
    # a positive valuation of f.
    for e in range(f.truncation_order - 1, f.lead - 1, -1):
        if not acc.is_zero():
            acc = acc * gg
            if acc.truncation_order > order:
                acc = acc.truncate(order)
        c = f.coeff(e)
        if c:
            acc = acc + c
    for _ in range(f.lead):
        if acc.is_zero():
            break
        acc = acc * gg
        if acc.truncation_order > order:
            acc = acc.truncate(order)
    return acc


def exp_series(f: LaurentSeries) -> LaurentSeries:
    """exp(f) for a series with zero constant term and no pole part.

    Computed through the defining relation e' = f'e, which fixes each
    coefficient from earlier ones; equals sum f^n/n! to truncation.
    """
    if not f.is_zero() and f.valuation < 1:
        raise ValueError("exp requires valuation >= 1 (zero constant term, no pole)")
    order = f.truncation_order
    if order < 1:
        raise ValueError("truncation order too small to determine exp")
    e = [Fraction(1)] + [Fraction(0)] * (order - 1)
    fc = {f.lead + i: c for i, c in enumerate(f.coeffs) if c}
    for n in range(1, order):
        s = Fraction(0)
        for j, cj in fc.items():
            if 1 <= j <= n:
                s += j * cj * e[n - j]
        e[n] = s / n
    return LaurentSeries(0, e, order)


def log_series(f: LaurentSeries) -> LaurentSeries:
    """log(f) for a series with constant term exactly 1."""
    if f.truncation_order < 1 or f.lead < 0 or f.coeff(0) != 1:
        raise ValueError("log requires constant term 1")
    order = f.truncation_order
    fc = {i + f.lead: c for i, c in enumerate(f.coeffs) if c}
    u = [Fraction(0)] * order
    # u' = f'/f  =>  n*u_n = n*f_n - sum_{j=1}^{n-1} j*u_j*f_{n-j}
    for n in range(1, order):
        s = Fraction(n) * fc.get(n, Fraction(0))
        for j in range(1, n):
            if u[j]:
                c = fc.get(n - j)
                if c:
                    s -= j * u[j] * c
        u[n] = s / n
    return LaurentSeries(0, u, order)


def revert(f: LaurentSeries) -> LaurentSeries:
    """Compositional inverse of f = c1*q + ... with c1 != 0.

    Newton iteration on the composition equation, doubling the settled order
    each step: g <- g - (f(g) - q)/f'(g).  The inverse's coefficient of q^n
    depends only on f's coefficients through q^n, so the result is known to
    f's own truncation order.
    """
    if f.is_zero() or f.valuation != 1:
        raise ValueError("reversion requires valuation exactly 1 and a nonzero linear term")
    order = f.truncation_order
    c1 = f.coeff(1)
    g = LaurentSeries(1, [1 / c1], 2)
    settled = 2
    while settled < order:
        settled = min(2 * settled - 1, order)
        gw = LaurentSeries(1, g.coeffs, settled)
        fg = compose(f.truncate(settled), gw)
        resid = fg - LaurentSeries.q(settled)
        if resid.is_zero():
            g = gw
            continue
        fp = derivative(f.truncate(min(order, settled + 1)))
        fpg = compose(fp, gw)
        g = LaurentSeries(1, (gw - resid / fpg).coeffs, settled)
    return LaurentSeries(1, g.coeffs, order)


def schwarzian(w: LaurentSeries) -> LaurentSeries:
    """Schwarzian derivative {w, q} = w'''/w' - (3/2)(w''/w')^2."""
    w1 = derivative(w)
    if w1.is_zero():
        raise ValueError("Schwarzian undefined: w' vanishes to truncation order")
    w2 = derivative(w1)
    w3 = derivative(w2)
    a = w3 / w1
    b = w2 / w1
    return a - Fraction(3, 2) * (b * b)
