"""Exact scalars, dense polynomials, rational functions, and nullspace extraction.

Every computation in this package runs over exact rationals.  The scalar type
is ``fractions.Fraction`` (arbitrary-precision reduced fraction, positive
denominator), re-exported here as ``ExactRational``.  Polynomials are dense
coefficient tuples indexed by degree; the degrees occurring in practice stay
small (<= ~36) while the coefficients grow huge, so dense storage with big
rationals is the right trade.

The homogeneous solver ``nullspace`` performs fraction-free elimination on an
integer-scaled copy of the matrix, selecting pivots of small magnitude and
dividing rows by their integer content after each step to keep entry growth
under control on the few-hundred-equation fit systems.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd, isqrt
from typing import Iterable, Sequence

ExactRational = Fraction

Scalar = Fraction | int


def rational_canonicalize(n: int, d: int) -> Fraction:
    """Reduced fraction n/d with positive denominator; zero is 0/1."""
    if d == 0:
        raise ZeroDivisionError("division by zero")
    return Fraction(n, d)


class Polynomial:
    """Dense polynomial over ExactRational, trailing zeros trimmed.

    Immutable; ``coeffs[i]`` is the coefficient of z^i.  The zero polynomial
    has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def from_ints(cls, coeffs: Iterable[int]) -> Polynomial:
        return cls(coeffs)

    @classmethod
    def constant(cls, c: Scalar) -> Polynomial:
        return cls([c])

    @classmethod
    def monomial(cls, c: Scalar, degree: int) -> Polynomial:
        return cls([0] * degree + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: Polynomial) -> Polynomial:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __neg__(self) -> Polynomial:
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other: Polynomial | Scalar) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            return Polynomial([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        """Euclidean division: self = q*other + r with deg r < deg other."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.coeffs[-1]
        q = [Fraction(0)] * max(0, len(rem) - d)
        for i in range(len(rem) - 1, d - 1, -1):
            if rem[i] == 0:
                continue
            f = rem[i] / lead
            q[i - d] = f
            for j, b in enumerate(other.coeffs):
                rem[i - d + j] -= f * b
        return Polynomial(q), Polynomial(rem)

    def __mod__(self, other: Polynomial) -> Polynomial:
        return self.divmod(other)[1]

    def derivative(self) -> Polynomial:
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> Polynomial:
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Polynomial([c / lead for c in self.coeffs])

    def scaled_to_integers(self) -> tuple[Polynomial, Fraction]:
        """Return (p, s) with p = s * self, p having coprime integer coeffs.

        The zero polynomial returns itself with scale 1.  Sign convention:
        p keeps the sign of self (s > 0).
        """
        if self.is_zero():
            return self, Fraction(1)
        den_lcm = 1
        for c in self.coeffs:
            den_lcm = den_lcm * c.denominator // _int_gcd(den_lcm, c.denominator)
        ints = [int(c * den_lcm) for c in self.coeffs]
        g = 0
        for v in ints:
            g = _int_gcd(g, abs(v))
        s = Fraction(den_lcm, g)
        return Polynomial([v // g for v in ints]), s

    def int_coeffs(self) -> list[int]:
        """Coefficients as ints; raises if any denominator is not 1."""
        out = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise ValueError(f"non-integer coefficient {c}")
            out.append(c.numerator)
        return out

    def __repr__(self) -> str:
        if self.is_zero():
            return "Polynomial(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{i}")
        return "Polynomial(" + " + ".join(terms) + ")"


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic greatest common divisor by the Euclidean algorithm."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials")
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_sqrt(p: Polynomial) -> Polynomial | None:
    """Exact square root of p with positive constant term, or None.

    Used to display fitted denominators in squared form where possible.
    Requires p(0) > 0 for a candidate to exist with b0 > 0.
    """
    if p.is_zero():
        return Polynomial()
    d = p.degree
    if d % 2 != 0 or p.coeff(0) <= 0:
        return None
    num_root = _frac_sqrt(p.coeff(0))
    if num_root is None:
        return None
    b = [num_root]
    h = d // 2
    for n in range(1, h + 1):
        s = sum(b[i] * b[n - i] for i in range(1, n) if n - i <= h and i < len(b))
        bn = (p.coeff(n) - s) / (2 * b[0])
        b.append(bn)
    cand = Polynomial(b)
    if cand * cand == p:
        return cand
    return None


def _frac_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    rn = isqrt(x.numerator)
    rd = isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


class RationalFunction:
    """Quotient of polynomials, reduced, denominator's lowest nonzero coefficient positive."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not num.is_zero():
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        low = next((c for c in den.coeffs if c != 0), Fraction(1))
        if low < 0:
            num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> RationalFunction:
        return cls(p, Polynomial([1]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return ratfunc_equal(self, other)

    def __hash__(self) -> int:
        n, _ = self.num.scaled_to_integers() if not self.num.is_zero() else (self.num, 1)
        d, _ = self.den.scaled_to_integers()
        return hash((n.coeffs, d.coeffs))

    def __add__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other: RationalFunction | Scalar) -> RationalFunction:
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.num * other, self.den)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: RationalFunction) -> RationalFunction:
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def derivative(self) -> RationalFunction:
        # (n/d)' = (n'd - nd')/d^2
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!r}, {self.den!r})"


def ratfunc_equal(f: RationalFunction, g: RationalFunction) -> bool:
    """True iff f.num*g.den equals g.num*f.den as polynomials."""
    return f.num * g.den == g.num * f.den


def nullspace(rows: Sequence[Sequence[Scalar]]) -> list[list[Fraction]]:
    """Exact basis of the right nullspace of a rectangular matrix.

    Returns one vector per free column, each normalized so its first nonzero
    entry is 1, ordered by free-column index.  Empty list when the matrix has
    full column rank.  Raises ValueError on ragged input.

    Elimination is fraction-free: rows are scaled to coprime integers; pivots
    are chosen by least absolute value in the pivot column; after each
    elimination step rows are divided by their content.
    """
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    for r in rows:
        if len(r) != n:
            raise ValueError("ragged matrix")
    if n == 0:
        return []

    imat: list[list[int]] = []
    for r in rows:
        fr = [Fraction(x) for x in r]
        den_lcm = 1
        for x in fr:
            den_lcm = den_lcm * x.denominator // _int_gcd(den_lcm, x.denominator)
        iv = [int(x * den_lcm) for x in fr]
        g = 0
        for v in iv:
            g = _int_gcd(g, abs(v))
        if g > 1:
            iv = [v // g for v in iv]
        imat.append(iv)

    piv_rows: list[int] = []
    piv_cols: list[int] = []
    rr = 0
    for col in range(n):
        best = -1
        for i in range(rr, m):
            v = imat[i][col]
            if v != 0 and (best < 0 or abs(v) < abs(imat[best][col])):
                best = i
        if best < 0:
            continue
        imat[rr], imat[best] = imat[best], imat[rr]
        pv = imat[rr][col]
        for i in range(rr + 1, m):
            vi = imat[i][col]
            if vi == 0:
                continue
            row = imat[i]
            prow = imat[rr]
            g = _int_gcd(abs(pv), abs(vi))
            a = pv // g
            b = vi // g
            new = [a * row[j] - b * prow[j] for j in range(n)]
            cg = 0
            for v in new:
                cg = _int_gcd(cg, abs(v))
            if cg > 1:
                new = [v // cg for v in new]
            imat[i] = new
        piv_cols.append(col)
        rr += 1
        if rr == m:
            break

    free_cols = [c for c in range(n) if c not in piv_cols]
    basis: list[list[Fraction]] = []
    for fc in free_cols:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        # back-substitute over the echelon rows, bottom-up
        for i in range(len(piv_cols) - 1, -1, -1):
            pc = piv_cols[i]
            s = Fraction(0)
            row = imat[i]
            for c in range(pc + 1, n):
                if row[c] != 0 and v[c] != 0:
                    s += row[c] * v[c]
            v[pc] = -s / row[pc]
        first = next(x for x in v if x != 0)
        basis.append([x / first for x in v])
    return basis


def matrix_rank(rows: Sequence[Sequence[Scalar]]) -> int:
    """Rank of a rectangular matrix over the rationals."""
    if not rows:
        return 0
    n = len(rows[0])
    return n - len(nullspace(rows))
