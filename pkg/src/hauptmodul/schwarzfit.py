"""Fitting the rational Q-value of a hauptmodul's uniformizing ODE.

A genus-zero function t(q) = q^{-1} + 0 + O(q) determines, in the coordinate
z = 1/t, a second-order equation y'' + Q(z) y = 0 whose ratio of solutions
inverts the uniformization.  Writing w = log q and using the Schwarzian chain
rule {w, q} = ({w, z} o z) z'^2 + {z, q} together with {w, z} = 2 Q(z) and
{log q, q} = 1/(2 q^2), the Q-value satisfies the functional equation

    2 N(z(q)) z'(q)^2 = (1/(2 q^2) - {z, q}) * 4 z(q)^2 * M(z(q)),

where Q = N / (4 z^2 M) and both sides are genuine power series in q.  The
double indicial root 1/2 at z = 0 forces N(0) = M(0) (= 1 after scaling),
which is exactly the q^0 coefficient equation.

``fit_system`` equates coefficients of q^0..q^orders of that equation as a
homogeneous linear system in (b_0..b_r, c_0..c_s).  ``fit_qvalue`` searches
for the minimal degree profile (ordered by r+s, then r) whose system has a
one-dimensional nullspace and whose solution survives a guard band of extra
coefficient equations.  The search itself runs on an equivalent reduced
system: composing the equation with the inverse series q(z) and eliminating
the b-unknowns (each appears in exactly one triangular row) leaves

    sum_i c_i F_{j-i} = 0   for j = r+1 .. r+s+2,    F := series of N/M in z,

a small Toeplitz system with the same nullspace dimension.  The accepted
profile is re-validated against the literal fit_system matrix.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Polynomial, RationalFunction, nullspace, poly_gcd, poly_sqrt
from .moonshine import Registry, UnavailableClassError, extend_coefficients
from .series import LaurentSeries, compose, derivative, revert, schwarzian

__all__ = [
    "QValue",
    "FitReport",
    "FitError",
    "CorpusEntry",
    "VerifyRow",
    "hauptmodul_reciprocal",
    "series_from_table",
    "fit_system",
    "fit_hauptmodul_series",
    "fit_qvalue",
    "shift_constant",
    "functional_equation_residual",
    "load_corpus",
    "load_corpus_path",
    "default_corpus",
    "verify_corpus",
]


class FitError(Exception):
    """No admissible Q-value within the degree bounds, or insufficient data."""


class QValue:
    """Q(z) = N(z) / (4 z^2 M(z)) with N(0) = M(0) = 1 and gcd(N, M) = 1."""

    __slots__ = ("num", "den_core")

    def __init__(self, num: Polynomial, den_core: Polynomial):
        g = poly_gcd(num, den_core)
        if g.degree > 0:
            num = num.divmod(g)[0]
            den_core = den_core.divmod(g)[0]
        n0, m0 = num.coeff(0), den_core.coeff(0)
        if n0 == 0 or n0 != m0:
            raise ValueError("a Q-value needs N(0) = M(0) != 0 (double indicial root 1/2)")
        if n0 != 1:
            num = Polynomial([c / n0 for c in num.coeffs])
            den_core = Polynomial([c / m0 for c in den_core.coeffs])
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den_core", den_core)

    def __setattr__(self, name, value):
        raise AttributeError("QValue is immutable")

    @classmethod
    def from_rational_function(cls, rf: RationalFunction) -> QValue:
        """Interpret a rational function as N/(4 z^2 M); validates the shape."""
        den = rf.den
        if den.coeff(0) != 0 or den.coeff(1) != 0:
            raise ValueError("denominator is not divisible by z^2")
        core4 = Polynomial(den.coeffs[2:])
        m = Polynomial([c / 4 for c in core4.coeffs])
        return cls(rf.num, m)

    def as_rational_function(self) -> RationalFunction:
        den = Polynomial([0, 0, 4]) * self.den_core
        return RationalFunction(self.num, den)

    @property
    def degrees(self) -> tuple[int, int]:
        return self.num.degree, self.den_core.degree

    def indicial_series(self, order: int) -> LaurentSeries:
        """G = N/M = 4 z^2 Q as a power series in z, G(0) = 1."""
        n = LaurentSeries.from_polynomial(self.num, order)
        m = LaurentSeries.from_polynomial(self.den_core, order)
        return n / m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QValue):
            return NotImplemented
        return self.num * other.den_core == other.num * self.den_core

    def __hash__(self) -> int:
        return hash((self.num.coeffs, self.den_core.coeffs))

    def __repr__(self) -> str:
        return f"QValue(num={self.num!r}, den_core={self.den_core!r})"


@dataclass(frozen=True)
class FitReport:
    label: str | None
    qvalue: QValue
    r: int
    s: int
    orders_checked: int
    nullspace_dim: int
    square_factored: Polynomial | None

    @property
    def degrees(self) -> tuple[int, int]:
        return self.r, self.s


def series_from_table(coeffs, order: int) -> LaurentSeries:
    """t(q) = q^{-1} + sum a(n) q^n from a CoefficientTable or a(-1)..a(N) list."""
    cs = list(coeffs.coeffs) if hasattr(coeffs, "coeffs") else list(coeffs)
    return LaurentSeries(-1, cs, len(cs) - 1)


def hauptmodul_reciprocal(t: LaurentSeries) -> LaurentSeries:
    """z(q) = 1/t(q) for t = q^{-1} + 0 + O(q)."""
    if t.valuation != -1 or t.coeff(-1) != 1 or t.coeff(0) != 0:
        raise ValueError("wrong pole normalization: need t = q^{-1} + 0 + O(q)")
    return t.inverse()


def _fit_columns(
    z: LaurentSeries, r: int, s: int
) -> tuple[list[LaurentSeries], list[LaurentSeries]]:
    zp = derivative(z)
    u = 2 * (zp * zp)
    half_inv_q2 = LaurentSeries.monomial(Fraction(1, 2), -2, z.truncation_order)
    v = (half_inv_q2 - schwarzian(z)) * (4 * (z * z))
    b_cols, c_cols = [], []
    zpow = LaurentSeries.one(z.truncation_order)
    for i in range(max(r, s) + 1):
        if i <= r:
            b_cols.append(u * zpow)
        if i <= s:
            c_cols.append(v * zpow)
        zpow = zpow * z
    return b_cols, c_cols


def fit_system(z: LaurentSeries, r: int, s: int, orders: int) -> list[list[Fraction]]:
    """Homogeneous system in (b_0..b_r, c_0..c_s) from coefficients q^0..q^orders.

    Row n states that the q^n coefficient of
    2 N(z) z'^2 - (1/(2q^2) - {z, q}) 4 z^2 M(z) vanishes.
    """
    if z.is_zero() or z.valuation != 1:
        raise ValueError("z must have valuation 1")
    b_cols, c_cols = _fit_columns(z, r, s)
    for col in b_cols + c_cols:
        if col.truncation_order <= orders:
            raise FitError(
                f"insufficient series order: need q^{orders}, column known to {col.truncation_order}"
            )
    rows = []
    for n in range(orders + 1):
        rows.append([col.coeff(n) for col in b_cols] + [-col.coeff(n) for col in c_cols])
    return rows


def indicial_target_series(z: LaurentSeries, order: int) -> LaurentSeries:
    """F(z) = series of N/M in z, from the q-side data alone.

    F = [ (1/(2q^2) - {z, q}) * 2 z^2 / z'^2 ] composed with the inverse
    series q(z); this is 4 z^2 Q(z) expanded at z = 0.
    """
    zt = z if z.truncation_order <= order + 8 else z.truncate(order + 8)
    zp = derivative(zt)
    half_inv_q2 = LaurentSeries.monomial(Fraction(1, 2), -2, zt.truncation_order)
    s_q = (half_inv_q2 - schwarzian(zt)) * (2 * (zt * zt)) / (zp * zp)
    qz = revert(zt)
    f = compose(s_q, qz)
    if f.truncation_order <= order:
        raise FitError(
            f"insufficient series order: need F through z^{order}, got {f.truncation_order - 1}"
        )
    return f


def _profile_search(
    f: LaurentSeries, max_r: int, max_s: int, guard: int
) -> tuple[int, int, list[Fraction]]:
    fc = [f.coeff(n) for n in range(f.truncation_order)]
    zero = Fraction(0)
    for sigma in range(max_r + max_s + 1):
        for r in range(max(0, sigma - max_s), min(max_r, sigma) + 1):
            s = sigma - r
            top = sigma + 2 + guard
            if top >= len(fc):
                raise FitError("insufficient series order for the guard band")
            rows = [
                [fc[j - i] if j >= i else zero for i in range(s + 1)]
                for j in range(r + 1, sigma + 3)
            ]
            basis = nullspace(rows)
            if len(basis) != 1:
                continue
            c = basis[0]
            if c[0] == 0:
                continue
            c = [x / c[0] for x in c]
            ok = True
            for j in range(sigma + 3, top + 1):
                if sum(c[i] * fc[j - i] for i in range(s + 1)) != 0:
                    ok = False
                    break
            if ok:
                return r, s, c
    raise FitError("degrees exhausted")


def _dot(row: list[Fraction], vec: list[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(row, vec) if a and b), Fraction(0))


def fit_hauptmodul_series(
    t: LaurentSeries,
    max_r: int,
    max_s: int,
    label: str | None = None,
    guard: int = 40,
    revalidate: bool = True,
) -> FitReport:
    """Fit the Q-value of a hauptmodul series t = q^{-1} + c + O(q).

    The constant term of t need not be zero; the fit runs in z = 1/t either
    way.  `guard` is the number of coefficient equations checked beyond the
    base q^0..q^{r+s+2} system.
    """
    z = t.inverse()
    f = indicial_target_series(z, max_r + max_s + 3 + guard)
    r, s, c = _profile_search(f, max_r, max_s, guard)
    m_poly = Polynomial(c)
    n_coeffs = [
        sum((c[i] * f.coeff(j - i) for i in range(min(j, s) + 1)), Fraction(0))
        for j in range(r + 1)
    ]
    n_poly = Polynomial(n_coeffs)
    if poly_gcd(n_poly, m_poly).degree > 0:
        raise FitError("internal error: reducible solution at minimal degrees")
    qv = QValue(n_poly, m_poly)

    if revalidate:
        _revalidate_against_fit_system(z, qv, r, s, guard)

    square = poly_sqrt(qv.den_core)
    return FitReport(
        label=label,
        qvalue=qv,
        r=r,
        s=s,
        orders_checked=r + s + 2 + guard,
        nullspace_dim=1,
        square_factored=square,
    )


def _revalidate_against_fit_system(
    z: LaurentSeries, qv: QValue, r: int, s: int, guard: int
) -> None:
    """Check the reduced-search result against the literal functional-equation system."""
    orders = r + s + 2
    avail = min(orders + guard, z.truncation_order - s - 3)
    rows = fit_system(z, r, s, avail)
    vec = [qv.num.coeff(i) for i in range(r + 1)] + [qv.den_core.coeff(i) for i in range(s + 1)]
    for n, row in enumerate(rows):
        if _dot(row, vec) != 0:
            raise FitError(f"internal error: fitted Q-value fails the q^{n} equation")
    basis = nullspace(rows[: orders + 1])
    if len(basis) != 1:
        raise FitError(
            f"internal error: literal system nullity {len(basis)} != 1 at degrees ({r}, {s})"
        )


def fit_qvalue(
    registry: Registry,
    label: str,
    max_r: int = 40,
    max_s: int = 40,
    series_order: int = 300,
    guard: int = 40,
) -> FitReport:
    """Fit the Q-value of a registered class from its replication expansion."""
    needed = max_r + max_s + guard + 12
    if series_order < needed:
        raise FitError(
            f"insufficient series order {series_order}; degree bounds need >= {needed}"
        )
    label = registry.resolve(label)
    table = extend_coefficients(registry, label, series_order)
    t = series_from_table(table, series_order + 1)
    return fit_hauptmodul_series(t, max_r, max_s, label=label, guard=guard)


def shift_constant(
    registry: Registry,
    label: str,
    c,
    max_r: int = 40,
    max_s: int = 40,
    series_order: int = 300,
    guard: int = 40,
) -> FitReport:
    """Q-value of t + c for a registered class and a concrete rational constant c."""
    c = Fraction(c)
    needed = max_r + max_s + guard + 12
    if series_order < needed:
        raise FitError(
            f"insufficient series order {series_order}; degree bounds need >= {needed}"
        )
    label = registry.resolve(label)
    table = extend_coefficients(registry, label, series_order)
    t = series_from_table(table, series_order + 1) + c
    return fit_hauptmodul_series(t, max_r, max_s, label=label, guard=guard)


def functional_equation_residual(qv: QValue, z: LaurentSeries) -> LaurentSeries:
    """2 N(z) z'^2 - (1/(2q^2) - {z, q}) 4 z^2 M(z); zero series for the true Q."""
    zp = derivative(z)
    n_of_z = compose(LaurentSeries.from_polynomial(qv.num, z.truncation_order), z)
    m_of_z = compose(LaurentSeries.from_polynomial(qv.den_core, z.truncation_order), z)
    half_inv_q2 = LaurentSeries.monomial(Fraction(1, 2), -2, z.truncation_order)
    lhs = 2 * n_of_z * (zp * zp)
    rhs = (half_inv_q2 - schwarzian(z)) * (4 * (z * z)) * m_of_z
    return lhs - rhs


# ----------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusEntry:
    label: str
    num: Polynomial
    den_core: Polynomial
    status: str  # verified | typo-suspected | unavailable
    printed_num: Polynomial | None = None
    printed_den_core: Polynomial | None = None
    note: str = ""

    def qvalue(self) -> QValue:
        return QValue(self.num, self.den_core)


@dataclass(frozen=True)
class VerifyRow:
    label: str
    index: int
    status: str  # match | mismatch | typo-suspected | unavailable
    r: int = -1
    s: int = -1
    detail: str = ""


_STATUSES = {"verified", "typo-suspected", "unavailable"}


def _parse_poly_field(field: str) -> Polynomial | None:
    field = field.strip()
    if not field or field == "-":
        return None
    return Polynomial([int(tok) for tok in field.split()])


def load_corpus(text: str) -> list[CorpusEntry]:
    """Corpus records: label, N coeffs b0..br, M coeffs c0..cs, status[, printed N, printed M, note]."""
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 4:
            raise ValueError(f"corpus line {lineno}: expected at least 4 fields")
        label = parts[0].strip()
        num = _parse_poly_field(parts[1])
        den = _parse_poly_field(parts[2])
        status = parts[3].strip()
        if status not in _STATUSES:
            raise ValueError(f"corpus line {lineno}: bad status {status!r}")
        if num is None or den is None:
            raise ValueError(f"corpus line {lineno}: missing polynomial data")
        printed_num = _parse_poly_field(parts[4]) if len(parts) > 4 else None
        printed_den = _parse_poly_field(parts[5]) if len(parts) > 5 else None
        note = parts[6].strip() if len(parts) > 6 else ""
        entries.append(
            CorpusEntry(label, num, den, status, printed_num, printed_den, note)
        )
    return entries


def load_corpus_path(path: str | os.PathLike) -> list[CorpusEntry]:
    with open(path, encoding="utf-8") as fh:
        return load_corpus(fh.read())


def default_corpus() -> list[CorpusEntry]:
    from .moonshine import data_dir

    return load_corpus_path(os.path.join(data_dir(), "corpus.tsv"))


def _verify_one(
    registry: Registry, entry: CorpusEntry, guard: int, series_order: int | None
) -> VerifyRow:
    try:
        label = registry.resolve(entry.label)
    except Exception:
        return VerifyRow(entry.label, -1, "unavailable", detail="not in registry")
    cls = registry.get(label)
    idx = cls.id.index
    if entry.status == "unavailable" or not cls.available:
        status = "typo-suspected" if entry.status == "typo-suspected" else "unavailable"
        return VerifyRow(label, idx, status, detail=entry.note or cls.note)
    max_r = entry.num.degree + 2
    max_s = entry.den_core.degree + 2
    order = series_order or (max_r + max_s + guard + 12)
    try:
        report = fit_qvalue(registry, label, max_r, max_s, series_order=order, guard=guard)
    except (FitError, UnavailableClassError) as exc:
        return VerifyRow(label, idx, "mismatch", detail=f"fit failed: {exc}")
    if report.qvalue == entry.qvalue():
        status = "typo-suspected" if entry.status == "typo-suspected" else "match"
        return VerifyRow(label, idx, status, report.r, report.s, detail=entry.note)
    return VerifyRow(
        label,
        idx,
        "mismatch",
        report.r,
        report.s,
        detail="fitted Q-value differs from corpus entry",
    )


_WORKER_STATE: dict = {}


def _pool_init(registry_blob: str) -> None:
    from .moonshine import load_registry

    _WORKER_STATE["registry"] = load_registry(registry_blob)


def _pool_task(args) -> VerifyRow:
    entry, guard, series_order = args
    return _verify_one(_WORKER_STATE["registry"], entry, guard, series_order)


def verify_corpus(
    registry: Registry,
    entries: list[CorpusEntry],
    guard: int = 40,
    series_order: int | None = None,
    jobs: int = 1,
    registry_text: str | None = None,
) -> list[VerifyRow]:
    """Refit every corpus entry and classify: match/mismatch/typo-suspected/unavailable.

    With jobs > 1 the classes are verified in separate processes
    (registry_text must then be supplied to rebuild the registry in each
    worker); the report is merged in class-index order either way.
    """
    if jobs > 1 and registry_text is not None:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_pool_init, initargs=(registry_text,)
        ) as pool:
            rows = list(pool.map(_pool_task, [(e, guard, series_order) for e in entries]))
    else:
        rows = [_verify_one(registry, e, guard, series_order) for e in entries]
    return sorted(rows, key=lambda row: (row.index, row.label))
