"""Registry of genus-zero classes and coefficient extension by replication.

Each class is a normalized series q^{-1} + 0 + sum_{n>=1} a(n) q^n together
with a link to its square class (the series carrying the coefficients of the
squared group element).  Classes with odd level number are their own square;
even numbers link to a class at half the number, with the letter resolved by
a consistency search (see bootstrap).

Coefficient extension uses the power-map replication identities of orders 2
and 4.  Writing f for the class series, fhat for its square class and fhathat
for the square of the square:

  (I)  fhat(q^2)-part + even-part doubling:
         f^(2)(2t) + f(t/2) + f((t+1)/2) = f^2 - 2 a(1)
       which in coefficients gives, for m >= 2,
         m odd:   a(2m) = a(m+1) + sum_{i=1}^{(m-1)/2} a(i) a(m-i)
         m = 2r:  a(4r) = a(2r+1) + sum_{i=1}^{r-1} a(i) a(2r-i)
                          + (a(r)^2 - ahat(r)) / 2

  (II) order four:
         (q^{-4} + sum fhathat(m) q^{4m}) + 2 sum fhat(2m) q^{2m}
           + 4 sum a(4m) q^m  =  P4(f)
       with P4(f) = f^4 + alpha f^2 + beta f + gamma the unique polynomial in
       f whose expansion is q^{-4} + O(q); alpha, beta, gamma are computed by
       forward elimination on low-order data, never hard-coded.

Even indices come from (I).  Odd indices a(2k+1) come from the q^k
coefficient of (II) after substituting the (I)-expansion of a(4k); the
equations at k = 1 and k = 2 are identities, which is why a(5) must be a
seed.  Every exact division is checked; failure raises ReplicationError
("replication inconsistency"), signalling bad seeds or a bad square link.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

__all__ = [
    "ClassId",
    "MoonshineClass",
    "CoefficientTable",
    "Registry",
    "RegistryError",
    "UnknownClassError",
    "UnavailableClassError",
    "ReplicationError",
    "load_registry",
    "load_registry_path",
    "default_registry",
    "normalize_constant",
    "square_chain",
    "extend_coefficients",
    "verify_square_map",
]

_LABEL_RE = re.compile(r"^(\d+)([A-Za-z])$")


class RegistryError(Exception):
    """Malformed registry data."""


class UnknownClassError(RegistryError):
    """Lookup of a label not present in the registry."""


class UnavailableClassError(RegistryError):
    """Class is registered but has no trustworthy seed data."""


class ReplicationError(Exception):
    """A replication identity failed an exact-divisibility check."""


def parse_label(label: str) -> tuple[int, str]:
    m = _LABEL_RE.match(label)
    if not m:
        raise RegistryError(f"label {label!r} does not parse as number+letter")
    return int(m.group(1)), m.group(2)


@dataclass(frozen=True)
class ClassId:
    """A class label plus its rank in (number, letter) order."""

    label: str
    index: int

    @property
    def number(self) -> int:
        return parse_label(self.label)[0]


@dataclass
class MoonshineClass:
    id: ClassId
    square: str  # label of the class carrying the squared-element coefficients
    seeds: dict[int, int] = field(default_factory=dict)
    known: dict[int, int] = field(default_factory=dict)
    available: bool = True
    note: str = ""


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients a(-1)..a(order) of one class; all entries are integers."""

    class_id: ClassId
    coeffs: tuple[int, ...]
    order: int

    def a(self, n: int) -> int:
        if n < -1 or n > self.order:
            raise IndexError(f"coefficient a({n}) outside table range -1..{self.order}")
        return self.coeffs[n + 1]


MANDATORY_SEEDS = (1, 2, 3, 5)


class Registry:
    """Immutable-after-load collection of classes, alias-aware."""

    def __init__(self, classes: dict[str, MoonshineClass], aliases: dict[str, str] | None = None):
        self.classes = classes
        self.aliases = aliases or {}

    def resolve(self, label: str) -> str:
        if label in self.classes:
            return label
        if label in self.aliases:
            return self.aliases[label]
        raise UnknownClassError(f"unknown class {label!r}")

    def get(self, label: str) -> MoonshineClass:
        return self.classes[self.resolve(label)]

    def labels(self) -> list[str]:
        return sorted(self.classes, key=lambda s: (parse_label(s)[0], parse_label(s)[1].upper()))

    def __contains__(self, label: str) -> bool:
        return label in self.classes or label in self.aliases

    def __len__(self) -> int:
        return len(self.classes)


def _assign_indices(labels: list[str]) -> dict[str, int]:
    ordered = sorted(labels, key=lambda s: (parse_label(s)[0], parse_label(s)[1].upper()))
    return {lab: i + 1 for i, lab in enumerate(ordered)}


def load_registry(text: str) -> Registry:
    """Parse registry records: label, square label, then n:value pairs.

    Tab-separated, UTF-8, one record per class; '#' starts a comment line.
    A record whose third field is the literal ``unavailable`` registers the
    class without usable seeds (an optional fourth field gives the reason).
    """
    raw: dict[str, tuple[str, dict[int, int], bool, str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            raise RegistryError(f"line {lineno}: expected at least 3 tab-separated fields")
        label, square = parts[0].strip(), parts[1].strip()
        parse_label(label)
        if label in raw:
            raise RegistryError(f"duplicate label {label!r}")
        if parts[2].strip() == "unavailable":
            note = parts[3].strip() if len(parts) > 3 else ""
            raw[label] = (square, {}, False, note)
            continue
        coeffs: dict[int, int] = {}
        for fieldtxt in parts[2:]:
            fieldtxt = fieldtxt.strip()
            if not fieldtxt:
                continue
            n_str, _, v_str = fieldtxt.partition(":")
            coeffs[int(n_str)] = int(v_str)
        raw[label] = (square, coeffs, True, "")

    indices = _assign_indices(list(raw))
    classes: dict[str, MoonshineClass] = {}
    for label, (square, coeffs, available, note) in raw.items():
        number, _ = parse_label(label)
        if not available and square == "?":
            # unresolved square link of an unusable class
            square = label if number % 2 == 1 else square
        else:
            if square not in raw:
                raise RegistryError(f"class {label}: dangling square reference {square!r}")
            sq_number, _ = parse_label(square)
            if number % 2 == 1:
                if square != label:
                    raise RegistryError(
                        f"class {label}: odd number must be its own square, not {square!r}"
                    )
            else:
                if sq_number != number // 2:
                    raise RegistryError(
                        f"class {label}: square class must have number {number // 2}, got {square!r}"
                    )
        if available:
            if coeffs.get(-1) != 1:
                raise RegistryError(f"class {label}: a(-1) must be 1")
            if coeffs.get(0, 0) != 0:
                raise RegistryError(f"class {label}: constant term must be normalized to 0")
            coeffs.setdefault(0, 0)
            for n in MANDATORY_SEEDS:
                if n not in coeffs:
                    raise RegistryError(f"class {label}: missing mandatory seed a({n})")
        seeds = {n: coeffs[n] for n in (-1, 0, *MANDATORY_SEEDS) if n in coeffs}
        classes[label] = MoonshineClass(
            id=ClassId(label, indices[label]),
            square=square,
            seeds=seeds,
            known=dict(coeffs),
            available=available,
            note=note,
        )

    registry = Registry(classes, _default_aliases(classes))
    # square chains of usable classes must terminate at a self-square class
    for label, cls in classes.items():
        if cls.available:
            square_chain(registry, label)
    return registry


def _default_aliases(classes: dict[str, MoonshineClass]) -> dict[str, str]:
    aliases: dict[str, str] = {}
    for label in classes:
        up = label.upper()
        if up != label and up not in classes:
            aliases[up] = label
    return aliases


def load_registry_path(path: str | os.PathLike) -> Registry:
    with open(path, encoding="utf-8") as fh:
        return load_registry(fh.read())


_DEFAULT_REGISTRY: Registry | None = None


def data_dir() -> str:
    """Directory holding the packaged registry/corpus; MOONSHINE_DATA_DIR overrides."""
    override = os.environ.get("MOONSHINE_DATA_DIR")
    if override:
        return override
    return os.path.join(os.path.dirname(__file__), "data")


def default_registry() -> Registry:
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = load_registry_path(os.path.join(data_dir(), "registry.tsv"))
    return _DEFAULT_REGISTRY


def normalize_constant(raw: CoefficientTable) -> tuple[CoefficientTable, int]:
    """Zero out the q^0 coefficient; returns the new table and the removed constant."""
    if raw.a(-1) != 1:
        raise ValueError("pole coefficient a(-1) must be 1")
    c = raw.a(0)
    coeffs = list(raw.coeffs)
    coeffs[1] = 0
    return CoefficientTable(raw.class_id, tuple(coeffs), raw.order), c


def square_chain(registry: Registry, label: str) -> list[ClassId]:
    """Chain label -> square -> ... ending at (and including) the first self-square class."""
    label = registry.resolve(label)
    chain: list[ClassId] = []
    seen: set[str] = set()
    cur = label
    while True:
        if cur in seen:
            raise RegistryError(f"square chain from {label!r} cycles without a self-square class")
        seen.add(cur)
        cls = registry.get(cur)
        chain.append(cls.id)
        if cls.square == cur:
            return chain
        if cls.square == "?":
            raise UnavailableClassError(f"square link of {cur!r} is unresolved")
        cur = cls.square


# ----------------------------------------------------------------------
# replication recursion


def _faber4_coefficients(a: dict[int, int]) -> tuple[int, int, int]:
    """(alpha, beta, gamma) of P4 = f^4 + alpha f^2 + beta f + gamma.

    Forward elimination: expand f^4, f^3, f^2 through q^0 and kill q^{-3},
    q^{-2}, q^{-1}, q^0 in turn.  The f^3 multiplier vanishes because
    a(0) = 0.  Intermediate products are kept through q^3: the top powers of
    a partial product still reach down to q^0 when multiplied by the pole.
    """
    lo, hi = -4, 3
    f = {-1: 1, 0: a[0], 1: a[1], 2: a[2], 3: a[3]}

    def mul(x: dict[int, int], y: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, ci in x.items():
            for j, cj in y.items():
                k = i + j
                if lo <= k <= hi:
                    out[k] = out.get(k, 0) + ci * cj
        return out

    f2 = mul(f, f)
    f3 = mul(f2, f)
    f4 = mul(f2, f2)
    P = dict(f4)

    def subtract(mult: int, g: dict[int, int]) -> None:
        for k, v in g.items():
            P[k] = P.get(k, 0) - mult * v

    c3 = P.get(-3, 0)
    subtract(c3, f3)
    if c3 != 0:
        raise ReplicationError("replication inconsistency: P4 needs an f^3 term, a(0) != 0?")
    alpha = P.get(-2, 0)
    subtract(alpha, f2)
    beta = P.get(-1, 0)
    subtract(beta, f)
    gamma = P.get(0, 0)
    return -alpha, -beta, -gamma


class _Extender:
    """Fills a(m) for one class given lookups for its square and fourth-power classes.

    Passing ahat/ahathat as None means the class is its own square (and
    fourth power); the growing coefficient dict doubles as the lookup, which
    is safe because every replicate index read is strictly below the index
    being solved.
    """

    def __init__(
        self,
        seeds: dict[int, int],
        ahat: dict[int, int] | None = None,
        ahathat: dict[int, int] | None = None,
    ):
        a = {-1: 1, 0: 0}
        for n in MANDATORY_SEEDS:
            if n not in seeds:
                raise UnavailableClassError(f"missing mandatory seed a({n})")
            a[n] = seeds[n]
        self.a = a
        self.ahat = a if ahat is None else ahat
        self.ahathat = a if ahathat is None else ahathat
        self._g2: dict[int, int] = {}
        self._g3: dict[int, int] = {}
        self._g4: dict[int, int] = {}
        self.faber = _faber4_coefficients(a)

    # convolution powers of g = sum_{n>=1} a(n) q^n, cached
    def g2(self, j: int) -> int:
        v = self._g2.get(j)
        if v is None:
            a = self.a
            v = sum(a[i] * a[j - i] for i in range(1, j)) if j >= 2 else 0
            self._g2[j] = v
        return v

    def g3(self, j: int) -> int:
        v = self._g3.get(j)
        if v is None:
            a = self.a
            v = sum(a[i] * self.g2(j - i) for i in range(1, j - 1)) if j >= 3 else 0
            self._g3[j] = v
        return v

    def g4(self, j: int) -> int:
        v = self._g4.get(j)
        if v is None:
            v = sum(self.g2(i) * self.g2(j - i) for i in range(2, j - 1)) if j >= 4 else 0
            self._g4[j] = v
        return v

    def _even(self, m: int) -> int:
        a = self.a
        half = m // 2
        if half % 2 == 1:
            return a[half + 1] + sum(a[i] * a[half - i] for i in range(1, (half - 1) // 2 + 1))
        r = half // 2
        num = a[r] * a[r] - self.ahat[r]
        if num % 2 != 0:
            raise ReplicationError(f"replication inconsistency: parity failure at a({m})")
        return a[half + 1] + sum(a[i] * a[half - i] for i in range(1, r)) + num // 2

    def _odd(self, m: int) -> int:
        a = self.a
        k = (m - 1) // 2
        alpha, beta, gamma = self.faber
        rhs = (
            4 * a[k + 3]
            + 6 * self.g2(k + 2)
            + 4 * self.g3(k + 1)
            + self.g4(k)
            + alpha * (2 * a[k + 1] + self.g2(k))
            + beta * a[k]
        )
        if k == 0:
            rhs += gamma
        lhs_rest = 4 * sum(a[i] * a[2 * k - i] for i in range(1, k)) + 2 * a[k] * a[k] - 2 * self.ahat[k]
        if k % 2 == 0:
            lhs_rest += 2 * self.ahat[k]
        if k % 4 == 0:
            lhs_rest += self.ahathat[k // 4]
        num = rhs - lhs_rest
        if num % 4 != 0:
            raise ReplicationError(f"replication inconsistency: divisibility failure at a({m})")
        return num // 4

    def run(self, n: int) -> dict[int, int]:
        a = self.a
        a[4] = self._even(4)
        for m in range(6, n + 1):
            if m in a:
                continue
            a[m] = self._even(m) if m % 2 == 0 else self._odd(m)
        return a


def _extend_label(
    registry: Registry,
    label: str,
    n: int,
    cache: dict[str, dict[int, int]],
    orders: dict[str, int],
    square_override: str | None = None,
) -> dict[int, int]:
    cls = registry.get(label)
    if not cls.available:
        raise UnavailableClassError(f"class {label!r} has no usable seeds ({cls.note or 'unavailable'})")
    square = square_override if square_override is not None else cls.square
    if orders.get(label, -1) >= n and square_override is None:
        return cache[label]
    n_eff = max(n, 5)
    if square == label:
        result = _Extender(cls.seeds).run(n_eff)
    else:
        ahat = _extend_label(registry, square, n_eff // 2 + 3, cache, orders)
        sq2 = registry.get(square).square
        ahathat = _extend_label(registry, sq2, n_eff // 4 + 3, cache, orders)
        ext = _Extender(cls.seeds, ahat, ahathat)
        result = ext.run(n_eff)
    if square_override is None:
        cache[label] = result
        orders[label] = n_eff
    return result


def extend_coefficients(registry: Registry, label: str, n: int) -> CoefficientTable:
    """Coefficients a(-1)..a(n) of a class, extending by replication.

    Seeds and any stored verification coefficients are reproduced exactly;
    a parity or divisibility failure raises ReplicationError.
    """
    label = registry.resolve(label)
    cls = registry.get(label)
    if n < -1:
        raise ValueError("order must be >= -1")
    a = _extend_label(registry, label, max(n, 5), {}, {})
    for m, v in cls.known.items():
        if m in a and a[m] != v:
            raise ReplicationError(
                f"class {label}: recursion gives a({m}) = {a[m]}, stored value {v}"
            )
    coeffs = tuple(a[m] for m in range(-1, n + 1))
    return CoefficientTable(cls.id, coeffs, n)


def verify_square_map(registry: Registry, label: str, candidate: str, probe_order: int) -> bool:
    """True iff using `candidate` as the square class reproduces the stored coefficients."""
    label = registry.resolve(label)
    candidate = registry.resolve(candidate)
    cls = registry.get(label)
    cand = registry.get(candidate)
    if not cls.available or not cand.available:
        raise UnavailableClassError("both classes need usable data for the probe")
    probes = [m for m in cls.known if m <= probe_order and m not in (-1, 0, 1, 2, 3, 5)]
    if not probes:
        raise RegistryError(f"class {label}: no verification coefficients up to {probe_order}")
    number, _ = parse_label(label)
    if number % 2 == 1:
        if candidate != label:
            return False
    elif parse_label(candidate)[0] != number // 2:
        return False
    try:
        if candidate == label:
            a = _extend_label(registry, label, probe_order, {}, {})
        else:
            cache: dict[str, dict[int, int]] = {}
            orders: dict[str, int] = {}
            a = _extend_label(
                registry, label, probe_order, cache, orders, square_override=candidate
            )
    except (ReplicationError, UnavailableClassError):
        return False
    return all(a[m] == v for m, v in cls.known.items() if -1 <= m <= probe_order)
