"""Rebuilding the class registry from the Q-value corpus.

The registry's seed coefficients are not an independent data source: they are
recovered from the corpus Q-values through the Frobenius/reversion pipeline,
then cross-checked by the replication recursion.  This module performs that
bootstrap and resolves the square-class letters by consistency search:

1. recover each corpus entry's expansion to q^12 and require every
   coefficient to be an integer (a corrupted Q-value almost never survives
   the division by 4 n^2 at every order);
2. for odd class numbers, re-derive a(4), a(6)..a(10) from the seeds with
   the class as its own square and require agreement;
3. for even numbers X, probe every candidate class numbered X/2 the same way
   and keep the candidates that reproduce the recovered expansion;
4. classes that fail (or whose printed entries are textual duplicates of one
   another) are flagged; failures ship as `unavailable` registry rows.

Run as ``python -m hauptmodul.bootstrap`` to regenerate registry.tsv and
square_map.tsv next to the corpus (see --help).
"""

from __future__ import annotations

import argparse
import os
from dataclasses import dataclass, field

from .frobenius import recover_hauptmodul
from .moonshine import MANDATORY_SEEDS, ReplicationError, _Extender, parse_label
from .schwarzfit import CorpusEntry, QValue

__all__ = ["ClassReport", "BootstrapResult", "bootstrap_registry", "render_registry", "render_square_map"]

RECOVER_ORDER = 12
PROBE_ORDER = 10


@dataclass
class ClassReport:
    label: str
    usable: bool
    square: str | None = None
    provenance: str = ""  # paper | consistency-search
    known: dict[int, int] = field(default_factory=dict)
    candidates_passed: list[str] = field(default_factory=list)
    duplicate_of: list[str] = field(default_factory=list)
    reason: str = ""


@dataclass
class BootstrapResult:
    reports: dict[str, ClassReport]

    def usable_labels(self) -> list[str]:
        return [r.label for r in self.reports.values() if r.usable]


def _sort_key(label: str) -> tuple[int, str]:
    number, letter = parse_label(label)
    return number, letter.upper()


def _recover_known(entry: CorpusEntry) -> dict[int, int] | None:
    """Integer expansion a(-1)..a(RECOVER_ORDER), or None when inconsistent."""
    try:
        qv = QValue(entry.num, entry.den_core)
        t = recover_hauptmodul(qv, RECOVER_ORDER)
    except (ValueError, ZeroDivisionError):
        return None
    known: dict[int, int] = {}
    for n in range(-1, RECOVER_ORDER + 1):
        c = t.coeff(n)
        if c.denominator != 1:
            return None
        known[n] = c.numerator
    if known[-1] != 1 or known[0] != 0:
        return None
    return known


def _probe(known: dict[int, int], ahat: dict[int, int], ahathat: dict[int, int]) -> bool:
    """Does the replication recursion with the given square data reproduce `known`?"""
    seeds = {n: known[n] for n in MANDATORY_SEEDS}
    try:
        ext = _Extender(seeds, ahat, ahathat)
        a = ext.run(PROBE_ORDER)
    except ReplicationError:
        return False
    return all(a[n] == known[n] for n in range(-1, PROBE_ORDER + 1))


def _probe_self(known: dict[int, int]) -> bool:
    seeds = {n: known[n] for n in MANDATORY_SEEDS}
    try:
        a = _Extender(seeds).run(PROBE_ORDER)
    except ReplicationError:
        return False
    return all(a[n] == known[n] for n in range(-1, PROBE_ORDER + 1))


def bootstrap_registry(entries: list[CorpusEntry]) -> BootstrapResult:
    entries = sorted(entries, key=lambda e: _sort_key(e.label))
    reports: dict[str, ClassReport] = {}

    # textual duplicates: identical (N, M) under different labels
    by_value: dict[tuple, list[str]] = {}
    for e in entries:
        key = (e.num.coeffs, e.den_core.coeffs)
        by_value.setdefault(key, []).append(e.label)

    for e in entries:
        rep = ClassReport(label=e.label, usable=False)
        reports[e.label] = rep
        dups = [x for x in by_value[(e.num.coeffs, e.den_core.coeffs)] if x != e.label]
        rep.duplicate_of = dups
        known = _recover_known(e)
        if known is None:
            rep.reason = "recovered expansion is not an integral normalized series"
            continue
        rep.known = known
        number, _ = parse_label(e.label)
        if number % 2 == 1:
            if _probe_self(known):
                rep.usable = True
                rep.square = e.label
                rep.provenance = "paper"
            else:
                rep.reason = "self-square replication probe failed"
            continue
        # even: search candidates at half the number among already-usable classes
        half = number // 2
        passed = []
        for cand in reports.values():
            if not cand.usable or parse_label(cand.label)[0] != half:
                continue
            cand_square = reports[cand.square].known if cand.square in reports else None
            if cand_square is None:
                continue
            if _probe(known, cand.known, cand_square):
                passed.append(cand.label)
        rep.candidates_passed = passed
        if passed:
            rep.usable = True
            rep.square = passed[0]
            rep.provenance = "consistency-search"
        else:
            rep.reason = f"no class numbered {half} reproduces the expansion as square"
    return BootstrapResult(reports)


def render_registry(result: BootstrapResult) -> str:
    lines = [
        "# genus-zero class registry: label, square, n:value coefficient pairs",
        "# rebuilt from the Q-value corpus by hauptmodul.bootstrap",
    ]
    for label in sorted(result.reports, key=_sort_key):
        rep = result.reports[label]
        if rep.usable:
            pairs = "\t".join(f"{n}:{rep.known[n]}" for n in sorted(rep.known))
            lines.append(f"{label}\t{rep.square}\t{pairs}")
        else:
            lines.append(f"{label}\t?\tunavailable\t{rep.reason}")
    return "\n".join(lines) + "\n"


def render_square_map(result: BootstrapResult) -> str:
    lines = ["# label, square class, provenance, note"]
    for label in sorted(result.reports, key=_sort_key):
        rep = result.reports[label]
        if not rep.usable:
            continue
        note = ""
        if len(rep.candidates_passed) > 1:
            note = "ambiguous: " + "|".join(rep.candidates_passed)
        if rep.duplicate_of:
            extra = "duplicate coefficients with " + "|".join(rep.duplicate_of)
            note = f"{note}; {extra}" if note else extra
        lines.append(f"{label}\t{rep.square}\t{rep.provenance}\t{note}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    from .moonshine import data_dir
    from .schwarzfit import load_corpus_path

    parser = argparse.ArgumentParser(description="rebuild registry.tsv from the corpus")
    parser.add_argument("--corpus", default=None, help="corpus TSV (default: packaged data)")
    parser.add_argument("--out-dir", default=None, help="output directory (default: data dir)")
    args = parser.parse_args(argv)
    corpus_path = args.corpus or os.path.join(data_dir(), "corpus.tsv")
    out_dir = args.out_dir or data_dir()
    entries = load_corpus_path(corpus_path)
    result = bootstrap_registry(entries)
    with open(os.path.join(out_dir, "registry.tsv"), "w", encoding="utf-8") as fh:
        fh.write(render_registry(result))
    with open(os.path.join(out_dir, "square_map.tsv"), "w", encoding="utf-8") as fh:
        fh.write(render_square_map(result))
    usable = result.usable_labels()
    print(f"{len(usable)} usable classes of {len(result.reports)}")
    for rep in result.reports.values():
        if not rep.usable:
            print(f"  unavailable {rep.label}: {rep.reason}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
