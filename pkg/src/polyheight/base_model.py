"""Graded ring model of the base: generators, structural zeros, degree table.

Only the degree pairing on top-degree monomials is modeled. ``inf`` marks the
trivial class with height one; any monomial containing it twice is zero.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg as la
from .errors import (BadDimensions, DimensionMismatch, GradeMismatch, InfinitySquared,
                     MissingTableEntry, NotTopDegree, TableConflict)

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class ZeroPattern:
    """Monomials with at least ``count`` factors from ``group``, for every clause."""
    clauses: tuple[tuple[frozenset[int], int], ...]

    def matches(self, mono: Monomial) -> bool:
        return all(sum(mono[i] for i in grp) >= k for grp, k in self.clauses)


class BaseRing:
    def __init__(self, generators: Sequence[tuple[str, int]], infinity: str | None,
                 top_degree: int, table: Mapping[Monomial, Fraction],
                 zeros: Sequence[ZeroPattern], lattice_map: Sequence[Mapping[str, Fraction]]):
        self.names = [n for n, _ in generators]
        self.grades = [int(g) for _, g in generators]
        self.index = {n: i for i, n in enumerate(self.names)}
        self.infinity = self.index[infinity] if infinity is not None else None
        self.top_degree = top_degree
        self.table = dict(table)
        self.zeros = list(zeros)
        self._c = [RingElement.from_terms(self, {self.mono_of(n): c for n, c in row.items()})
                   for row in lattice_map]

    @property
    def rank(self) -> int:
        return len(self._c)

    def mono_of(self, name: str) -> Monomial:
        e = [0] * len(self.names)
        e[self.index[name]] = 1
        return tuple(e)

    def grade(self, mono: Monomial) -> int:
        return sum(k * g for k, g in zip(mono, self.grades))

    def is_zero_monomial(self, mono: Monomial) -> bool:
        if self.infinity is not None and mono[self.infinity] >= 2:
            return True
        return any(p.matches(mono) for p in self.zeros)

    def top_monomials(self, grade: int | None = None) -> list[Monomial]:
        """All monomials of the given grade, top degree by default."""
        out = []
        n = len(self.names)

        def rec(i, left, acc):
            if i == n:
                if left == 0:
                    out.append(tuple(acc))
                return
            g = self.grades[i]
            for k in range(left // g + 1):
                rec(i + 1, left - k * g, acc + [k])

        rec(0, self.top_degree if grade is None else grade, [])
        return out

    def gen(self, name: str) -> "RingElement":
        return RingElement.from_terms(self, {self.mono_of(name): 1})

    def one(self) -> "RingElement":
        return RingElement.from_terms(self, {(0,) * len(self.names): 1})

    def c_of_basis(self, j: int) -> "RingElement":
        return self._c[j]

    def format_monomial(self, mono: Monomial) -> str:
        parts = [n if k == 1 else f"{n}^{k}" for n, k in zip(self.names, mono) if k]
        return "*".join(parts) if parts else "1"

    def parse_monomial(self, text: str) -> Monomial:
        return parse_monomial(text, self.names)


class RingElement:
    """Homogeneous element in normal form (zeros and ``inf^2`` removed)."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: BaseRing, terms: dict[Monomial, Fraction]):
        self.ring = ring
        self.terms = terms

    @classmethod
    def from_terms(cls, ring: BaseRing, terms) -> "RingElement":
        clean: dict[Monomial, Fraction] = {}
        for m, c in terms.items():
            c = la.frac(c)
            if not c or ring.is_zero_monomial(m):
                continue
            clean[m] = clean.get(m, Fraction(0)) + c
        clean = {m: c for m, c in clean.items() if c}
        if len({ring.grade(m) for m in clean}) > 1:
            raise GradeMismatch("element is not homogeneous")
        return cls(ring, clean)

    @property
    def grade(self) -> int | None:
        return self.ring.grade(next(iter(self.terms))) if self.terms else None

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, RingElement):
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return RingElement.from_terms(self.ring, terms)

    def __neg__(self):
        return RingElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RingElement):
            c = la.frac(other)
            return RingElement.from_terms(self.ring, {m: c * v for m, v in self.terms.items()})
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if self.ring.is_zero_monomial(m):
                    continue
                terms[m] = terms.get(m, Fraction(0)) + c1 * c2
        return RingElement.from_terms(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, RingElement) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "RingElement(0)"
        parts = [f"{c}*{self.ring.format_monomial(m)}" for m, c in sorted(self.terms.items())]
        return "RingElement(" + " + ".join(parts) + ")"


_TOKEN = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?:\^\s*(\d+))?\s*$")


def parse_monomial(text: str, names: Sequence[str]) -> Monomial:
    """``"x1*x2^2*omega"`` (any factor order) to an exponent tuple."""
    e = [0] * len(names)
    idx = {n: i for i, n in enumerate(names)}
    text = text.strip()
    if text in ("", "1"):
        return tuple(e)
    for factor in text.split("*"):
        m = _TOKEN.match(factor)
        if not m or m.group(1) not in idx:
            raise ValueError(f"bad monomial factor {factor!r} in {text!r}")
        e[idx[m.group(1)]] += int(m.group(2) or 1)
    return tuple(e)


def build_ring(spec: Mapping) -> BaseRing:
    """Validate a ring description and build it.

    ``spec`` keys: ``generators`` (list of ``{"name", "grade"}``), ``infinity``
    (name of the grade-1 marker, optional), ``top_degree``, ``table``
    (monomial string to rational), ``zeros`` (list of patterns, each a list of
    ``{"generators": [...], "count": k}`` clauses), ``lattice_map`` (one
    ``{generator: coefficient}`` row per basis character).
    """
    gens = [(g["name"], int(g["grade"])) for g in spec["generators"]]
    names = [n for n, _ in gens]
    if len(set(names)) != len(names):
        raise ValueError("duplicate generator names")
    grade = dict(gens)
    if any(gr <= 0 for _, gr in gens):
        raise GradeMismatch("generator grades must be positive")
    inf = spec.get("infinity")
    if inf is not None:
        if inf not in grade:
            raise ValueError(f"unknown infinity marker {inf!r}")
        if grade[inf] != 1:
            raise GradeMismatch("the infinity marker must have grade 1")
    top = int(spec["top_degree"])
    idx = {n: i for i, n in enumerate(names)}

    zeros = []
    for pat in spec.get("zeros", []):
        clauses = []
        for cl in pat:
            grp = frozenset(idx[n] for n in cl["generators"])
            clauses.append((grp, int(cl["count"])))
        zeros.append(ZeroPattern(tuple(clauses)))

    lattice = []
    for row in spec.get("lattice_map", []):
        clean = {}
        for n, c in row.items():
            if n not in grade:
                raise ValueError(f"unknown generator {n!r} in lattice map")
            if grade[n] != 1:
                raise GradeMismatch(f"generator {n!r} of grade {grade[n]} used in a grade-1 slot")
            clean[n] = la.frac(c)
        lattice.append(clean)

    ring = BaseRing(gens, inf, top, {}, zeros, lattice)
    table: dict[Monomial, Fraction] = {}
    for key, val in spec.get("table", {}).items():
        mono = parse_monomial(key, names)
        val = la.frac(val)
        if ring.grade(mono) != top:
            raise GradeMismatch(f"table entry {key!r} is not of top degree {top}")
        if ring.infinity is not None and mono[ring.infinity] >= 2:
            if val:
                raise InfinitySquared(f"table entry {key!r} contains inf^2 with nonzero value")
            continue
        if any(p.matches(mono) for p in zeros):
            if val:
                raise TableConflict(f"table entry {key!r} is declared structurally zero")
            continue
        table[mono] = table.get(mono, Fraction(0)) + val
    for mono in ring.top_monomials():
        if not ring.is_zero_monomial(mono) and mono not in table:
            raise MissingTableEntry(f"no degree for top monomial {ring.format_monomial(mono)}")
    ring.table = table
    return ring


def c_hat(ring: BaseRing, m: Sequence) -> RingElement:
    m = la.vec(m)
    if len(m) != ring.rank:
        raise DimensionMismatch(f"character has {len(m)} coordinates, lattice rank is {ring.rank}")
    out = RingElement(ring, {})
    for j, mj in enumerate(m):
        if mj:
            out = out + ring.c_of_basis(j) * mj
    return out


def deg(ring: BaseRing, el: RingElement) -> Fraction:
    total = Fraction(0)
    for mono, c in el.terms.items():
        if ring.grade(mono) != ring.top_degree:
            raise NotTopDegree(f"{ring.format_monomial(mono)} is not of top degree")
        total += c * ring.table.get(mono, Fraction(0))
    return total


def abelian_canonical_ring(g: int, degM, gram) -> BaseRing:
    """Degree model for an abelian base with a symmetric canonically metrized M.

    ``gram[i][j]`` is the Néron-Tate pairing of the classes ``c(e_i), c(e_j)``.
    """
    if g < 1:
        raise BadDimensions("abelian dimension must be at least 1")
    if not isinstance(gram, (list, tuple)) or any(len(row) != len(gram) for row in gram):
        raise BadDimensions("gram matrix must be square")
    G = la.check_psd(gram, "gram matrix")
    degM = la.frac(degM)
    if degM <= 0:
        raise ValueError("degM must be positive")
    t = len(G)
    xs = [f"x{i + 1}" for i in range(t)]
    gens = [{"name": x, "grade": 1} for x in xs] + [{"name": "omega", "grade": 1},
                                                     {"name": "inf", "grade": 1}]
    zeros = [[{"generators": xs, "count": 3}],
             [{"generators": xs, "count": 1}, {"generators": ["omega"], "count": g}],
             [{"generators": ["inf"], "count": 1}, {"generators": xs, "count": 1}]]
    if not xs:
        zeros = []
    table = {f"omega^{g + 1}": "0", f"inf*omega^{g}" if g > 1 else "inf*omega": degM}
    coef = -2 * degM / g
    for i, j in itertools.combinations_with_replacement(range(t), 2):
        mono = f"{xs[i]}^2" if i == j else f"{xs[i]}*{xs[j]}"
        if g > 1:
            mono += f"*omega^{g - 1}" if g > 2 else "*omega"
        table[mono] = coef * G[i][j]
    spec = {"generators": gens, "infinity": "inf", "top_degree": g + 1, "table": table,
            "zeros": zeros, "lattice_map": [{x: 1} for x in xs]}
    return build_ring(spec)
