"""Exact integration over rational polytopes.

Polynomials are sparse maps from exponent tuples to Fractions. Integration
pulls each simplex of a triangulation back to the standard simplex, where
monomials integrate by the factorial formula.
"""
from __future__ import annotations

import ast
import itertools
import math
import re
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg as la
from .errors import ArityMismatch, DimensionMismatch
from .polytope import RationalPolytope, Simplex, triangulate

Exponent = tuple[int, ...]


class Polynomial:
    """Sparse polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise DimensionMismatch(f"bad exponent {e} for {nvars} variables")
            c = la.frac(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "Polynomial":
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "Polynomial":
        return parse_polynomial(text, variables)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials in different numbers of variables")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = la.frac(other)
            return Polynomial(self.nvars, {e: c * v for e, v in self.terms.items()})
        other = self._lift(other)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, *xs) -> Fraction:
        if len(xs) == 1 and isinstance(xs[0], (tuple, list)):
            xs = tuple(xs[0])
        xs = la.vec(xs)
        if len(xs) != self.nvars:
            raise DimensionMismatch("wrong number of arguments")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(xs, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """``self(subs[0], ..., subs[n-1])``; all substitutes share one ring."""
        if len(subs) != self.nvars:
            raise DimensionMismatch("wrong number of substitutions")
        n = subs[0].nvars if subs else 0
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.constant(n, 1)} for _ in subs]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = pw(i, k - 1) * subs[i]
            return cache[k]

        out = Polynomial(n)
        for e, c in self.terms.items():
            term = Polynomial.constant(n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            out = out + term
        return out

    def homogeneous_part(self, k: int) -> "Polynomial":
        return Polynomial(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == k})

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if self.degree == 0:
            return self.terms.get((0,) * self.nvars, Fraction(0)) == other
        return False

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def to_string(self, variables: Sequence[str] | None = None) -> str:
        names = list(variables) if variables else default_variables(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mon = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k)
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"({c})*{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self.to_string()!r})"


def default_variables(n: int) -> list[str]:
    return list("xyz")[:n] if n <= 3 else [f"x{i + 1}" for i in range(n)]


_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult, ast.Div,
            ast.Pow, ast.USub, ast.UAdd, ast.Constant, ast.Name, ast.Load)


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``"x^2 + 3/2*x*y - 1"``-style text over the given variable names.

    Only +, -, *, / by constants and nonnegative integer powers are allowed.
    """
    n = len(variables)
    names = {v: i for i, v in enumerate(variables)}
    src = text.replace("^", "**")
    # implicit multiplication like "2x" is not supported; keep the grammar small
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ValueError(f"unsupported syntax in polynomial {text!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ValueError(f"only integer literals allowed, got {node.value!r}")
            return Polynomial.constant(n, node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown variable {node.id!r}")
            return Polynomial.var(n, names[node.id])
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        left, right = ev(node.left), ev(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.degree != 0 or right.is_zero():
                raise ValueError("division only by nonzero constants")
            return left * (1 / right.terms[(0,) * n])
        if isinstance(node.op, ast.Pow):
            if right.degree != 0:
                raise ValueError("exponents must be constants")
            k = right.terms.get((0,) * n, Fraction(0))
            if k.denominator != 1 or k < 0:
                raise ValueError("exponents must be nonnegative integers")
            return left ** int(k)
        raise ValueError("unsupported operation")

    return ev(tree)


_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def variables_in(text: str) -> list[str]:
    return sorted(set(_NAME.findall(text)))


# integration


def _unit_simplex_monomial(beta: Exponent) -> Fraction:
    num = math.prod(math.factorial(b) for b in beta)
    return Fraction(num, math.factorial(sum(beta) + len(beta)))


def _simplex_map(s: Simplex):
    base = s.vertices[0]
    cols = [la.sub(v, base) for v in s.vertices[1:]]  # x = base + sum u_j cols[j]
    return base, cols


def _integrate_on_simplex(s: Simplex, f: Polynomial) -> Fraction:
    t = s.ambient_dim
    if f.nvars != t:
        raise DimensionMismatch("polynomial and simplex dimensions differ")
    if t == 0:
        return f(())
    if s.dim != t:
        return Fraction(0)
    base, cols = _simplex_map(s)
    jac = abs(la.det(cols))
    subs = [Polynomial.linear([cols[j][i] for j in range(t)], base[i]) for i in range(t)]
    g = f.compose(subs)
    return jac * sum((c * _unit_simplex_monomial(e) for e, c in g.terms.items()), Fraction(0))


def integrate_monomial_simplex(s: Simplex, exponents: Sequence[int]) -> Fraction:
    e = tuple(int(x) for x in exponents)
    if len(e) != s.ambient_dim:
        raise DimensionMismatch("exponent vector and simplex dimensions differ")
    return _integrate_on_simplex(s, Polynomial(len(e), {e: 1}))


def integrate_polynomial(p: RationalPolytope, f: Polynomial) -> Fraction:
    if f.nvars != p.ambient_dim:
        raise DimensionMismatch("polynomial and polytope dimensions differ")
    if p.ambient_dim == 0:
        return f(())
    if not p.is_full_dimensional:
        return Fraction(0)
    return sum((_integrate_on_simplex(s, f) for s in triangulate(p)), Fraction(0))


class SymmetricForm:
    """Symmetric r-linear form on Q^t, stored on sorted index tuples."""

    def __init__(self, dim: int, arity: int, coeffs: Mapping[tuple[int, ...], object]):
        self.dim = dim
        self.arity = arity
        self.coeffs: dict[tuple[int, ...], Fraction] = {}
        for idx, c in coeffs.items():
            key = tuple(sorted(idx))
            if len(key) != arity or any(not 0 <= i < dim for i in key):
                raise ArityMismatch(f"index {idx} does not fit arity {arity} in dimension {dim}")
            c = la.frac(c)
            if c:
                self.coeffs[key] = c

    @classmethod
    def from_tensor(cls, tensor) -> "SymmetricForm":
        """From a nested list ``T[i1][i2]...[ir]``; symmetry is checked."""
        def depth(x):
            return 1 + depth(x[0]) if isinstance(x, (list, tuple)) else 0
        r = depth(tensor)
        dim = len(tensor) if r else 0
        entries = {}
        for idx in itertools.product(range(dim), repeat=r):
            v = tensor
            for i in idx:
                v = v[i]
            entries[idx] = la.frac(v)
        for idx, v in entries.items():
            if entries[tuple(sorted(idx))] != v:
                raise ValueError("tensor is not symmetric")
        return cls(dim, r, {k: v for k, v in entries.items() if list(k) == sorted(k)})

    @classmethod
    def from_matrix(cls, m) -> "SymmetricForm":
        return cls.from_tensor(m)

    @classmethod
    def dot_product(cls, dim: int) -> "SymmetricForm":
        return cls(dim, 2, {(i, i): 1 for i in range(dim)})

    def __call__(self, *vectors) -> Fraction:
        if len(vectors) != self.arity:
            raise ArityMismatch(f"form has arity {self.arity}, got {len(vectors)} arguments")
        vs = [la.vec(v) for v in vectors]
        total = Fraction(0)
        for key, c in self.coeffs.items():
            # sum over the distinct orderings of the multiset ``key``
            for perm in set(itertools.permutations(key)):
                prod = c
                for v, i in zip(vs, perm):
                    prod *= v[i]
                    if not prod:
                        break
                total += prod
        return total

    def diagonal(self) -> Polynomial:
        """``m -> H(m, ..., m)``."""
        terms: dict[Exponent, Fraction] = {}
        for key, c in self.coeffs.items():
            e = [0] * self.dim
            for i in key:
                e[i] += 1
            mult = math.factorial(self.arity) // math.prod(math.factorial(k) for k in e)
            terms[tuple(e)] = terms.get(tuple(e), Fraction(0)) + c * mult
        return Polynomial(self.dim, terms)


def integrate_symmetric_form_simplex(s: Simplex, h: SymmetricForm, r: int) -> Fraction:
    """Integral of ``H(m,...,m)`` over a simplex from vertex evaluations only."""
    if h.arity != r:
        raise ArityMismatch(f"form arity {h.arity} differs from r={r}")
    t = s.ambient_dim
    if h.dim != t:
        raise DimensionMismatch("form and simplex dimensions differ")
    vol = s.volume()
    if vol == 0:
        return Fraction(0)
    total = sum((h(*(s.vertices[i] for i in idx))
                 for idx in itertools.combinations_with_replacement(range(t + 1), r)), Fraction(0))
    return vol * total / math.comb(t + r, r)


def integrate_over_roof_cells(roof, f: Polynomial) -> Fraction:
    """``∫ f(m, roof(m)) dm`` with the roof's affine piece substituted per cell."""
    t = roof.domain.ambient_dim
    if f.nvars != t + 1:
        raise DimensionMismatch(f"integrand needs {t + 1} variables, got {f.nvars}")
    if t == 0:
        return f(() + (roof.value(()),))
    if not roof.domain.is_full_dimensional:
        return Fraction(0)
    mvars = [Polynomial.var(t, i) for i in range(t)]
    total = Fraction(0)
    for cell in roof.cells:
        theta = Polynomial.linear(cell.gradient, cell.constant)
        g = f.compose(mvars + [theta])
        total += integrate_polynomial(cell.polytope, g)
    return total


def integrate_roof_composite(p, f: Polynomial) -> Fraction:
    """``∫_Δ f(m, θ(m)) dm`` for the global roof θ of an adelic polytope."""
    return integrate_over_roof_cells(p.global_roof, f)
