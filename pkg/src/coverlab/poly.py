"""Sparse multivariate polynomials with rational coefficients.

Coefficients live in a dict keyed by exponent tuples.  Factoring, gcds and
squarefree decompositions are delegated to sympy; everything a hot loop
touches (arithmetic, substitution, evaluation at tower points) stays here.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import sympy

from .field import FieldElement, as_fraction, rational_sqrt

XYZ = ("x", "y", "z")
ST = ("s", "t")


def monomials(degree: int, nvars: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``degree`` in graded lex order (x > y > z).

    For three variables and degree 2 this is x^2, xy, xz, y^2, yz, z^2.
    """
    if degree < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


class Polynomial:
    __slots__ = ("terms", "variables")

    def __init__(self, terms: Mapping[tuple[int, ...], object] | None = None,
                 variables: Sequence[str] = XYZ):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[tuple[int, ...], Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match variables {self.variables}")
            c = as_fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Sequence[str] = XYZ) -> Polynomial:
        return cls({(0,) * len(variables): c}, variables)

    @classmethod
    def var(cls, name: str, variables: Sequence[str] = XYZ) -> Polynomial:
        e = tuple(1 if v == name else 0 for v in variables)
        if sum(e) != 1:
            raise ValueError(f"{name!r} is not one of {variables}")
        return cls({e: 1}, variables)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, degree: int,
                          variables: Sequence[str] = XYZ) -> Polynomial:
        """Build a form from coefficients listed in :func:`monomials` order."""
        mons = monomials(degree, len(variables))
        if len(coeffs) != len(mons):
            raise ValueError(f"a degree {degree} form needs {len(mons)} coefficients, got {len(coeffs)}")
        return cls(dict(zip(mons, (as_fraction(c) for c in coeffs))), variables)

    @classmethod
    def from_sympy(cls, expr, variables: Sequence[str] = XYZ) -> Polynomial:
        gens = sympy.symbols(variables)
        p = sympy.Poly(expr, *gens, domain="QQ")
        return cls({e: Fraction(int(c.p), int(c.q)) for e, c in p.terms()}, variables)

    def to_sympy(self):
        gens = sympy.symbols(self.variables)
        expr = sympy.Integer(0)
        for e, c in self.terms.items():
            term = sympy.Rational(c.numerator, c.denominator)
            for g, k in zip(gens, e):
                term *= g ** k
            expr += term
        return expr

    def to_sympy_poly(self):
        return sympy.Poly(self.to_sympy(), *sympy.symbols(self.variables), domain="QQ")

    # basic properties ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coefficient(self, exponent: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exponent), Fraction(0))

    def coefficients(self, degree: int | None = None) -> list[Fraction]:
        """Coefficients in :func:`monomials` order (homogeneous forms only)."""
        degree = self.degree if degree is None else degree
        return [self.coefficient(m) for m in monomials(degree, len(self.variables))]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        # graded lex, largest first
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: Polynomial):
        if other.variables != self.variables:
            raise ValueError(f"variable mismatch {self.variables} vs {other.variables}")

    def _lift(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.variables)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(out, self.variables)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(out, self.variables)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self.terms == other.terms
        try:
            return self == Polynomial.constant(other, self.variables)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def scale(self, c) -> Polynomial:
        return self * Polynomial.constant(c, self.variables)

    def derivative(self, i: int) -> Polynomial:
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return Polynomial(out, self.variables)

    # evaluation / substitution ------------------------------------------
    def __call__(self, *values):
        """Evaluate at rationals or tower elements; returns a FieldElement."""
        if len(values) != len(self.variables):
            raise ValueError(f"expected {len(self.variables)} values")
        vals = [FieldElement.coerce(v) for v in values]
        tower = next((v.tower for v in vals if v.tower is not None), None)
        total = FieldElement({}, tower)
        powers: list[dict[int, FieldElement]] = [dict() for _ in vals]
        for e, c in self.terms.items():
            term = FieldElement({0: c}, tower)
            for i, k in enumerate(e):
                if k:
                    cache = powers[i]
                    if k not in cache:
                        cache[k] = vals[i] ** k
                    term = term * cache[k]
            total = total + term
        return total

    def compose(self, substitutions: Sequence[Polynomial]) -> Polynomial:
        """Substitute ``substitutions[i]`` for the i-th variable."""
        if len(substitutions) != len(self.variables):
            raise ValueError("one substitution per variable is required")
        new_vars = substitutions[0].variables
        result = Polynomial({}, new_vars)
        cache: dict[tuple[int, int], Polynomial] = {}
        for e, c in self.terms.items():
            term = Polynomial.constant(c, new_vars)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in cache:
                        cache[(i, k)] = substitutions[i] ** k
                    term = term * cache[(i, k)]
            result = result + term
        return result

    # normal forms -------------------------------------------------------
    def normalized(self) -> Polynomial:
        """Primitive integer multiple whose leading coefficient (graded lex) is positive."""
        if not self.terms:
            return self
        from math import gcd, lcm
        den = 1
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        ints = {e: int(c * den) for e, c in self.terms.items()}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        lead = self.sorted_terms()[0][0]
        sign = -1 if ints[lead] < 0 else 1
        return Polynomial({e: Fraction(sign * v, g) for e, v in ints.items()}, self.variables)

    def is_proportional(self, other: Polynomial) -> bool:
        return self.normalized() == other.normalized()

    def is_squarefree(self) -> bool:
        if self.degree <= 0:
            return True
        _, factors = sympy.sqf_list(self.to_sympy(), *sympy.symbols(self.variables))
        return all(k == 1 for _, k in factors)

    def factor(self) -> tuple[Fraction, list[tuple[Polynomial, int]]]:
        """Irreducible factorization over Q with normalized factors."""
        c, factors = sympy.factor_list(self.to_sympy(), *sympy.symbols(self.variables))
        c = Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q))
        out = []
        for f, k in factors:
            p = Polynomial.from_sympy(f, self.variables)
            n = p.normalized()
            ratio = _ratio(p, n)
            c *= ratio ** k
            out.append((n, int(k)))
        out.sort(key=lambda fk: (fk[0].degree, str(fk[0])))
        return c, out

    def gcd(self, other: Polynomial) -> Polynomial:
        self._check(other)
        g = sympy.gcd(self.to_sympy(), other.to_sympy())
        return Polynomial.from_sympy(g, self.variables).normalized()

    def divides(self, other: Polynomial) -> bool:
        self._check(other)
        _, r = sympy.div(other.to_sympy(), self.to_sympy(), *sympy.symbols(self.variables))
        return r == 0

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mon = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{c}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self})"


def _ratio(p: Polynomial, q: Polynomial) -> Fraction:
    e, c = next(iter(p.terms.items()))
    return c / q.terms[e]


def product(polys: Iterable[Polynomial], variables: Sequence[str] = XYZ) -> Polynomial:
    out = Polynomial.constant(1, variables)
    for p in polys:
        out = out * p
    return out


# univariate helpers --------------------------------------------------------

def univariate_sqrt(coeffs: Sequence[Fraction]) -> list[Fraction] | None:
    """Exact square root in Q[t] of a polynomial given low-to-high, or None."""
    c = [as_fraction(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if not c:
        return []
    n = len(c) - 1
    if n % 2:
        return None
    lead = rational_sqrt(c[-1])
    if lead is None:
        return None
    m = n // 2
    # determine h from the top coefficients down, then verify
    h = [Fraction(0)] * (m + 1)
    h[m] = lead
    for k in range(m - 1, -1, -1):
        # coefficient of t^(m+k) in h^2
        acc = c[m + k]
        for i in range(k + 1, m):
            j = m + k - i
            if k < j <= m:
                acc -= h[i] * h[j]
        h[k] = acc / (2 * h[m])
    sq = [Fraction(0)] * (2 * m + 1)
    for i, a in enumerate(h):
        for j, b in enumerate(h):
            sq[i + j] += a * b
    return h if sq == c else None


def binary_form_sqrt(f: Polynomial) -> Polynomial | None:
    """Square root of a binary form in Q[s, t] if it is a perfect square.

    The root is normalized so its leading coefficient (graded lex, s > t) is
    positive.
    """
    if len(f.variables) != 2:
        raise ValueError("binary forms only")
    if f.is_zero():
        return Polynomial({}, f.variables)
    if not f.is_homogeneous() or f.degree % 2:
        return None
    d = f.degree
    # dehomogenize at s = 1: coefficient of t^k is that of s^(d-k) t^k
    coeffs = [f.coefficient((d - k, k)) for k in range(d + 1)]
    low = 0
    while coeffs[low] == 0:
        low += 1
    # t^low divides f; it must be an even power
    if low % 2:
        return None
    root = univariate_sqrt(coeffs[low:])
    if root is None:
        return None
    half = d // 2
    terms = {}
    for k, c in enumerate(root, start=low // 2):
        if half - k < 0:
            return None
        terms[(half - k, k)] = c
    h = Polynomial(terms, f.variables)
    if h.sorted_terms()[0][1] < 0:
        h = -h
    return h if h * h == f else None
