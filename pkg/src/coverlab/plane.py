"""Exact projective plane geometry for lines and conics.

Points are triples of :class:`FieldElement`; curves are homogeneous
polynomials in x, y, z.  Dual conics are written in the same three variables,
read as line coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Sequence

import sympy

from .field import FieldElement, as_fraction, rational_sqrt
from .linalg import ExactMatrix
from .poly import ST, XYZ, Polynomial, binary_form_sqrt, monomials


class GeometryError(ValueError):
    pass


class ConfigurationError(GeometryError):
    """The input configuration does not satisfy a stated precondition."""


class DegeneracyError(GeometryError):
    pass


class InfiniteMultiplicityError(GeometryError):
    pass


class RamifiedRestrictionError(GeometryError):
    pass


# points ---------------------------------------------------------------------

class ProjectivePoint:
    __slots__ = ("coords",)

    def __init__(self, *coords):
        if len(coords) == 1 and not isinstance(coords[0], (int, Fraction, FieldElement)):
            coords = tuple(coords[0])
        if len(coords) != 3:
            raise ValueError("plane points have three coordinates")
        vals = [FieldElement.coerce(c) for c in coords]
        if not any(vals):
            raise ValueError("(0:0:0) is not a point")
        self.coords = _normalize(vals)

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.coords)

    def rational_coords(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(c.to_fraction() for c in self.coords)

    def sort_key(self):
        if self.is_rational():
            return (0, self.rational_coords())
        return (1, tuple(str(c) for c in self.coords))

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return all(c.is_zero() for c in cross(self.coords, other.coords))

    def __hash__(self):
        return hash(tuple(self.coords))

    def __iter__(self):
        return iter(self.coords)

    def __str__(self):
        return "(" + " : ".join(str(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"ProjectivePoint{self}"


def _normalize(vals: list[FieldElement]) -> tuple[FieldElement, ...]:
    if all(v.is_rational() for v in vals):
        from math import gcd, lcm
        fr = [v.to_fraction() for v in vals]
        den = 1
        for f in fr:
            den = lcm(den, f.denominator)
        ints = [int(f * den) for f in fr]
        g = 0
        for i in ints:
            g = gcd(g, i)
        lead = next(i for i in ints if i)
        sign = -1 if lead < 0 else 1
        return tuple(FieldElement.coerce(Fraction(sign * i, g)) for i in ints)
    lead = next(v for v in vals if v)
    inv = lead.inverse()
    return tuple(v * inv for v in vals)


def cross(a: Sequence, b: Sequence) -> list:
    a0, a1, a2 = a
    b0, b1, b2 = b
    return [a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0]


def det3(a, b, c):
    return sum((x * y for x, y in zip(a, cross(b, c))), FieldElement())


def meet(l1: Sequence, l2: Sequence) -> ProjectivePoint:
    """Intersection point of two lines given by coefficient vectors."""
    return ProjectivePoint(cross([FieldElement.coerce(v) for v in l1],
                                 [FieldElement.coerce(v) for v in l2]))


# curves ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PlaneCurve:
    label: str
    equation: Polynomial

    def __post_init__(self):
        if self.equation.variables != XYZ:
            raise ValueError("plane curves are polynomials in x, y, z")
        if self.equation.is_zero() or self.equation.degree < 1:
            raise ValueError(f"{self.label}: curve equation must be a nonconstant form")
        if not self.equation.is_homogeneous():
            raise ValueError(f"{self.label}: curve equation must be homogeneous")

    @classmethod
    def line(cls, a, b, c, label: str = "L") -> PlaneCurve:
        return cls(label, Polynomial.from_coefficients([a, b, c], 1))

    @classmethod
    def conic(cls, coeffs: Sequence, label: str = "Q") -> PlaneCurve:
        """Conic from coefficients of x^2, xy, xz, y^2, yz, z^2."""
        return cls(label, Polynomial.from_coefficients(coeffs, 2))

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence], label: str = "Q") -> PlaneCurve:
        m = [[as_fraction(v) for v in row] for row in m]
        coeffs = [m[0][0], 2 * m[0][1], 2 * m[0][2], m[1][1], 2 * m[1][2], m[2][2]]
        return cls(label, Polynomial.from_coefficients(coeffs, 2).normalized())

    @property
    def degree(self) -> int:
        return self.equation.degree

    def line_vector(self) -> tuple[Fraction, Fraction, Fraction]:
        if self.degree != 1:
            raise ValueError(f"{self.label} is not a line")
        return tuple(self.equation.coefficients(1))

    def matrix(self) -> list[list[Fraction]]:
        if self.degree != 2:
            raise ValueError(f"{self.label} is not a conic")
        a, b, c, d, e, f = self.equation.coefficients(2)
        return [[a, b / 2, c / 2], [b / 2, d, e / 2], [c / 2, e / 2, f]]

    def __call__(self, point) -> FieldElement:
        return self.equation(*point)

    def contains(self, point) -> bool:
        return self(point).is_zero()

    @cached_property
    def factorization(self) -> list[tuple[PlaneCurve, int]]:
        _, factors = self.equation.factor()
        if len(factors) == 1 and factors[0][1] == 1:
            return [(self, 1)]
        out = []
        for i, (f, k) in enumerate(factors, start=1):
            out.append((PlaneCurve(f"{self.label}.{i}", f), k))
        return out

    def components(self) -> list[PlaneCurve]:
        return [c for c, _ in self.factorization]

    def is_reduced(self) -> bool:
        return all(k == 1 for _, k in self.factorization)

    def is_irreducible(self) -> bool:
        return len(self.factorization) == 1 and self.factorization[0][1] == 1

    def is_smooth(self) -> bool:
        """Smoothness for irreducible lines and conics."""
        if self.degree == 1:
            return True
        if self.degree == 2:
            return conic_determinant(self) != 0
        raise GeometryError(f"{self.label}: smoothness check only for degree <= 2")

    def same_curve(self, other: PlaneCurve) -> bool:
        return self.equation.is_proportional(other.equation)

    def __str__(self):
        return f"{self.label}: {self.equation} = 0"

    def __repr__(self):
        return f"PlaneCurve({self.label!r}, {self.equation})"


def conic_determinant(c: PlaneCurve) -> Fraction:
    m = c.matrix()
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _adjugate(m):
    def cof(i, j):
        rows = [r for r in range(3) if r != i]
        cols = [c for c in range(3) if c != j]
        minor = (m[rows[0]][cols[0]] * m[rows[1]][cols[1]]
                 - m[rows[0]][cols[1]] * m[rows[1]][cols[0]])
        return minor if (i + j) % 2 == 0 else -minor
    return [[cof(j, i) for j in range(3)] for i in range(3)]


def dual_conic(c: PlaneCurve, label: str | None = None) -> PlaneCurve:
    """The conic of tangent lines of a smooth conic (adjugate matrix), normalized."""
    if c.degree != 2:
        raise ValueError(f"{c.label} is not a conic")
    if conic_determinant(c) == 0:
        raise DegeneracyError(f"{c.label} is singular; its dual is not a conic")
    return PlaneCurve.from_matrix(_adjugate(c.matrix()), label or f"dual({c.label})")


def bilinear(m, p, q):
    """p^T M q for a symmetric conic matrix."""
    total = FieldElement()
    for i in range(3):
        for j in range(3):
            if m[i][j]:
                total = total + p[i] * m[i][j] * q[j]
    return total


def tangent_line(c: PlaneCurve, p) -> list[FieldElement]:
    m = c.matrix()
    return [sum((m[i][j] * FieldElement.coerce(p[j]) for j in range(3)), FieldElement())
            for i in range(3)]


# parametrizations -------------------------------------------------------------

_S = Polynomial.var("s", ST)
_T = Polynomial.var("t", ST)
_E = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


@dataclass
class Parametrization:
    """A bijection P^1 -> curve given by binary forms in (s, t).

    Lines: ``(s, t) -> s*A + t*B``.  Conics: with base point P0, tangent-line
    point A and auxiliary B, ``R = s*A + t*B`` and
    ``X = C(R, R) P0 - 2 C(P0, R) R``, so ``(1, 0)`` maps to P0.
    """

    curve: PlaneCurve
    forms: tuple[Polynomial, Polynomial, Polynomial]
    base_point: tuple | None
    a: tuple
    b: tuple

    def __call__(self, s, t) -> tuple[FieldElement, ...]:
        return tuple(f(s, t) for f in self.forms)

    def point(self, s, t) -> ProjectivePoint:
        return ProjectivePoint(self(s, t))

    def restrict(self, f: Polynomial) -> Polynomial:
        """The binary form f(X(s, t))."""
        return f.compose(list(self.forms))

    def preimage(self, point) -> tuple[FieldElement, FieldElement]:
        """Parameter (s, t) of a point of the curve.

        Exact (``X(s, t) == point`` coordinatewise) for lines; projective for
        conics.
        """
        p = [FieldElement.coerce(v) for v in point]
        if not self.curve.contains(p):
            raise GeometryError(f"{ProjectivePoint(p)} is not on {self.curve.label}")
        if self.base_point is None:
            return _solve_on_span(self.a, self.b, p)
        p0 = [FieldElement.coerce(v) for v in self.base_point]
        if all(c.is_zero() for c in cross(p0, p)):
            return FieldElement.coerce(1), FieldElement.coerce(0)
        r = cross(cross(p0, p), cross(self.a, self.b))
        return _solve_on_span(self.a, self.b, r)


def _solve_on_span(a, b, p):
    """Solve p = s*a + t*b exactly."""
    a = [FieldElement.coerce(v) for v in a]
    b = [FieldElement.coerce(v) for v in b]
    for i, j in combinations(range(3), 2):
        d = a[i] * b[j] - a[j] * b[i]
        if d:
            s = (p[i] * b[j] - p[j] * b[i]) / d
            t = (a[i] * p[j] - a[j] * p[i]) / d
            if all((s * a[k] + t * b[k] - p[k]).is_zero() for k in range(3)):
                return s, t
            break
    raise GeometryError("point is not on the span")


def _rational_vec(v) -> tuple[Fraction, ...]:
    return tuple(FieldElement.coerce(c).to_fraction() for c in v)


def parametrize_line(line: PlaneCurve) -> Parametrization:
    lv = [FieldElement.coerce(c) for c in line.line_vector()]
    pts = []
    for e in _E:
        q = cross(lv, [FieldElement.coerce(c) for c in e])
        if any(q) and (not pts or any(cross(q, pts[0]))):
            pts.append(q)
        if len(pts) == 2:
            break
    a, b = (_rational_vec(p) for p in pts)
    forms = tuple(_S.scale(a[i]) + _T.scale(b[i]) for i in range(3))
    return Parametrization(line, forms, None, a, b)


def parametrize_conic(conic: PlaneCurve, point=None) -> Parametrization:
    """Stereographic projection from a rational point of a smooth conic.

    For x^2 + y^2 - z^2 from (1:0:1) this gives (s^2 - t^2, 2st, s^2 + t^2).
    """
    if conic.degree != 2 or not conic.is_smooth():
        raise DegeneracyError(f"{conic.label} is not a smooth conic")
    if point is None:
        point = rational_point_on_conic(conic)
    p0 = [FieldElement.coerce(v) for v in point]
    if not all(c.is_rational() for c in p0):
        raise GeometryError("the base point must be rational")
    if not conic.contains(p0):
        raise GeometryError(f"{ProjectivePoint(p0)} is not on {conic.label}")
    ell = tangent_line(conic, p0)
    a = None
    for e in _E:
        q = cross(ell, [FieldElement.coerce(c) for c in e])
        if any(q) and any(cross(q, p0)):
            a = q
            break
    b = next(e for e in _E if det3(p0, a, [FieldElement.coerce(c) for c in e]))
    p0r, ar = _rational_vec(p0), _rational_vec(a)
    br = tuple(Fraction(c) for c in b)
    m = conic.matrix()
    r = [_S.scale(ar[i]) + _T.scale(br[i]) for i in range(3)]
    crr = sum((r[i] * r[j] * m[i][j] for i in range(3) for j in range(3) if m[i][j]),
              Polynomial({}, ST))
    cpr = sum((r[j] * (p0r[i] * m[i][j]) for i in range(3) for j in range(3) if m[i][j] and p0r[i]),
              Polynomial({}, ST))
    forms = [crr.scale(p0r[i]) - (cpr * r[i]).scale(2) for i in range(3)]
    content = _content(forms)
    forms = tuple(f.scale(1 / content) for f in forms)
    return Parametrization(conic, forms, p0r, ar, br)


def _content(forms: Sequence[Polynomial]) -> Fraction:
    from math import gcd, lcm
    coeffs = [c for f in forms for c in f.terms.values()]
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    g = 0
    for c in coeffs:
        g = gcd(g, int(c * den))
    return Fraction(g, den)


def parametrize(curve: PlaneCurve, point=None) -> Parametrization:
    if curve.degree == 1:
        return parametrize_line(curve)
    if curve.degree == 2:
        return parametrize_conic(curve, point)
    raise GeometryError(f"{curve.label}: only lines and conics are parametrized")


def _small_lines(height: int = 3):
    seen = set()
    rng = range(-height, height + 1)
    cands = []
    for v in product(rng, repeat=3):
        if not any(v):
            continue
        p = Polynomial.from_coefficients(list(v), 1).normalized()
        key = tuple(p.coefficients(1))
        if key in seen:
            continue
        seen.add(key)
        cands.append(key)
    cands.sort(key=lambda k: (sum(abs(c) for c in k), [-c for c in k]))
    return cands


def binary_quadratic_rational_roots(q: Polynomial) -> list[tuple[Fraction, Fraction]]:
    """Rational roots (s:t) of a binary form of degree <= 2 (without multiplicity)."""
    if q.is_zero():
        raise ValueError("zero form")
    alpha = q.coefficient((2, 0)) if q.degree == 2 else Fraction(0)
    beta = q.coefficient((1, 1)) if q.degree == 2 else q.coefficient((1, 0))
    gamma = q.coefficient((0, 2)) if q.degree == 2 else q.coefficient((0, 1))
    if q.degree == 1:
        # beta s + gamma t
        return [(-gamma, beta)] if (beta or gamma) else []
    roots = []
    if alpha == 0:
        roots.append((Fraction(1), Fraction(0)))
        if beta:
            roots.append((-gamma, beta))
        return roots
    disc = beta * beta - 4 * alpha * gamma
    d = rational_sqrt(disc)
    if d is None:
        return []
    roots.append((-beta + d, 2 * alpha))
    if d:
        roots.append((-beta - d, 2 * alpha))
    return roots


def rational_point_on_conic(conic: PlaneCurve, hints: Sequence = (), height: int = 3) -> tuple[Fraction, ...]:
    """Find a rational point by intersecting with lines of small height."""
    for h in hints:
        if conic.contains(h):
            return _rational_vec(h)
    for lv in _small_lines(height):
        line = PlaneCurve("aux", Polynomial.from_coefficients(list(lv), 1))
        par = parametrize_line(line)
        q = par.restrict(conic.equation)
        if q.is_zero():
            continue
        for s, t in binary_quadratic_rational_roots(q):
            pt = par(s, t)
            return ProjectivePoint(pt).rational_coords()
    raise GeometryError(f"no rational point of small height found on {conic.label}; supply one")


# multiplicities -------------------------------------------------------------

def root_multiplicity(form: Polynomial, s, t) -> int:
    """Order of vanishing of a binary form at (s, t) != (0, 0)."""
    if form.is_zero():
        raise InfiniteMultiplicityError("form vanishes identically")
    layer = [form]
    k = 0
    while True:
        if any(not p(s, t).is_zero() for p in layer):
            return k
        nxt = []
        for p in layer:
            nxt.append(p.derivative(0))
            nxt.append(p.derivative(1))
        layer = [p for p in nxt if not p.is_zero()]
        k += 1
        if not layer:
            raise InfiniteMultiplicityError("form vanishes identically")


def _parametrization_cache(curve: PlaneCurve, cache: dict | None) -> Parametrization:
    if cache is not None and curve.label in cache:
        return cache[curve.label]
    par = parametrize(curve)
    if cache is not None:
        cache[curve.label] = par
    return par


def intersection_multiplicity(c1: PlaneCurve, c2: PlaneCurve, point, params: dict | None = None) -> int:
    """Local intersection number of two plane curves at ``point``.

    Both curves are split into irreducible components (lines and smooth conics);
    the number is the sum over component pairs, weighted by component
    multiplicities.
    """
    p = [FieldElement.coerce(v) for v in point]
    total = 0
    for a, ka in c1.factorization:
        if not a.contains(p):
            continue
        for b, kb in c2.factorization:
            if not b.contains(p):
                continue
            if a.same_curve(b):
                raise InfiniteMultiplicityError(
                    f"{c1.label} and {c2.label} share the component {a.equation} through {ProjectivePoint(p)}")
            if a.degree > 2 or (a.degree == 2 and not a.is_smooth()):
                raise GeometryError(f"component {a.equation} is neither a line nor a smooth conic")
            par = _parametrization_cache(a, params)
            s, t = par.preimage(p)
            total += ka * kb * root_multiplicity(par.restrict(b.equation), s, t)
    return total


def restriction_is_square(f: Polynomial, conic: PlaneCurve, param: Parametrization | None = None):
    """Whether f restricted to a smooth conic is a square in Q[s, t].

    Returns ``(True, root)`` with ``root**2 == f o param`` or ``(False, None)``.
    """
    param = param or parametrize(conic)
    g = param.restrict(f)
    if g.is_zero():
        raise RamifiedRestrictionError(f"{f} vanishes identically on {conic.label}")
    root = binary_form_sqrt(g)
    return (root is not None), root


# the pencil of conics tangent to four lines ------------------------------------

@dataclass
class ConicPencil:
    """Conics tangent to four lines, as the dual pencil ``base + t * direction``.

    The two generators are the rows of the reduced row echelon form of the
    solution space (monomial order x^2, xy, xz, y^2, yz, z^2 in line
    coordinates), so the parametrization is deterministic.
    """

    lines: tuple[PlaneCurve, ...]
    base: Polynomial
    direction: Polynomial
    determinant: Polynomial = field(repr=False)

    def dual_member(self, t) -> Polynomial:
        return self.base + self.direction.scale(as_fraction(t))

    def is_degenerate(self, t) -> bool:
        return self.determinant(as_fraction(t), 1).is_zero()

    def member(self, t, label: str | None = None) -> PlaneCurve:
        t = as_fraction(t)
        dual = PlaneCurve(f"pencil*({t})", self.dual_member(t))
        if conic_determinant(dual) == 0:
            raise DegeneracyError(f"pencil member t={t} is degenerate")
        return dual_conic(dual, label or f"pencil({t})")

    def degenerate_parameters(self) -> tuple[list[Fraction], bool]:
        """Rational parameters of degenerate members and whether t = infinity is one."""
        d = self.determinant
        tt = sympy.Symbol("t")
        # d is a binary form in (t, w); set w = 1
        expr = sum(sympy.Rational(c.numerator, c.denominator) * tt ** e[0] for e, c in d.terms.items())
        roots = sorted(Fraction(int(r.p), int(r.q)) for r in sympy.Poly(expr, tt).ground_roots()
                       if r.is_rational)
        at_infinity = conic_determinant(PlaneCurve("dir", self.direction)) == 0
        return roots, at_infinity


def _dual_conic_det_form(base: Polynomial, direction: Polynomial) -> Polynomial:
    tw = ("t", "w")
    t = Polynomial.var("t", tw)
    w = Polynomial.var("w", tw)
    mb = PlaneCurve("b", base).matrix()
    md = PlaneCurve("d", direction).matrix()
    m = [[w.scale(mb[i][j]) + t.scale(md[i][j]) for j in range(3)] for i in range(3)]
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def tangent_conic_pencil(lines: Sequence[PlaneCurve]) -> ConicPencil:
    if len(lines) != 4 or any(l.degree != 1 for l in lines):
        raise ConfigurationError("exactly four lines are required")
    vecs = [l.line_vector() for l in lines]
    for (i, a), (j, b) in combinations(enumerate(vecs), 2):
        if not any(cross(a, b)):
            raise ConfigurationError(f"lines not distinct: {lines[i].label} = {lines[j].label}")
    for trio in combinations(range(4), 3):
        if det3(*[[FieldElement.coerce(c) for c in vecs[k]] for k in trio]).is_zero():
            names = ", ".join(lines[k].label for k in trio)
            raise ConfigurationError(f"lines {names} are concurrent")
    mons = monomials(2, 3)
    rows = [[_mono_value(m, v) for m in mons] for v in vecs]
    ker = ExactMatrix(rows, 6).kernel()
    if len(ker) != 2:
        raise ConfigurationError("the tangent conics do not form a pencil")
    reduced, _ = ExactMatrix(ker, 6).rref()
    base, direction = (
        Polynomial(dict(zip(mons, (c.to_fraction() for c in row))), XYZ) for row in reduced
    )
    return ConicPencil(tuple(lines), base, direction, _dual_conic_det_form(base, direction))


def _mono_value(mono, vec) -> Fraction:
    out = Fraction(1)
    for k, v in zip(mono, vec):
        out *= Fraction(v) ** k
    return out
