"""Singularities of arrangements of lines and smooth conics.

Every pair of components is intersected by restricting one component's
equation to a rational parametrization of the other.  Roots of the resulting
binary form are the intersection points and their multiplicities are the
local intersection numbers, so everything is decided over Q.  Points are only
given explicit coordinates when they are rational or quadratic; higher-degree
Galois orbits are kept as a single record.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .field import FieldElement, SqrtTower
from .plane import (GeometryError, Parametrization, PlaneCurve, ProjectivePoint,
                    parametrize)
from .poly import Polynomial


class UnsupportedSingularityError(GeometryError):
    pass


A1 = "A1"
A3 = "A3"


@dataclass(frozen=True)
class ArrangementPoint:
    components: tuple[str, str]
    contact: int
    local_type: str
    location: ProjectivePoint | None
    conjugates: int = 1
    # irreducible binary form on the first component's parameter line
    factor: Polynomial | None = None

    def __post_init__(self):
        expected = {1: A1, 2: A3}.get(self.contact)
        if expected != self.local_type:
            raise ValueError(f"contact order {self.contact} is inconsistent with {self.local_type}")

    @property
    def count(self) -> int:
        return self.conjugates

    def describe(self) -> str:
        where = str(self.location) if self.location is not None else f"orbit of {self.conjugates} conjugate points"
        return f"{self.local_type} {'+'.join(self.components)} at {where}"


@dataclass(frozen=True)
class BezoutRecord:
    pair: tuple[str, str]
    total: int
    expected: int
    symmetric: bool

    @property
    def ok(self) -> bool:
        return self.total == self.expected and self.symmetric


def _components(curves: Sequence[PlaneCurve]) -> list[PlaneCurve]:
    comps: list[PlaneCurve] = []
    for c in curves:
        for comp, k in c.factorization:
            if k != 1:
                raise UnsupportedSingularityError(f"{c.label} is not reduced")
            if comp.degree > 2:
                raise UnsupportedSingularityError(f"{comp.label} has degree {comp.degree} > 2")
            if comp.degree == 2 and not comp.is_smooth():
                raise UnsupportedSingularityError(f"{comp.label} is a singular conic")
            for other in comps:
                if other.same_curve(comp):
                    raise GeometryError(f"{other.label} and {comp.label} are the same curve")
            comps.append(comp)
    return comps


def _binary_roots(factor: Polynomial, tower: SqrtTower) -> list[tuple[FieldElement, FieldElement]]:
    d = factor.degree
    if d == 1:
        a, b = factor.coefficient((1, 0)), factor.coefficient((0, 1))
        return [(FieldElement.coerce(-b), FieldElement.coerce(a))]
    if d == 2:
        al, be, ga = (factor.coefficient(e) for e in ((2, 0), (1, 1), (0, 2)))
        if al == 0:
            raise GeometryError(f"{factor} is reducible")
        root = tower.sqrt(be * be - 4 * al * ga)
        return [(root - be, FieldElement.coerce(2 * al)), (-root - be, FieldElement.coerce(2 * al))]
    return []


class Arrangement:
    """The components of a curve arrangement with cached pairwise restrictions."""

    def __init__(self, curves: Sequence[PlaneCurve], tower: SqrtTower | None = None,
                 base_points: dict[str, Sequence] | None = None):
        self.components = _components(curves)
        self.tower = tower if tower is not None else SqrtTower()
        base_points = base_points or {}
        self.params: dict[str, Parametrization] = {
            c.label: parametrize(c, base_points.get(c.label)) for c in self.components
        }
        self._restrictions: dict[tuple[int, int], Polynomial] = {}

    def restriction(self, i: int, j: int) -> Polynomial:
        """Equation of component j restricted to the parametrization of component i."""
        key = (i, j)
        if key not in self._restrictions:
            ci, cj = self.components[i], self.components[j]
            g = self.params[ci.label].restrict(cj.equation)
            if g.is_zero():
                raise GeometryError(f"{ci.label} and {cj.label} share a component")
            self._restrictions[key] = g
        return self._restrictions[key]

    def contact_profile(self, i: int, j: int) -> list[tuple[Polynomial, int]]:
        _, factors = self.restriction(i, j).factor()
        return factors

    def check_no_triple_points(self) -> None:
        n = len(self.components)
        for i in range(n):
            others = [j for j in range(n) if j != i]
            for j, k in combinations(others, 2):
                g = self.restriction(i, j).gcd(self.restriction(i, k))
                if g.degree > 0:
                    names = ", ".join(self.components[m].label for m in (i, j, k))
                    raise UnsupportedSingularityError(f"triple point on {names}")

    def points(self) -> list[ArrangementPoint]:
        self.check_no_triple_points()
        out: list[ArrangementPoint] = []
        n = len(self.components)
        for i, j in combinations(range(n), 2):
            ci, cj = self.components[i], self.components[j]
            par = self.params[ci.label]
            for f, m in self.contact_profile(i, j):
                if m > 2:
                    raise UnsupportedSingularityError(
                        f"{ci.label} and {cj.label} have contact of order {m}")
                kind = A1 if m == 1 else A3
                roots = _binary_roots(f, self.tower)
                if roots:
                    for s, t in roots:
                        out.append(ArrangementPoint((ci.label, cj.label), m, kind,
                                                    ProjectivePoint(par(s, t)), 1, f))
                else:
                    out.append(ArrangementPoint((ci.label, cj.label), m, kind, None, f.degree, f))
        return out

    def bezout_audit(self) -> list[BezoutRecord]:
        records = []
        for i, j in combinations(range(len(self.components)), 2):
            ci, cj = self.components[i], self.components[j]
            forward = Counter((f.degree, m) for f, m in self.contact_profile(i, j))
            backward = Counter((f.degree, m) for f, m in self.contact_profile(j, i))
            total = sum(d * m * k for (d, m), k in forward.items())
            records.append(BezoutRecord((ci.label, cj.label), total, ci.degree * cj.degree,
                                        forward == backward))
        return records


def classify_arrangement_singularities(curves: Sequence[PlaneCurve], tower: SqrtTower | None = None,
                                       base_points: dict[str, Sequence] | None = None) -> list[ArrangementPoint]:
    """Every singular point of the union of ``curves``, classified A1 or A3.

    Raises :class:`UnsupportedSingularityError` for triple points, contact of
    order three or more, and components that are not lines or smooth conics.
    """
    return Arrangement(curves, tower, base_points).points()


def type_counts(points: Sequence[ArrangementPoint]) -> dict[str, int]:
    counts = Counter()
    for p in points:
        counts[p.local_type] += p.conjugates
    return {A1: counts.get(A1, 0), A3: counts.get(A3, 0)}
