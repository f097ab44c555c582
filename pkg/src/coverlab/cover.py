"""Z_2^r covers of the projective plane from building data.

A cover is given by reduced branch curves ``D_sigma`` for nontrivial group
elements.  For each character chi the class ``L_chi`` has degree
``(1/2) * sum(deg D_sigma : chi(sigma) = -1)``; since Pic of the plane is Z,
all divisor-class arithmetic below is arithmetic with degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .arrangement import Arrangement, ArrangementPoint
from .group import (Character, GroupElement, char_eval, characters,
                    subgroup_generated)
from .plane import GeometryError, PlaneCurve, parametrize, restriction_is_square
from .poly import XYZ, Polynomial, monomials, product


class InvalidBuildingDataError(GeometryError):
    pass


class InconsistentInvariantsError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BranchDivisor:
    name: str
    sigma: GroupElement
    components: tuple[PlaneCurve, ...]

    @property
    def degree(self) -> int:
        return sum(c.degree for c in self.components)

    @property
    def equation(self) -> Polynomial:
        return product((c.equation for c in self.components), XYZ)

    def label(self, generators: Sequence[str]) -> str:
        comps = "+".join(c.label for c in self.components)
        return f"{self.name}=D_{self.sigma.label(generators)}={comps}"


@dataclass(frozen=True, eq=False)
class BuildingData:
    r: int
    divisors: tuple[BranchDivisor, ...]
    generators: tuple[str, ...] = ("x", "y", "z")
    base_points: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if any(d.sigma.r != self.r for d in self.divisors):
            raise ValueError("every sigma must live in Z_2^r")

    @classmethod
    def build(cls, r: int, assignment: dict[str, Sequence[PlaneCurve]],
              generators: Sequence[str] | None = None, names: dict[str, str] | None = None,
              base_points: dict | None = None) -> BuildingData:
        """Build from ``{"xyz": [H1], "z": [H2], ...}``; empty lists are dropped."""
        gens = tuple(generators or ("x", "y", "z", "w", "v")[:r])
        divs = []
        for word, curves in assignment.items():
            if not curves:
                continue
            sigma = GroupElement.from_word(word, gens)
            name = (names or {}).get(word, f"D{len(divs) + 1}")
            divs.append(BranchDivisor(name, sigma, tuple(curves)))
        return cls(r, tuple(divs), gens, dict(base_points or {}))

    # lookups --------------------------------------------------------------
    def divisor(self, sigma: GroupElement) -> BranchDivisor | None:
        return next((d for d in self.divisors if d.sigma == sigma), None)

    def degree(self, sigma: GroupElement) -> int:
        d = self.divisor(sigma)
        return d.degree if d else 0

    def equation(self, sigma: GroupElement) -> Polynomial:
        d = self.divisor(sigma)
        return d.equation if d else Polynomial.constant(1)

    @property
    def support(self) -> list[GroupElement]:
        return [d.sigma for d in self.divisors if d.components]

    @property
    def order(self) -> int:
        return 2 ** self.r

    @property
    def components(self) -> list[PlaneCurve]:
        return [c for d in self.divisors for c in d.components]

    def sigma_of(self, component_label: str) -> GroupElement:
        for d in self.divisors:
            if any(c.label == component_label for c in d.components):
                return d.sigma
        raise KeyError(component_label)

    def divisor_of(self, component_label: str) -> BranchDivisor:
        for d in self.divisors:
            if any(c.label == component_label for c in d.components):
                return d
        raise KeyError(component_label)

    def branch_divisors(self, chi: Character) -> list[BranchDivisor]:
        """The D_sigma with chi(sigma) = -1, in declaration order."""
        return [d for d in self.divisors if char_eval(chi, d.sigma) == -1]

    def radicand(self, chi: Character) -> Polynomial:
        return product((d.equation for d in self.branch_divisors(chi)), XYZ)

    def radicand_names(self, chi: Character) -> tuple[str, ...]:
        return tuple(d.name for d in self.branch_divisors(chi))

    @property
    def total_degree(self) -> int:
        return sum(d.degree for d in self.divisors)

    @property
    def delta(self) -> Fraction:
        """Degree of (1/2) sum D_sigma, so that K_Y is the pullback of (delta - 3)T."""
        return Fraction(self.total_degree, 2)

    def describe(self) -> list[str]:
        return [d.label(self.generators) for d in self.divisors]

    # the branch arrangement -------------------------------------------------
    @cached_property
    def arrangement(self) -> Arrangement:
        return Arrangement(self.components, base_points=self.base_points)

    @cached_property
    def singular_points(self) -> list[ArrangementPoint]:
        """Branch singularities; raises if any is not A1 or A3."""
        return self.arrangement.points()

    def radical_labels(self) -> dict[Character, str]:
        """Conventional names u1, u2, ... for the nontrivial characters.

        Characters are sorted by how many branch divisors their radicand
        involves (most first), then by divisor names.
        """
        chars = [c for c in characters(self.r) if not c.is_trivial()]
        chars.sort(key=lambda c: (-len(self.radicand_names(c)), self.radicand_names(c), c.bits))
        return {c: f"u{i}" for i, c in enumerate(chars, start=1)}


# validation -------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    where: str
    message: str

    def __str__(self):
        return f"{self.kind} [{self.where}]: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]
    irreducible: bool
    generated_order: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_building_data(bd: BuildingData) -> ValidationReport:
    """Check reducedness, common components, parity and irreducibility."""
    violations: list[Violation] = []
    seen_sigma: set[GroupElement] = set()
    for d in bd.divisors:
        where = d.sigma.label(bd.generators)
        if d.sigma.is_identity():
            violations.append(Violation("identity", where, f"{d.name} is attached to the identity"))
        if d.sigma in seen_sigma:
            violations.append(Violation("duplicate", where, f"two divisors for {where}"))
        seen_sigma.add(d.sigma)
        if not d.equation.is_squarefree():
            violations.append(Violation("not reduced", where, f"{d.name} is not reduced"))
    comps = [(d, c) for d in bd.divisors for c in d.components]
    for i, (d1, c1) in enumerate(comps):
        for d2, c2 in comps[i + 1:]:
            if c1.equation.gcd(c2.equation).degree > 0:
                if d1 is d2:
                    violations.append(Violation("not reduced", d1.sigma.label(bd.generators),
                                                f"{c1.label} and {c2.label} share a component in {d1.name}"))
                else:
                    violations.append(Violation("common component",
                                                f"{d1.sigma.label(bd.generators)},{d2.sigma.label(bd.generators)}",
                                                f"{c1.label} ({d1.name}) and {c2.label} ({d2.name})"))
    for chi in characters(bd.r):
        if chi.is_trivial():
            continue
        total = sum(d.degree for d in bd.branch_divisors(chi))
        if total % 2:
            violations.append(Violation("parity", chi.label(),
                                        f"branch degree {total} for {chi.label()} is odd"))
    gen = subgroup_generated(bd.support, bd.r)
    return ValidationReport(tuple(violations), len(gen) == bd.order, len(gen))


def require_valid(bd: BuildingData, negligible: bool = True) -> None:
    report = validate_building_data(bd)
    if not report.ok:
        raise InvalidBuildingDataError("; ".join(str(v) for v in report.violations))
    if negligible:
        bd.singular_points  # raises UnsupportedSingularityError


# invariants -------------------------------------------------------------------

def branch_character_classes(bd: BuildingData) -> dict[Character, int]:
    """Degree of L_chi for every nontrivial character."""
    out = {}
    for chi in characters(bd.r):
        if chi.is_trivial():
            continue
        total = sum(d.degree for d in bd.branch_divisors(chi))
        if total % 2:
            raise InvalidBuildingDataError(f"odd branch degree for {chi.label()}")
        out[chi] = total // 2
    return out


def h0_plane(n: int) -> int:
    """h^0(P^2, O(n))."""
    return (n + 1) * (n + 2) // 2 if n >= 0 else 0


def chi_structure_sheaf(bd: BuildingData, check: bool = True) -> int:
    if check:
        require_valid(bd)
    twice = 2 * bd.order + sum(l * (l - 3) for l in branch_character_classes(bd).values())
    return twice // 2


def geometric_genus(bd: BuildingData, check: bool = True) -> int:
    if check:
        require_valid(bd)
    return sum(h0_plane(l - 3) for l in branch_character_classes(bd).values())


def K_squared(bd: BuildingData, check: bool = True) -> int:
    if check:
        require_valid(bd)
    k = bd.order * (bd.delta - 3) ** 2
    if k.denominator != 1:
        raise InconsistentInvariantsError(f"K^2 = {k} is not an integer")
    return int(k)


def irregularity(bd: BuildingData, check: bool = True) -> int:
    q = 1 - chi_structure_sheaf(bd, check) + geometric_genus(bd, check=False)
    if q < 0:
        raise InconsistentInvariantsError(f"negative irregularity {q}")
    return q


# pluricanonical sections --------------------------------------------------------

@dataclass(frozen=True)
class PluriSection:
    """``monomial * u_chi`` with ``u_chi**2`` the product of the named branch equations."""

    character: Character
    monomial: Polynomial
    radicand_names: tuple[str, ...]
    radical: str  # conventional name of u_chi, "" for the trivial character

    @property
    def label(self) -> str:
        mono = str(self.monomial)
        if not self.radical:
            return mono
        return self.radical if mono == "1" else f"{mono}*{self.radical}"


def pluricanonical_basis(bd: BuildingData, m: int, check: bool = True) -> list[PluriSection]:
    """Basis of H^0(m K_Y), split by character.

    Valid when m K_Y is the pullback of O(m (delta - 3)), which holds for the
    covers handled here (negligible branch singularities).
    """
    if m < 1:
        raise ValueError("m must be positive")
    if check:
        require_valid(bd)
    total = m * (bd.delta - 3)
    if total.denominator != 1:
        raise ValueError(f"{m}K is not a pullback of a class on the plane")
    total = int(total)
    classes = branch_character_classes(bd)
    names = bd.radical_labels()
    out = []
    trivial = Character.trivial(bd.r)
    order = [trivial] + sorted(classes, key=lambda c: int(names[c][1:]))
    for chi in order:
        deg = total - (0 if chi.is_trivial() else classes[chi])
        for e in monomials(deg, 3):
            out.append(PluriSection(chi, Polynomial({e: 1}), bd.radicand_names(chi),
                                    "" if chi.is_trivial() else names[chi]))
    return out


# double planes inside the cover ---------------------------------------------------

@dataclass(frozen=True)
class DoublePlane:
    """The double cover u^2 = f of the plane."""

    character: Character | None
    factors: tuple[BranchDivisor, ...]

    @property
    def equation(self) -> Polynomial:
        return product((d.equation for d in self.factors), XYZ)

    @property
    def branch_degree(self) -> int:
        return sum(d.degree for d in self.factors)

    @property
    def components(self) -> list[PlaneCurve]:
        return [c for d in self.factors for c in d.components]

    def as_building_data(self) -> BuildingData:
        div = BranchDivisor("B", GroupElement((1,)), tuple(self.components))
        return BuildingData(1, (div,), ("u",))

    def describe(self) -> str:
        return "u^2 = " + "*".join(d.name for d in self.factors)


def intermediate_cover(bd: BuildingData, chi: Character) -> DoublePlane:
    if chi.is_trivial():
        raise ValueError("the trivial character gives no double plane")
    return DoublePlane(chi, tuple(bd.branch_divisors(chi)))


def pullback_split_check(f: Polynomial, conic: PlaneCurve, point=None) -> bool:
    """Whether the preimage of ``conic`` in the double plane u^2 = f is reducible."""
    splits, _ = restriction_is_square(f, conic, parametrize(conic, point))
    return splits


@dataclass(frozen=True)
class SplitComponentNumerics:
    curve: str
    tangencies: int
    pullback_square: int           # (A + B)^2
    self_intersection: int         # A^2 = B^2
    canonical_degree: int          # A.K_X
    genus: int
    h0_lower_bound: Fraction
    total_arithmetic_genus: int    # p_a(A + B)
    checks: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return all(self.checks.values())


def split_component_numerics(conic: PlaneCurve, k: int, branch_degree: int,
                             double_plane: DoublePlane | None = None) -> SplitComponentNumerics:
    """Numerical invariants of a component A of a split pullback pi^*(C) = A + B.

    The two components are exchanged by the covering involution, so they have
    the same numbers; A.B = k counts the nodes of pi^*(C) over tangency points.
    """
    if double_plane is not None and not pullback_split_check(double_plane.equation, conic):
        raise GeometryError(f"the pullback of {conic.label} does not split")
    c = conic.degree
    if not conic.is_smooth():
        raise GeometryError(f"{conic.label} is not smooth")
    pull_sq = 2 * c * c
    a_sq = Fraction(pull_sq - 2 * k, 2)
    genus = (c - 1) * (c - 2) // 2
    # K_X is the pullback of (b/2 - 3) T; A maps isomorphically onto C
    kx_coeff = Fraction(branch_degree, 2) - 3
    a_k_pushforward = c * kx_coeff
    a_k = 2 * genus - 2 - a_sq
    h0 = 1 + (a_sq - a_k) / 2
    # p_a of pi^*(C): by adjunction on X, as a double cover of C (Hurwitz),
    # and from the two components meeting in k points
    pa_adjunction = 1 + Fraction(pull_sq + 2 * c * kx_coeff, 2)
    pa_hurwitz = 2 * genus - 1 + Fraction(branch_degree * c, 2)
    pa_components = 2 * genus + k - 1
    checks = {
        "A^2 integral": a_sq.denominator == 1,
        "A.K by adjunction equals A.K by pushforward": a_k == a_k_pushforward,
        "p_a by adjunction equals p_a by Hurwitz": pa_adjunction == pa_hurwitz,
        "p_a by adjunction equals p_a of A+B": pa_adjunction == pa_components,
    }
    return SplitComponentNumerics(conic.label, k, pull_sq, int(a_sq), int(a_k), genus, h0,
                                  int(pa_adjunction), checks)
