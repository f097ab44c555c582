"""Bicanonical sections of the cover evaluated at its nodes.

A point of the cover over a plane point P is a consistent choice of values
for the radicals u_chi, subject to ``u_chi * u_chi' = u_{chi+chi'} * prod d_sigma(P)``
(product over sigma with chi(sigma) = chi'(sigma) = -1).  At a branch point
the radicals of characters nontrivial on inertia vanish; the others are fixed
on a basis of the annihilator of inertia by the tower's canonical square root
and extended multiplicatively.  The sheet indexed by g multiplies u_chi by
chi(g).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cover import BuildingData, PluriSection, pluricanonical_basis
from .field import FieldElement, SqrtTower
from .group import Character, GroupElement, annihilator, char_eval, characters
from .linalg import ExactMatrix
from .plane import GeometryError
from .transport import Node, NodeInventory, NodeRecord


class ConstructionFalsifiedError(ArithmeticError):
    """The bicanonical system through the nodes is not what the construction needs."""


@dataclass(frozen=True)
class SheetPoint:
    node: Node
    coords: tuple[FieldElement, FieldElement, FieldElement]
    base_values: Mapping[Character, FieldElement]
    signs: Mapping[Character, int]

    def value(self, chi: Character) -> FieldElement:
        """u_chi at this point of the cover (u of the trivial character is 1)."""
        if chi.is_trivial():
            return FieldElement.coerce(1)
        return self.base_values[chi] * self.signs[chi]

    def evaluate(self, section: PluriSection) -> FieldElement:
        return section.monomial(*self.coords) * self.value(section.character)


def _independent_basis(chars: Sequence[Character]) -> list[Character]:
    """Greedy GF(2) basis of the span of ``chars``, scanning in the given order."""
    basis: list[Character] = []
    span = {Character.trivial(chars[0].r)} if chars else set()
    for c in chars:
        if c in span:
            continue
        basis.append(c)
        span |= {s + c for s in span}
    return basis


def base_radical_values(record: NodeRecord, bd: BuildingData, tower: SqrtTower,
                        coords: Sequence[FieldElement]) -> dict[Character, FieldElement]:
    """Values of every u_chi on the base sheet over the record's plane point."""
    r = bd.r
    allowed = [c for c in annihilator(record.inertia, r) if not c.is_trivial()]
    d_values = {d.name: d.equation(*coords) for d in bd.divisors}
    values: dict[Character, FieldElement] = {c: FieldElement() for c in _nontrivial(r)}
    span: dict[Character, FieldElement] = {Character.trivial(r): FieldElement.coerce(1)}
    for b in _independent_basis(allowed):
        radicand = FieldElement.coerce(1)
        for name in bd.radicand_names(b):
            radicand = radicand * d_values[name]
        if not radicand.is_rational():
            raise GeometryError("radicands at non-rational points are not supported")
        ub = tower.sqrt(radicand.to_fraction())
        new = {}
        for c, uc in span.items():
            common = FieldElement.coerce(1)
            for d in bd.divisors:
                if char_eval(c, d.sigma) == -1 and char_eval(b, d.sigma) == -1:
                    common = common * d_values[d.name]
            new[c + b] = uc * ub / common
        span.update(new)
    for c, v in span.items():
        if not c.is_trivial():
            values[c] = v
    return values


def _nontrivial(r: int) -> list[Character]:
    return [c for c in characters(r) if not c.is_trivial()]


def node_sheet_points(inventory: NodeInventory, bd: BuildingData, tower: SqrtTower | None = None,
                      twists: Mapping[int, GroupElement] | None = None) -> list[SheetPoint]:
    """One sheet point per node, in inventory order.

    ``twists`` maps a node index to a group element h; every node over the
    same plane point then has its base sheet moved by h, which is the effect
    of flipping base square-root signs there.
    """
    tower = tower if tower is not None else SqrtTower()
    twists = dict(twists or {})
    cache: dict[int, tuple] = {}
    out = []
    for node in inventory.nodes:
        rec = node.record
        if rec.location is None:
            raise GeometryError("nodes over non-quadratic conjugate points cannot be evaluated")
        key = id(rec)
        if key not in cache:
            coords = tuple(rec.location.coords)
            cache[key] = (coords, base_radical_values(rec, bd, tower, coords))
        coords, base = cache[key]
        h = next((twists[n.index] for n in inventory.nodes if n.record is rec and n.index in twists),
                 GroupElement.identity(bd.r))
        g = node.sheet * h
        signs = {c: (char_eval(c, g) if base[c] else 0) for c in base}
        out.append(SheetPoint(node, coords, base, signs))
    return out


@dataclass(frozen=True)
class EvaluationMatrix:
    matrix: ExactMatrix
    sections: tuple[PluriSection, ...]
    points: tuple[SheetPoint, ...]

    def row_labels(self, generators: Sequence[str]) -> list[str]:
        return [f"p{p.node.index} sheet {p.node.sheet.label(generators)}" for p in self.points]

    def column_labels(self) -> list[str]:
        return [s.label for s in self.sections]


def evaluation_matrix(basis: Sequence[PluriSection], points: Sequence[SheetPoint]) -> EvaluationMatrix:
    if not basis or not points:
        raise ValueError("need at least one section and one point")
    rows = [[p.evaluate(s) for s in basis] for p in points]
    return EvaluationMatrix(ExactMatrix(rows, len(basis)), tuple(basis), tuple(points))


@dataclass
class BicanonicalCertificate:
    nsections: int
    npoints: int
    rank: int
    kernel: list[list[FieldElement]]
    kernel_section: str | None
    kernel_character: Character | None
    radicand_names: tuple[str, ...]
    radicand_squarefree: bool
    zero_columns: list[str]
    quadric_rank: int
    kernel_annihilated: bool
    premises: dict[str, bool] = field(default_factory=dict)

    @property
    def kernel_dimension(self) -> int:
        return len(self.kernel)

    @property
    def h0_K_plus_L_vanishes(self) -> bool:
        return all(self.premises.values())


def unique_bicanonical_through_nodes(bd: BuildingData, inventory: NodeInventory,
                                     even_set_certified: bool = True,
                                     tower: SqrtTower | None = None,
                                     evaluation: EvaluationMatrix | None = None) -> BicanonicalCertificate:
    """Decide that exactly one bicanonical curve passes through all nodes and that it is reduced.

    If a nonzero section of K+L existed (2L equal to the sum of the exceptional
    curves), its double would be a bicanonical curve through every node that
    is twice a divisor.  The only such curve is the radical-section curve
    certified here, which is reduced, so K+L has no sections.
    """
    if evaluation is None:
        basis = pluricanonical_basis(bd, 2)
        evaluation = evaluation_matrix(basis, node_sheet_points(inventory, bd, tower))
    basis = evaluation.sections
    m = evaluation.matrix
    kern = m.kernel()
    annihilated = all(not any(m.apply(v)) for v in kern)
    zero_cols = [s.label for j, s in enumerate(basis) if not any(m.column(j))]
    quadrics = [j for j, s in enumerate(basis) if s.character.is_trivial()]
    quadric_rank = m.submatrix(quadrics).rank() if quadrics else 0
    if len(kern) != 1:
        raise ConstructionFalsifiedError(
            f"expected exactly one bicanonical curve through the nodes, kernel dimension is {len(kern)}")
    support = [j for j, v in enumerate(kern[0]) if v]
    section = basis[support[0]] if len(support) == 1 else None
    radical_only = (section is not None and not section.character.is_trivial()
                    and section.monomial.degree == 0)
    chi = section.character if section is not None else None
    names = bd.radicand_names(chi) if chi is not None and not chi.is_trivial() else ()
    squarefree = bool(names) and bd.radicand(chi).is_squarefree()
    cert = BicanonicalCertificate(
        nsections=len(basis), npoints=len(evaluation.points), rank=m.rank(), kernel=kern,
        kernel_section=section.label if section is not None else None, kernel_character=chi,
        radicand_names=names, radicand_squarefree=squarefree, zero_columns=zero_cols,
        quadric_rank=quadric_rank, kernel_annihilated=annihilated)
    cert.premises = {
        "nodes form an even set": even_set_certified,
        "exactly one bicanonical curve through all nodes": len(kern) == 1,
        "that curve is the zero locus of a single radical section": radical_only,
        "the radicand of that section is squarefree, so the curve is reduced": squarefree,
        "kernel vectors are annihilated exactly": annihilated,
    }
    return cert
