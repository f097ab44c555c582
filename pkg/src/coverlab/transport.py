"""Singular points of the cover lying over singular points of the branch curve.

Over a branch point P the stabilizer of a preimage is the inertia subgroup,
generated by the labels sigma of the branch divisors through P; the
preimages are indexed by the cosets of G modulo inertia.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .arrangement import A1, A3, ArrangementPoint, UnsupportedSingularityError
from .cover import BuildingData
from .group import GroupElement, coset_representatives, subgroup_generated
from .plane import ProjectivePoint

TACNODE = "tacnode"
NODE = "node"            # two branches of the same D_sigma meeting transversally
TRANSVERSE = "transverse"  # D_sigma and D_tau meeting transversally, sigma != tau
SMOOTH = "smooth"

# nodes coming from tacnodes are listed before nodes inside one divisor
_CATEGORY_ORDER = {TACNODE: 0, NODE: 1}


@dataclass(frozen=True)
class NodeRecord:
    """A singular point of the branch curve and what lies over it."""

    point: ArrangementPoint
    divisors: tuple[str, str]
    sigmas: tuple[GroupElement, GroupElement]
    branch_type: str
    inertia: frozenset[GroupElement]
    preimage_count: int
    sheets: tuple[GroupElement, ...]
    upstairs_type: str

    @property
    def location(self) -> ProjectivePoint | None:
        return self.point.location

    @property
    def conjugates(self) -> int:
        return self.point.conjugates

    @property
    def components(self) -> tuple[str, str]:
        return self.point.components

    def inertia_generators(self) -> list[GroupElement]:
        return sorted({s for s in self.sigmas if not s.is_identity()})


@dataclass(frozen=True)
class Node:
    """One A1 point of the cover: a node record together with a sheet (coset)."""

    index: int
    record: NodeRecord
    sheet: GroupElement

    def provenance(self, generators: Sequence[str]) -> str:
        r = self.record
        where = str(r.location) if r.location is not None else "conjugate orbit"
        return (f"p{self.index}: {r.branch_type} {'+'.join(r.components)} at {where}, "
                f"sheet {self.sheet.label(generators)}")


def inertia(point: ArrangementPoint, bd: BuildingData) -> frozenset[GroupElement]:
    if len(point.components) != 2:
        raise UnsupportedSingularityError("points on three or more branches are not supported")
    sigmas = [bd.sigma_of(c) for c in point.components]
    return subgroup_generated(sigmas, bd.r)


def preimage_count(point: ArrangementPoint, bd: BuildingData) -> int:
    return bd.order // len(inertia(point, bd))


def branch_type(point: ArrangementPoint, bd: BuildingData) -> str:
    same = bd.sigma_of(point.components[0]) == bd.sigma_of(point.components[1])
    if point.local_type == A3:
        if same:
            raise UnsupportedSingularityError(
                f"tacnode of {'+'.join(point.components)} inside one branch divisor")
        return TACNODE
    if point.local_type == A1:
        return NODE if same else TRANSVERSE
    raise UnsupportedSingularityError(f"unsupported local type {point.local_type}")


def upstairs_type(kind: str) -> str:
    """Type of each preimage: tacnodes and nodes give A1, transverse pairs are smooth."""
    table = {TACNODE: A1, NODE: A1, TRANSVERSE: SMOOTH}
    if kind not in table:
        raise UnsupportedSingularityError(f"unsupported branch type {kind}")
    return table[kind]


def node_record(point: ArrangementPoint, bd: BuildingData) -> NodeRecord:
    kind = branch_type(point, bd)
    inert = inertia(point, bd)
    sheets = tuple(coset_representatives(inert, bd.r))
    names = tuple(bd.divisor_of(c).name for c in point.components)
    sigmas = tuple(bd.sigma_of(c) for c in point.components)
    return NodeRecord(point, names, sigmas, kind, inert, bd.order // len(inert), sheets,
                      upstairs_type(kind))


@dataclass(frozen=True)
class NodeInventory:
    records: tuple[NodeRecord, ...]
    nodes: tuple[Node, ...]

    def __len__(self):
        return len(self.nodes)

    @property
    def counts(self) -> dict[str, int]:
        c = Counter(n.record.branch_type for n in self.nodes)
        return {TACNODE: c.get(TACNODE, 0), NODE: c.get(NODE, 0)}

    def indices(self, branch_type: str) -> list[int]:
        return [n.index for n in self.nodes if n.record.branch_type == branch_type]

    def by_index(self, i: int) -> Node:
        node = self.nodes[i - 1]
        assert node.index == i
        return node


def _record_key(rec: NodeRecord):
    loc = rec.location
    place = loc.sort_key() if loc is not None else (2, str(rec.point.factor))
    return _CATEGORY_ORDER[rec.branch_type], place, rec.components


def node_inventory(bd: BuildingData, points: Sequence[ArrangementPoint] | None = None) -> NodeInventory:
    """All A1 points of the cover, numbered p1, p2, ... deterministically.

    Nodes over tacnodes come first, then nodes over double points of a single
    branch divisor; within each group plane points are ordered
    lexicographically by normalized coordinates and sheets by coset label.
    A Galois orbit of non-quadratic points contributes one node per point
    and sheet, numbered consecutively.
    """
    if points is None:
        points = bd.singular_points
    records = [node_record(p, bd) for p in points]
    for rec in records:
        if rec.preimage_count * len(rec.inertia) != bd.order:
            raise AssertionError("preimage count times inertia order must equal the group order")
    singular = sorted((r for r in records if r.upstairs_type == A1), key=_record_key)
    nodes = []
    for rec in singular:
        for _ in range(rec.conjugates):
            for sheet in rec.sheets:
                nodes.append(Node(len(nodes) + 1, rec, sheet))
    return NodeInventory(tuple(records), tuple(nodes))
