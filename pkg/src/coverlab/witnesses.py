"""Witness identities certifying that the nodes of the cover form even sets.

Two families of nodes get certificates:

* nodes over tacnodes.  Let X be the double plane of the character chi_X
  whose branch is made of the line divisors.  Each conic H pulls back to X
  as A_H + B_H.  The map Y -> X is ramified along the preimage of H, so the
  pullback of A_H to the resolution is ``M_H = 2 E_H + sum A_i`` over the
  nodes above the tacnodes of H.
* nodes over double points of the line divisors.  For one line l of each
  such divisor, the reduced preimage splits as T_a + T_b, told apart by the
  sign of a radical whose radicand restricts to a square h^2 on l.  The
  pullback of l is ``2 T_a + 2 T_b + sum m_i A_i``.

Every pairing row below is computed from the geometry (degrees, genera by
Hurwitz, incidences from exact sheet values); the identities are then
audited against all of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arrangement import A3
from .bicanonical import SheetPoint, base_radical_values
from .cover import (BranchDivisor, BuildingData, DoublePlane, intermediate_cover,
                    pullback_split_check, split_component_numerics)
from .field import FieldElement, SqrtTower
from .group import Character, annihilator, char_eval
from .lattice import (A, EvenSetCertificate, EvenSetResult, Lattice, LatticeClass,
                      compose, even_set_check, multiplicities_from_strict, total_transform)
from .plane import GeometryError, Parametrization, PlaneCurve, parametrize
from .poly import Polynomial, binary_form_sqrt
from .transport import NodeInventory


class WitnessError(GeometryError):
    pass


def odd_root_degree(form: Polynomial) -> int:
    """Number of roots of odd multiplicity of a binary form, counted over the algebraic closure."""
    _, factors = form.factor()
    return sum(f.degree for f, m in factors if m % 2)


def double_cover_genus(radicand: Polynomial) -> int:
    """Genus of the double cover of P^1 branched where ``radicand`` has odd order."""
    b = odd_root_degree(radicand)
    if b == 0:
        raise WitnessError("the double cover is split, not a curve of the expected kind")
    if b % 2:
        raise WitnessError("odd number of branch points")
    return b // 2 - 1


def _genus_over(curve: PlaneCurve, bd: BuildingData, excluded: Sequence[Character],
                param: Parametrization) -> int:
    """Genus of a degree-2 sub-cover over ``curve`` cut out by the remaining radicals.

    The radicals of characters trivial on the inertia of ``curve`` generate
    the function field of its reduced preimage.  Once ``excluded`` (a square
    on the curve, or the character defining the quotient) is used up, every
    remaining character gives the same double cover; two of them are
    compared as a cross-check.
    """
    sigma = bd.sigma_of(curve.label)
    chars = [c for c in annihilator([sigma], bd.r) if not c.is_trivial() and c not in excluded]
    if not chars:
        raise WitnessError(f"no radical left to describe the preimage of {curve.label}")
    genera = set()
    for c in chars:
        genera.add(double_cover_genus(param.restrict(bd.radicand(c))))
    if len(genera) != 1:
        raise WitnessError(f"inconsistent genera {sorted(genera)} over {curve.label}")
    return genera.pop()


# nodes over tacnodes -----------------------------------------------------------------

def quotient_character(bd: BuildingData) -> Character:
    """The character whose double plane has every conic of the branch split."""
    conics = [c for c in bd.components if c.degree == 2]
    if not conics:
        raise WitnessError("no conic in the branch")
    found = []
    for chi in bd.radical_labels():
        if any(char_eval(chi, bd.sigma_of(c.label)) == -1 for c in conics):
            continue
        f = bd.radicand(chi)
        if all(pullback_split_check(f, c, bd.base_points.get(c.label)) for c in conics):
            found.append(chi)
    if len(found) != 1:
        raise WitnessError(f"expected one double plane splitting every conic, found {len(found)}")
    return found[0]


def _tangency_count(curve: PlaneCurve, X: DoublePlane, inventory: NodeInventory) -> int:
    labels = {c.label for c in X.components}
    return sum(r.conjugates for r in inventory.records
               if r.point.local_type == A3 and curve.label in r.components
               and (set(r.components) - {curve.label}) <= labels)


@dataclass
class ClassRow:
    name: str
    row: dict[str, Fraction]
    derivation: str


def tacnodal_certificate(bd: BuildingData, inventory: NodeInventory,
                         lattice: Lattice) -> tuple[EvenSetCertificate, list[ClassRow]]:
    chi_x = quotient_character(bd)
    X = intermediate_cover(bd, chi_x)
    conics = [c for c in bd.components if c.degree == 2]
    k_cov = bd.order // 2                       # degree of Y -> X
    canon = lattice.canonical_multiple
    data = {}
    for h in conics:
        num = split_component_numerics(h, _tangency_count(h, X, inventory), X.branch_degree)
        param = parametrize(h, bd.base_points.get(h.label))
        genus = _genus_over(h, bd, [chi_x], param)
        nodes = [n.index for n in inventory.nodes if h.label in n.record.components]
        data[h.label] = (num, genus, nodes)
    # A_H . A_H' on X: A_H is linearly equivalent to A_H' (same degree, both
    # half of a split pullback), so every such product equals A^2
    rows: list[ClassRow] = []
    for h in conics:
        num, genus, nodes = data[h.label]
        m_name = f"M_{h.label}"
        row = {"F": k_cov * h.degree, m_name: k_cov * num.self_intersection}
        for prev in rows:
            if prev.name.startswith("M_"):
                row[prev.name] = k_cov * num.self_intersection
        rows.append(ClassRow(m_name, row, f"pullback of a component of the split preimage of {h.label} on X"))
    for h in conics:
        num, genus, nodes = data[h.label]
        e_name = f"E_{h.label}"
        # Y -> X is ramified to order 2 along E_H, so E_H -> A_H has degree k_cov / 2
        over = k_cov // 2
        ef = over * h.degree
        row = {"F": ef, e_name: 2 * genus - 2 - canon * ef}
        row.update({A(i): 1 for i in nodes})
        for other in conics:
            # projection formula: M_H'.E_H = A_H'.(over * A_H) on X
            row[f"M_{other.label}"] = over * num.self_intersection
        for prev in rows:
            if prev.name.startswith("E_"):
                # M_H' = 2 E_H' + sum of A_i over the nodes of H'
                shared = len(set(data[prev.name[2:]][2]) & set(nodes))
                row[prev.name] = Fraction(over * num.self_intersection - shared, 2)
        rows.append(ClassRow(e_name, row, f"reduced preimage of the component over {h.label}, genus {genus}"))
    for r in rows:
        lattice.declare(r.name, r.row)
    lhs = sum((lattice.cls(f"M_{h.label}") for h in conics), lattice.cls())
    witness = sum((lattice.cls(f"E_{h.label}") for h in conics), lattice.cls())
    subset = frozenset(i for h in conics for i in data[h.label][2])
    desc = ("pullback of " + " + ".join(f"A_{h.label}" for h in conics)
            + f" from the double plane u^2 = {'*'.join(d.name for d in X.factors)}")
    return EvenSetCertificate("tacnodal", subset, lhs, witness, desc), rows


# nodes over double points of the line divisors ---------------------------------------------

@dataclass
class SplitLine:
    line: PlaneCurve
    divisor: BranchDivisor
    character: Character
    param: Parametrization
    root: Polynomial
    genus: int

    def sides(self, coords: Sequence[FieldElement], value: FieldElement) -> set[str]:
        """Which of T_a (u = h) and T_b (u = -h) pass through the point with radical value ``value``."""
        s, t = self.param.preimage(coords)
        h = self.root(s, t)
        if h.is_zero():
            return {"a", "b"}
        if value == h:
            return {"a"}
        if value == -h:
            return {"b"}
        raise WitnessError(f"radical value {value} is not +-{h} on {self.line.label}")


def split_line(line: PlaneCurve, bd: BuildingData) -> SplitLine:
    sigma = bd.sigma_of(line.label)
    param = parametrize(line)
    found = []
    for c in annihilator([sigma], bd.r):
        if c.is_trivial():
            continue
        root = binary_form_sqrt(param.restrict(bd.radicand(c)))
        if root is not None:
            found.append((c, root))
    if len(found) != 1:
        raise WitnessError(f"expected one radical splitting over {line.label}, found {len(found)}")
    chi, root = found[0]
    genus = _genus_over(line, bd, [chi], param)
    return SplitLine(line, bd.divisor_of(line.label), chi, param, root, genus)


def line_certificate(bd: BuildingData, inventory: NodeInventory, sheets: Sequence[SheetPoint],
                     lattice: Lattice, tower: SqrtTower) -> tuple[EvenSetCertificate, list[ClassRow], dict]:
    line_divs = [d for d in bd.divisors if d.components and all(c.degree == 1 for c in d.components)
                 and len(d.components) >= 2]
    if not line_divs:
        raise WitnessError("no divisor made of several lines")
    lines = [split_line(d.components[0], bd) for d in line_divs]
    by_index = {p.node.index: p for p in sheets}
    canon = lattice.canonical_multiple
    deg_over = bd.order // 2 // 2               # each of T_a, T_b over its line
    rows: list[ClassRow] = []
    names = {}
    for k, sl in enumerate(lines):
        a_name, b_name = f"T_{sl.line.label}a", f"T_{sl.line.label}b"
        names[sl.line.label] = (a_name, b_name)
        inc = {"a": {}, "b": {}}
        for n in inventory.nodes:
            if sl.line.label not in n.record.components:
                continue
            p = by_index[n.index]
            for side in sl.sides(p.coords, p.value(sl.character)):
                inc[side][A(n.index)] = 1
        self_sq = 2 * sl.genus - 2 - canon * deg_over
        row_a = {"F": deg_over, a_name: self_sq, **inc["a"]}
        row_b = {"F": deg_over, b_name: self_sq, a_name: 0, **inc["b"]}
        for prev in lines[:k]:
            meet = _line_meetings(prev, sl, bd, inventory, tower)
            pa, pb = names[prev.line.label]
            row_a.update({pa: meet[("a", "a")], pb: meet[("b", "a")]})
            row_b.update({pa: meet[("a", "b")], pb: meet[("b", "b")]})
        rows.append(ClassRow(a_name, row_a, f"half of the preimage of {sl.line.label} where u = +h, genus {sl.genus}"))
        rows.append(ClassRow(b_name, row_b, f"half of the preimage of {sl.line.label} where u = -h, genus {sl.genus}"))
    for r in rows:
        lattice.declare(r.name, r.row)
    mults: dict[int, int] = {}
    strict_total = lattice.cls()
    for sl in lines:
        a_name, b_name = names[sl.line.label]
        strict = 2 * lattice.cls(a_name) + 2 * lattice.cls(b_name)
        m = multiplicities_from_strict(lattice, strict)
        total_transform(lattice, sl.line.degree, m, strict)
        for i, v in m.items():
            mults[i] = mults.get(i, 0) + v
        strict_total = strict_total + strict
    subset = frozenset(i for i, m in mults.items() if m % 2)
    witness = Fraction(1, 2) * strict_total + LatticeClass(
        lattice, {A(i): m // 2 for i, m in mults.items()})
    lhs = sum(sl.line.degree for sl in lines) * lattice.F()
    desc = "pullback of " + " + ".join(sl.line.label for sl in lines)
    return EvenSetCertificate("line", subset, lhs, witness, desc), rows, mults


def _line_meetings(first: SplitLine, second: SplitLine, bd: BuildingData,
                   inventory: NodeInventory, tower: SqrtTower) -> dict[tuple[str, str], int]:
    """Intersection numbers of the halves of two split lines, from the points over their meet."""
    out = {(x, y): 0 for x in "ab" for y in "ab"}
    pair = {first.line.label, second.line.label}
    recs = [r for r in inventory.records if set(r.components) == pair]
    if len(recs) != 1:
        raise WitnessError(f"{first.line.label} and {second.line.label} should meet once")
    rec = recs[0]
    if rec.upstairs_type != "smooth":
        raise WitnessError(f"the points over {first.line.label} and {second.line.label} are singular")
    coords = tuple(rec.location.coords)
    base = base_radical_values(rec, bd, tower, coords)
    for g in rec.sheets:
        def value(chi):
            return base[chi] * char_eval(chi, g)
        for x in first.sides(coords, value(first.character)):
            for y in second.sides(coords, value(second.character)):
                out[(x, y)] += 1
    return out


# all together ---------------------------------------------------------------------------

@dataclass
class CertificateBundle:
    tacnodal: EvenSetResult
    line: EvenSetResult
    union: EvenSetResult
    rows: list[ClassRow] = field(default_factory=list)
    line_multiplicities: dict[int, int] = field(default_factory=dict)

    @property
    def all_valid(self) -> bool:
        return self.tacnodal.valid and self.line.valid and self.union.valid


def node_certificates(bd: BuildingData, inventory: NodeInventory, sheets: Sequence[SheetPoint],
                      tower: SqrtTower, f_square: int, canonical_multiple) -> CertificateBundle:
    n = len(inventory.nodes)
    lat1 = Lattice(n, f_square, canonical_multiple)
    cert1, rows1 = tacnodal_certificate(bd, inventory, lat1)
    lat2 = Lattice(n, f_square, canonical_multiple)
    cert2, rows2, mults = line_certificate(bd, inventory, sheets, lat2, tower)
    res1, res2 = even_set_check(cert1), even_set_check(cert2)
    union = compose(res1, res2, Lattice(n, f_square, canonical_multiple), "all nodes")
    if union.subset != frozenset(range(1, n + 1)):
        union.valid = False
        union.reasons.append("the certified subsets do not cover every node")
    return CertificateBundle(res1, res2, union, rows1 + rows2, mults)
