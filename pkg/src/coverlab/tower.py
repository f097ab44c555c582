"""Invariants along the tower X <- Y <- Y' <- S' -> S and the verification pipeline."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .arrangement import A1, A3, type_counts
from .bicanonical import (BicanonicalCertificate, EvaluationMatrix, evaluation_matrix,
                          node_sheet_points, unique_bicanonical_through_nodes)
from .config import Configuration, RunConfig, build_configuration
from .cover import (K_squared, chi_structure_sheaf, geometric_genus, intermediate_cover,
                    irregularity, pluricanonical_basis, pullback_split_check,
                    split_component_numerics, validate_building_data)
from .field import SqrtTower
from .group import character_table, printed_order_r3
from .plane import ConfigurationError, intersection_multiplicity
from .transport import NODE, TACNODE, NodeInventory, node_inventory
from .witnesses import CertificateBundle, node_certificates, quotient_character


class UncertifiedEvenSetError(ValueError):
    pass


@dataclass(frozen=True)
class LevelRecord:
    name: str
    chi: int
    p_g: int
    q: int
    K2: int
    nodes: int = 0
    # K^2 of the minimal model and whether |K| is the pullback of the lines of the plane
    minimal_K2: int | None = None
    canonical_pullback: bool = False
    note: str = ""

    def __post_init__(self):
        if self.chi != 1 - self.q + self.p_g:
            raise ArithmeticError(f"{self.name}: chi != 1 - q + p_g")

    @property
    def canonical_degree(self) -> int | None:
        return canonical_map_degree(self)


def node_double_cover_invariants(chi: int, K2: int, n: int, L_squared, L_dot_K, h0_K_plus_L: int,
                                 p_g: int, certified: bool = True) -> dict[str, int]:
    """Invariants of the double cover branched on n disjoint (-2)-curves with 2L = sum A_i.

    K^2 of the cover is 2(K + L)^2; each A_i pulls back to twice a (-1)-curve
    and contracting the n of them adds n.
    """
    if not certified:
        raise UncertifiedEvenSetError("the branch nodes are not certified to form an even set")
    L2, LK = Fraction(L_squared), Fraction(L_dot_K)
    chi_cover = 2 * chi + (LK + L2) / 2
    K2_cover = 2 * (K2 + 2 * LK + L2)
    if chi_cover.denominator != 1 or K2_cover.denominator != 1:
        raise ArithmeticError("non-integral invariants: the half class is not a divisor")
    p_g_cover = p_g + h0_K_plus_L
    q_cover = 1 - int(chi_cover) + p_g_cover
    return {"chi": int(chi_cover), "K2_cover": int(K2_cover), "K2_minimal": int(K2_cover) + n,
            "p_g": p_g_cover, "q": q_cover, "exceptional_curves": n}


def canonical_map_degree(level: LevelRecord) -> int | None:
    """Degree of the canonical map onto the plane, or None where it is not a map to P^2."""
    if level.p_g != 3 or not level.canonical_pullback or level.minimal_K2 is None:
        return None
    return level.minimal_K2


@dataclass(frozen=True)
class Bound:
    q: int
    bound: int
    flag: str | None = None


def beauville_bound(q: int) -> Bound:
    if q < 0:
        raise ValueError("q must be nonnegative")
    if q == 0:
        return Bound(q, 36)
    if q == 2:
        return Bound(q, 18)
    return Bound(q, 36, "no sharper bound stated for this irregularity")


# the pipeline -----------------------------------------------------------------------

EXPECTED = {
    "arrangement": {A3: 8, A1: 10},
    "Y": (4, 3, 0, 8),
    "nodes": {TACNODE: 16, NODE: 8},
    "bicanonical": 12,
    "S": (2, 3, 2, 16),
    "degree": 16,
}

PRINTED_TABLE = (
    (-1, -1, -1, -1, 1, 1, 1, 1),
    (-1, -1, 1, 1, -1, -1, 1, 1),
    (-1, 1, -1, 1, -1, 1, -1, 1),
    (-1, 1, 1, -1, 1, -1, -1, 1),
    (1, -1, -1, 1, 1, -1, -1, 1),
    (1, -1, 1, -1, -1, 1, -1, 1),
    (1, 1, -1, -1, -1, -1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 1),
)


@dataclass
class CheckResult:
    key: str
    stage: str
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)
    message: str = ""


class StageFailure(Exception):
    def __init__(self, check: CheckResult):
        super().__init__(f"{check.stage}: {check.message}")
        self.check = check


@dataclass
class TowerReport:
    config: RunConfig
    checks: list[CheckResult] = field(default_factory=list)
    levels: dict[str, LevelRecord] = field(default_factory=dict)
    configuration: Configuration | None = None
    inventory: NodeInventory | None = None
    certificates: CertificateBundle | None = None
    bicanonical: BicanonicalCertificate | None = None
    evaluation: EvaluationMatrix | None = None
    split_numerics: dict = field(default_factory=dict)
    bound: Bound | None = None
    timings: dict[str, float] = field(default_factory=dict)
    failed_stage: str | None = None
    error: str | None = None
    assumptions: list[str] = field(default_factory=lambda: [
        "S is the minimal model of S' (contract the exceptional curves over the nodes)",
        "the canonical system of S is the pullback of the lines of the plane and is free",
        "inertia at a branch point is the full stabilizer of its preimages",
        "components of split preimages are linearly equivalent when they have the same degree",
    ])

    @property
    def passed(self) -> bool:
        return self.failed_stage is None and len(self.checks) == len(CHECKS) and all(
            c.passed for c in self.checks)

    @property
    def headline(self) -> dict[str, int | None] | None:
        s = self.levels.get("S")
        if s is None:
            return None
        return {"p_g": s.p_g, "q": s.q, "K2": s.K2, "d": s.canonical_degree}


CHECKS = (
    ("character_table", "group"),
    ("configuration", "configuration"),
    ("arrangement", "arrangement"),
    ("bezout", "arrangement"),
    ("building_data", "building data"),
    ("splitting", "double plane"),
    ("split_numerics", "double plane"),
    ("Y_invariants", "cover invariants"),
    ("node_inventory", "node inventory"),
    ("even_sets", "even-set certificates"),
    ("bicanonical_basis", "bicanonical kernel"),
    ("bicanonical_kernel", "bicanonical kernel"),
    ("S_invariants", "tower invariants"),
    ("degree_bound", "degree and bound"),
)


class _Run:
    def __init__(self, cfg: RunConfig, timing: bool):
        self.cfg = cfg
        self.report = TowerReport(cfg)
        self.timing = timing
        self.tower = SqrtTower()

    def check(self, key: str, fn: Callable[[], tuple[bool, dict, str]]) -> None:
        stage = dict(CHECKS)[key]
        start = time.perf_counter()
        passed, details, message = fn()
        if self.timing:
            self.report.timings[key] = time.perf_counter() - start
        result = CheckResult(key, stage, passed, details, message if not passed else "")
        self.report.checks.append(result)
        if not passed:
            raise StageFailure(result)

    # individual checks ---------------------------------------------------------
    def character_table(self):
        rows, cols = printed_order_r3()
        table = character_table(3).reorder(rows, cols)
        ok = tuple(map(tuple, table.values)) == PRINTED_TABLE
        ortho = all(sum(a * b for a, b in zip(table.values[i], table.values[j])) == (8 if i == j else 0)
                    for i in range(8) for j in range(8))
        return ok and ortho, {"matches_printed": ok, "orthogonal": ortho}, "character table mismatch"

    def configuration(self):
        conf = build_configuration(self.cfg)
        self.report.configuration = conf
        tangency = {}
        for h in (conf.h1, conf.h2):
            for line in conf.lines.values():
                pts = [p for p in conf.building_data.singular_points
                       if set(p.components) == {h.label, line.label}]
                mult = [intersection_multiplicity(h, line, p.location) for p in pts]
                tangency[f"{h.label}.{line.label}"] = mult
        ok = all(m == [2] for m in tangency.values())
        details = {"H1": str(conf.h1.equation), "H2": str(conf.h2.equation),
                   "lines": {k: str(v.equation) for k, v in conf.lines.items()},
                   "pencil_parameter": conf.pencil_parameter,
                   "tangency_multiplicities": tangency}
        return ok, details, "a line is not tangent to both conics"

    def arrangement(self):
        bd = self.report.configuration.building_data
        counts = type_counts(bd.singular_points)
        ok = counts == EXPECTED["arrangement"]
        pts = [p.describe() for p in bd.singular_points]
        return ok, {"counts": counts, "points": pts}, f"expected 8 A3 and 10 A1, got {counts}"

    def bezout(self):
        records = self.report.configuration.building_data.arrangement.bezout_audit()
        ok = all(r.ok for r in records)
        details = {"+".join(r.pair): {"total": r.total, "expected": r.expected, "symmetric": r.symmetric}
                   for r in records}
        return ok, details, "Bezout audit failed"

    def building_data(self):
        bd = self.report.configuration.building_data
        v = validate_building_data(bd)
        details = {"divisors": bd.describe(), "violations": [str(x) for x in v.violations],
                   "irreducible": v.irreducible}
        return v.ok and v.irreducible, details, "; ".join(map(str, v.violations)) or "cover is reducible"

    def splitting(self):
        conf = self.report.configuration
        bd = conf.building_data
        chi = quotient_character(bd)
        X = intermediate_cover(bd, chi)
        self.X, self.chi_x = X, chi
        splits = {h.label: pullback_split_check(X.equation, h, bd.base_points.get(h.label))
                  for h in (conf.h1, conf.h2)}
        details = {"double_plane": X.describe(), "radical": bd.radical_labels()[chi],
                   "splits": splits}
        return all(splits.values()), details, "a conic does not split in the double plane"

    def split_numerics(self):
        conf = self.report.configuration
        out, ok = {}, True
        for h in (conf.h1, conf.h2):
            k = sum(1 for line in conf.lines.values()
                    if intersection_multiplicity(h, line, _tangency(conf, h, line)) == 2)
            num = split_component_numerics(h, k, self.X.branch_degree, self.X)
            self.report.split_numerics[h.label] = num
            out[h.label] = {"tangencies": num.tangencies, "pullback_square": num.pullback_square,
                            "A2": num.self_intersection, "AK": num.canonical_degree,
                            "genus": num.genus, "h0_lower_bound": num.h0_lower_bound,
                            "total_arithmetic_genus": num.total_arithmetic_genus,
                            "cross_checks": num.checks}
            ok &= (num.consistent and num.self_intersection == 0 and num.canonical_degree == -2
                   and num.genus == 0 and num.h0_lower_bound >= 2 and num.total_arithmetic_genus == 3)
        xbd = self.X.as_building_data()
        lev = LevelRecord("X", chi_structure_sheaf(xbd), geometric_genus(xbd), irregularity(xbd),
                          K_squared(xbd), note=self.X.describe())
        self.report.levels["X"] = lev
        return ok, out, "numerics of the split components disagree"

    def Y_invariants(self):
        bd = self.report.configuration.building_data
        chi, pg, q, k2 = (chi_structure_sheaf(bd), geometric_genus(bd), irregularity(bd),
                          K_squared(bd))
        canon = pluricanonical_basis(bd, 1)
        pullback = all(s.character.is_trivial() and s.monomial.degree == 1 for s in canon)
        self.report.levels["Y"] = LevelRecord("Y", chi, pg, q, k2, 0, k2, pullback and pg == 3)
        ok = (chi, pg, q, k2) == EXPECTED["Y"]
        return ok, {"chi": chi, "p_g": pg, "q": q, "K2": k2,
                    "canonical_sections": [s.label for s in canon]}, "invariants of Y differ"

    def node_inventory(self):
        bd = self.report.configuration.building_data
        inv = node_inventory(bd)
        self.report.inventory = inv
        y = self.report.levels["Y"]
        self.report.levels["Y'"] = LevelRecord("Y'", y.chi, y.p_g, y.q, y.K2, len(inv), y.K2,
                                               y.canonical_pullback, "minimal resolution of the nodes of Y")
        balanced = all(r.preimage_count * len(r.inertia) == bd.order for r in inv.records)
        ok = inv.counts == EXPECTED["nodes"] and balanced
        return ok, {"total": len(inv), "counts": inv.counts}, f"node counts {inv.counts}"

    def even_sets(self):
        bd = self.report.configuration.building_data
        inv = self.report.inventory
        self.sheets = node_sheet_points(inv, bd, self.tower)
        b = node_certificates(bd, inv, self.sheets, self.tower, bd.order, bd.delta - 3)
        self.report.certificates = b
        details = {r.name: {"status": r.status, "L2": r.L_squared, "LK": r.L_dot_K, "reasons": r.reasons}
                   for r in (b.tacnodal, b.line, b.union)}
        ok = (b.all_valid and b.tacnodal.subset == frozenset(inv.indices(TACNODE))
              and b.line.subset == frozenset(inv.indices(NODE)))
        return ok, details, "an even-set certificate failed"

    def bicanonical_basis(self):
        bd = self.report.configuration.building_data
        self.basis = pluricanonical_basis(bd, 2)
        y = self.report.levels["Y"]
        quadrics = sum(1 for s in self.basis if s.character.is_trivial())
        ok = len(self.basis) == y.chi + y.K2 == EXPECTED["bicanonical"]
        return ok, {"count": len(self.basis), "quadrics": quadrics,
                    "sections": [s.label for s in self.basis]}, f"{len(self.basis)} bicanonical sections"

    def bicanonical_kernel(self):
        bd = self.report.configuration.building_data
        ev = evaluation_matrix(self.basis, self.sheets)
        self.report.evaluation = ev
        cert = unique_bicanonical_through_nodes(bd, self.report.inventory,
                                                self.report.certificates.union.valid, evaluation=ev)
        self.report.bicanonical = cert
        expected_radical = bd.radical_labels()[self.chi_x]
        ok = (cert.kernel_dimension == 1 and cert.kernel_section == expected_radical
              and cert.h0_K_plus_L_vanishes)
        return ok, {"rank": cert.rank, "kernel_dimension": cert.kernel_dimension,
                    "kernel_section": cert.kernel_section, "zero_columns": cert.zero_columns,
                    "quadric_rank": cert.quadric_rank, "premises": cert.premises}, "bicanonical kernel check failed"

    def S_invariants(self):
        yp = self.report.levels["Y'"]
        union = self.report.certificates.union
        h0 = 0 if self.report.bicanonical.h0_K_plus_L_vanishes else None
        if h0 is None:
            return False, {}, "h0(K + L) is not known to vanish"
        inv = node_double_cover_invariants(yp.chi, yp.K2, len(self.report.inventory),
                                           union.L_squared, union.L_dot_K, h0, yp.p_g, union.valid)
        self.report.levels["S'"] = LevelRecord("S'", inv["chi"], inv["p_g"], inv["q"], inv["K2_cover"],
                                               0, inv["K2_minimal"], yp.canonical_pullback,
                                               "double cover of Y' branched on the exceptional curves")
        self.report.levels["S"] = LevelRecord("S", inv["chi"], inv["p_g"], inv["q"], inv["K2_minimal"],
                                              0, inv["K2_minimal"], yp.canonical_pullback,
                                              f"contract {inv['exceptional_curves']} (-1)-curves")
        got = (inv["chi"], inv["p_g"], inv["q"], inv["K2_minimal"])
        return got == EXPECTED["S"], inv, f"invariants of S are {got}"

    def degree_bound(self):
        s = self.report.levels["S"]
        d = s.canonical_degree
        bound = beauville_bound(s.q)
        self.report.bound = bound
        ok = d == EXPECTED["degree"] and d is not None and d <= bound.bound
        return ok, {"degree": d, "bound": bound.bound, "flag": bound.flag,
                    "degree_Y": self.report.levels["Y"].canonical_degree,
                    "degree_X": self.report.levels["X"].canonical_degree}, f"degree {d} vs bound {bound.bound}"


def _tangency(conf: Configuration, conic, line):
    from .config import tangency_point
    return tangency_point(conic, line)


def run_pipeline(cfg: RunConfig | None = None, timing: bool = False) -> TowerReport:
    """Run every check in order; the first failure stops the run.

    Configuration errors propagate as :class:`ConfigurationError`; any other
    failure is recorded on the report with the stage that produced it.
    """
    run = _Run(cfg or RunConfig(), timing)
    try:
        for key, _ in CHECKS:
            run.check(key, getattr(run, key))
    except StageFailure as exc:
        run.report.failed_stage = exc.check.stage
        run.report.error = exc.check.message
    except ConfigurationError:
        raise
    except Exception as exc:  # noqa: BLE001 - reported with its stage
        stage = dict(CHECKS)[CHECKS[len(run.report.checks)][0]]
        run.report.failed_stage = stage
        run.report.error = f"{type(exc).__name__}: {exc}"
    return run.report
