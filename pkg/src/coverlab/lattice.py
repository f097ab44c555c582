"""Intersection numbers on the resolution of a nodal cover.

The basis is F (pullback of a general line) and the exceptional (-2)-curves
A_1..A_n, with F.F = deg, F.A_i = 0 and A_i.A_j = -2 delta_ij.  Further
classes may be declared with explicit pairing rows; nothing else about them
is known, so every identity they enter is audited against all pairings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .field import as_fraction


class MissingPairingError(KeyError):
    pass


class InconsistentMultiplicitiesError(ValueError):
    pass


def A(i: int) -> str:
    return f"A{i}"


class Lattice:
    def __init__(self, nodes: int, f_square: int, canonical_multiple: Fraction | int = 1):
        self.nodes = nodes
        self.f_square = Fraction(f_square)
        # K of the resolution is canonical_multiple * F (nodes are crepant)
        self.canonical_multiple = Fraction(canonical_multiple)
        self._declared: dict[str, dict[str, Fraction]] = {}

    @property
    def basis(self) -> list[str]:
        return ["F"] + [A(i) for i in range(1, self.nodes + 1)]

    @property
    def declared(self) -> list[str]:
        return list(self._declared)

    @property
    def names(self) -> list[str]:
        return self.basis + self.declared

    def _is_basis(self, name: str) -> bool:
        if name == "F":
            return True
        return name.startswith("A") and name[1:].isdigit() and 1 <= int(name[1:]) <= self.nodes

    def declare(self, name: str, row: Mapping[str, object]) -> LatticeClass:
        """Add a class with pairings against F, the A_i and earlier declared classes.

        Pairings with A_i that are not listed are zero.  ``row[name]`` is the
        self-intersection.
        """
        if name in self._declared or self._is_basis(name):
            raise ValueError(f"{name} is already a class")
        if "F" not in row or name not in row:
            raise MissingPairingError(f"{name} needs pairings with F and with itself")
        clean = {}
        for k, v in row.items():
            if k != name and not self._is_basis(k) and k not in self._declared:
                raise MissingPairingError(f"{name} is paired with unknown class {k}")
            clean[k] = as_fraction(v)
        self._declared[name] = clean
        return self.cls(name)

    def pair(self, a: str, b: str) -> Fraction:
        if self._is_basis(a) and self._is_basis(b):
            if a == "F" or b == "F":
                return self.f_square if a == b else Fraction(0)
            return Fraction(-2) if a == b else Fraction(0)
        for x, y in ((a, b), (b, a)):
            if x in self._declared:
                row = self._declared[x]
                if y in row:
                    return row[y]
                if y.startswith("A") and self._is_basis(y):
                    return Fraction(0)
        raise MissingPairingError(f"no pairing between {a} and {b}")

    def cls(self, name: str | None = None, **coeffs) -> LatticeClass:
        terms = {name: Fraction(1)} if name else {}
        for k, v in coeffs.items():
            terms[k] = terms.get(k, Fraction(0)) + as_fraction(v)
        return LatticeClass(self, terms)

    def F(self) -> LatticeClass:
        return self.cls("F")

    def exceptional_sum(self, subset: Iterable[int]) -> LatticeClass:
        return LatticeClass(self, {A(i): Fraction(1) for i in subset})

    def canonical(self) -> LatticeClass:
        return LatticeClass(self, {"F": self.canonical_multiple})


@dataclass(frozen=True, eq=False)
class LatticeClass:
    lattice: Lattice
    coeffs: Mapping[str, Fraction]

    def __post_init__(self):
        for k in self.coeffs:
            if k not in self.lattice.names and not self.lattice._is_basis(k):
                raise MissingPairingError(f"unknown class {k}")
        object.__setattr__(self, "coeffs", {k: Fraction(v) for k, v in self.coeffs.items() if v})

    def __add__(self, other: LatticeClass) -> LatticeClass:
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return LatticeClass(self.lattice, out)

    def __neg__(self):
        return LatticeClass(self.lattice, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: LatticeClass) -> LatticeClass:
        return self + (-other)

    def __rmul__(self, c) -> LatticeClass:
        c = as_fraction(c)
        return LatticeClass(self.lattice, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other: LatticeClass) -> Fraction:
        return intersect(self, other)

    def coefficient(self, name: str) -> Fraction:
        return self.coeffs.get(name, Fraction(0))

    def square(self) -> Fraction:
        return intersect(self, self)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.coeffs.items():
            parts.append(k if v == 1 else f"{v}*{k}")
        return " + ".join(parts)


def intersect(a: LatticeClass, b: LatticeClass) -> Fraction:
    if a.lattice is not b.lattice:
        raise ValueError("classes live on different lattices")
    lat = a.lattice
    total = Fraction(0)
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            total += va * vb * lat.pair(ka, kb)
    return total


@dataclass(frozen=True)
class TotalTransform:
    """Pullback of a plane curve of the given degree, with multiplicities along the A_i."""

    lattice: Lattice
    degree: int
    multiplicities: Mapping[int, int]

    @property
    def pullback(self) -> LatticeClass:
        return self.degree * self.lattice.F()

    def exceptional_part(self) -> LatticeClass:
        return LatticeClass(self.lattice, {A(i): m for i, m in self.multiplicities.items()})

    def check_decomposition(self, strict: LatticeClass) -> None:
        """``strict + sum m_i A_i`` must pair like the pullback with F and every A_i."""
        total = strict + self.exceptional_part()
        bad = [i for i in range(1, self.lattice.nodes + 1)
               if intersect(total, self.lattice.cls(A(i))) != 0]
        if bad:
            raise InconsistentMultiplicitiesError(
                f"decomposition is not orthogonal to A_i for i in {bad}")
        if intersect(total, self.lattice.F()) != intersect(self.pullback, self.lattice.F()):
            raise InconsistentMultiplicitiesError("decomposition has the wrong degree")


def total_transform(lattice: Lattice, degree: int, multiplicities: Mapping[int, int] | None = None,
                    strict: LatticeClass | None = None) -> TotalTransform:
    """Total transform of a degree-``degree`` curve; validated against ``strict`` when given."""
    mults = dict(multiplicities or {})
    if any(m < 0 for m in mults.values()):
        raise InconsistentMultiplicitiesError("multiplicities must be nonnegative")
    tt = TotalTransform(lattice, degree, mults)
    if strict is not None:
        tt.check_decomposition(strict)
    return tt


def multiplicities_from_strict(lattice: Lattice, strict: LatticeClass) -> dict[int, int]:
    """Solve orthogonality for m_i: (strict + m_i A_i).A_i = 0 gives m_i = strict.A_i / 2."""
    out = {}
    for i in range(1, lattice.nodes + 1):
        m = intersect(strict, lattice.cls(A(i))) / 2
        if m.denominator != 1 or m < 0:
            raise InconsistentMultiplicitiesError(f"A{i}: multiplicity {m} is not a nonnegative integer")
        if m:
            out[i] = int(m)
    return out


# even sets ---------------------------------------------------------------------

@dataclass(frozen=True)
class EvenSetCertificate:
    """``lhs = 2 * witness + sum_{i in subset} A_i`` in the lattice."""

    name: str
    subset: frozenset[int]
    lhs: LatticeClass
    witness: LatticeClass
    description: str = ""

    @property
    def rhs(self) -> LatticeClass:
        return 2 * self.witness + self.lhs.lattice.exceptional_sum(self.subset)


@dataclass
class EvenSetResult:
    name: str
    subset: frozenset[int]
    valid: bool
    reasons: list[str]
    audit: dict[str, tuple[Fraction, Fraction]] = field(default_factory=dict)
    L_squared: Fraction | None = None
    L_dot_K: Fraction | None = None
    certificate: EvenSetCertificate | None = None
    parts: tuple[EvenSetResult, ...] = ()

    @property
    def status(self) -> str:
        return "certified" if self.valid else "not certified"

    def __bool__(self):
        return self.valid


def half_class(subset: Iterable[int], lattice: Lattice | None = None) -> tuple[Fraction, Fraction]:
    """(L^2, L.K) for L = (1/2) sum_{i in subset} A_i."""
    subset = set(subset)
    if lattice is None:
        return Fraction(-len(subset), 2), Fraction(0)
    L = Fraction(1, 2) * lattice.exceptional_sum(subset)
    return L.square(), intersect(L, lattice.canonical())


def even_set_check(cert: EvenSetCertificate) -> EvenSetResult:
    """Audit a witness identity and return L = (1/2) sum A_i with L^2 and L.K.

    A failure means "not certified" by this witness; it says nothing about
    divisibility in the Picard group.
    """
    lat = cert.lhs.lattice
    reasons: list[str] = []
    rhs = cert.rhs
    if not cert.subset <= set(range(1, lat.nodes + 1)):
        reasons.append("subset contains indices that are not nodes")
    for name, c in cert.witness.coeffs.items():
        if c.denominator != 1:
            reasons.append(f"witness coefficient of {name} is not an integer")
    audit = {}
    for name in lat.names:
        v = lat.cls(name)
        try:
            audit[name] = (intersect(cert.lhs, v), intersect(rhs, v))
        except MissingPairingError as exc:
            reasons.append(f"pairing with {name} is undetermined: {exc}")
            continue
        if audit[name][0] != audit[name][1]:
            reasons.append(f"pairing with {name}: {audit[name][0]} != {audit[name][1]}")
    try:
        lhs_sq, rhs_sq = cert.lhs.square(), rhs.square()
        audit["self"] = (lhs_sq, rhs_sq)
        if lhs_sq != rhs_sq:
            reasons.append(f"self-intersection: {lhs_sq} != {rhs_sq}")
        w_rows = [intersect(cert.witness, lat.cls(n)) for n in lat.basis]
        if any(x.denominator != 1 for x in w_rows):
            reasons.append("witness has a non-integral pairing with the basis")
    except MissingPairingError as exc:
        reasons.append(str(exc))
    # the half class computed through the witness: L = lhs/2 - witness
    L_sq = L_K = None
    try:
        L = Fraction(1, 2) * cert.lhs - cert.witness
        L_sq, L_K = L.square(), intersect(L, lat.canonical())
        direct = half_class(cert.subset, lat)
        if (L_sq, L_K) != direct:
            reasons.append(f"half class through the witness {(L_sq, L_K)} differs from {direct}")
        if L_sq.denominator != 1:
            reasons.append(f"L^2 = {L_sq} is not an integer")
        elif (L_sq + L_K) % 2:
            reasons.append(f"L^2 + L.K = {L_sq + L_K} is odd")
    except MissingPairingError as exc:
        reasons.append(str(exc))
    return EvenSetResult(cert.name, cert.subset, not reasons, reasons, audit, L_sq, L_K, cert)


def compose(first: EvenSetResult, second: EvenSetResult, lattice: Lattice,
            name: str = "union") -> EvenSetResult:
    """The union of two certified, disjoint even sets is certified with L = L1 + L2."""
    reasons = []
    if not first.valid or not second.valid:
        reasons.append("a component certificate is not certified")
    if first.subset & second.subset:
        reasons.append("supports are not disjoint")
    L1 = Fraction(1, 2) * lattice.exceptional_sum(first.subset)
    L2 = Fraction(1, 2) * lattice.exceptional_sum(second.subset)
    L = L1 + L2
    L_sq, L_K = L.square(), intersect(L, lattice.canonical())
    if first.L_squared is not None and second.L_squared is not None:
        if L_sq != first.L_squared + second.L_squared + 2 * intersect(L1, L2):
            reasons.append("L^2 does not decompose as L1^2 + 2 L1.L2 + L2^2")
    subset = first.subset | second.subset
    if (L_sq, L_K) != half_class(subset):
        reasons.append("half class of the union disagrees with the closed formula")
    return EvenSetResult(name, subset, not reasons, reasons, {}, L_sq, L_K, None, (first, second))
