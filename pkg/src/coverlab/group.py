"""Elementary abelian 2-groups G = Z_2^r and their characters.

Elements and characters are both bit vectors of length r.  An element
``x^a y^b z^c`` has bits ``(a, b, c)``; a character with bits ``(e_1, ..., e_r)``
sends that element to ``(-1)^(a e_1 + b e_2 + c e_3)``.  The group is self-dual,
but the two types are kept apart so a character is never passed where an
element is expected.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

MAX_RANK = 8

DEFAULT_GENERATORS = ("x", "y", "z", "w", "v", "t", "s", "q")


class DimensionError(ValueError):
    """Raised when objects living in groups of different rank are combined."""


def _check_bits(bits: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0/1, got {bits!r}")
    return out


@dataclass(frozen=True, order=True)
class GroupElement:
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", _check_bits(self.bits))

    @property
    def r(self) -> int:
        return len(self.bits)

    @classmethod
    def identity(cls, r: int) -> GroupElement:
        return cls((0,) * r)

    @classmethod
    def from_word(cls, word: str, generators: Sequence[str] | None = None) -> GroupElement:
        """Parse ``"xyz"``, ``"x*y*z"`` or ``"Id"`` over the given generator names."""
        generators = tuple(generators or DEFAULT_GENERATORS[:3])
        bits = [0] * len(generators)
        word = word.strip()
        if word in ("Id", "1", "e", ""):
            return cls(tuple(bits))
        for letter in word.replace("*", ""):
            if letter not in generators:
                raise ValueError(f"unknown generator {letter!r} in {word!r}")
            i = generators.index(letter)
            bits[i] ^= 1
        return cls(tuple(bits))

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.r != self.r:
            raise DimensionError(f"rank mismatch: {self.r} vs {other.r}")
        return GroupElement(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def is_identity(self) -> bool:
        return not any(self.bits)

    def as_int(self) -> int:
        return int("".join(map(str, self.bits)), 2) if self.bits else 0

    def label(self, generators: Sequence[str] | None = None) -> str:
        generators = generators or DEFAULT_GENERATORS
        if self.is_identity():
            return "Id"
        return "*".join(g for g, b in zip(generators, self.bits) if b)

    def __str__(self):
        return self.label()


@dataclass(frozen=True, order=True)
class Character:
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", _check_bits(self.bits))

    @property
    def r(self) -> int:
        return len(self.bits)

    @classmethod
    def trivial(cls, r: int) -> Character:
        return cls((0,) * r)

    def is_trivial(self) -> bool:
        return not any(self.bits)

    def __add__(self, other: Character) -> Character:
        # the dual group is written additively
        if not isinstance(other, Character):
            return NotImplemented
        if other.r != self.r:
            raise DimensionError(f"rank mismatch: {self.r} vs {other.r}")
        return Character(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __call__(self, sigma: GroupElement) -> int:
        return char_eval(self, sigma)

    def label(self) -> str:
        return "chi[" + "".join(map(str, self.bits)) + "]"

    def __str__(self):
        return self.label()


def char_eval(chi: Character, sigma: GroupElement) -> int:
    """Return chi(sigma) in {+1, -1}."""
    if chi.r != sigma.r:
        raise DimensionError(f"character has rank {chi.r}, element has rank {sigma.r}")
    dot = sum(a & b for a, b in zip(chi.bits, sigma.bits))
    return -1 if dot % 2 else 1


def elements(r: int) -> list[GroupElement]:
    """All elements of Z_2^r in lexicographic order of their bit vectors."""
    _check_rank(r)
    return [GroupElement(bits) for bits in product((0, 1), repeat=r)]


def characters(r: int) -> list[Character]:
    _check_rank(r)
    return [Character(bits) for bits in product((0, 1), repeat=r)]


def _check_rank(r: int) -> None:
    if not isinstance(r, int) or r < 1 or r > MAX_RANK:
        raise ValueError(f"rank must be an integer in [1, {MAX_RANK}], got {r!r}")


@dataclass(frozen=True)
class CharacterTable:
    """Sign matrix ``values[i][j] = columns[j](rows[i])``.

    Rows are group elements, columns are characters, both in lexicographic
    bit order unless the table has been reordered.
    """

    rows: tuple[GroupElement, ...]
    columns: tuple[Character, ...]
    values: tuple[tuple[int, ...], ...]

    def reorder(self, rows: Sequence[GroupElement], columns: Sequence[Character]) -> CharacterTable:
        if sorted(rows) != sorted(self.rows) or sorted(columns) != sorted(self.columns):
            raise ValueError("reordering must be a permutation of rows and columns")
        values = tuple(tuple(char_eval(c, g) for c in columns) for g in rows)
        return CharacterTable(tuple(rows), tuple(columns), values)

    def format(self, generators: Sequence[str] | None = None) -> str:
        lines = []
        for g, row in zip(self.rows, self.values):
            cells = "".join(f"{v:6d}" for v in row)
            lines.append(f"[{cells} {g.label(generators):>5}]")
        return "\n".join(lines)


def character_table(r: int) -> CharacterTable:
    _check_rank(r)
    rows = tuple(elements(r))
    cols = tuple(characters(r))
    values = tuple(tuple(char_eval(c, g) for c in cols) for g in rows)
    return CharacterTable(rows, cols, values)


# The row order in which the Z_2^3 table is customarily printed with
# generators x, y, z: xyz, z, y, x, yz, xz, xy, Id.  Column j is the
# character dual to row j under the standard pairing.
PRINTED_ROW_WORDS_R3 = ("xyz", "z", "y", "x", "yz", "xz", "xy", "Id")


def printed_order_r3() -> tuple[list[GroupElement], list[Character]]:
    rows = [GroupElement.from_word(w) for w in PRINTED_ROW_WORDS_R3]
    cols = [Character(g.bits) for g in rows]
    return rows, cols


def subgroup_generated(elems: Iterable[GroupElement], r: int | None = None) -> frozenset[GroupElement]:
    """Closure of ``elems`` under the group law; always contains the identity."""
    elems = list(elems)
    if r is None:
        if not elems:
            raise ValueError("rank is needed to generate from the empty set")
        r = elems[0].r
    if any(e.r != r for e in elems):
        raise DimensionError("elements of different rank")
    group = {GroupElement.identity(r)}
    for e in elems:
        if e in group:
            continue
        group |= {g * e for g in group}
    return frozenset(group)


def annihilator(subgroup: Iterable[GroupElement], r: int) -> list[Character]:
    """Characters trivial on every element of ``subgroup``, in lexicographic order."""
    subgroup = list(subgroup)
    return [c for c in characters(r) if all(char_eval(c, g) == 1 for g in subgroup)]


def coset_representatives(subgroup: frozenset[GroupElement], r: int) -> list[GroupElement]:
    """Lexicographically smallest element of each coset, sorted."""
    seen: set[GroupElement] = set()
    reps = []
    for g in elements(r):
        if g in seen:
            continue
        reps.append(g)
        seen |= {g * h for h in subgroup}
    return reps
