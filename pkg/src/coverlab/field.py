"""Exact arithmetic in multiquadratic towers Q(sqrt(a_1), ..., sqrt(a_k)).

An element is stored as a map ``mask -> Fraction`` where ``mask`` selects a
product of generators ``s_j`` (``s_j**2 = a_j``).  Radicands are squarefree
integers whose classes modulo squares are linearly independent over GF(2),
so the representation is canonical and equality is a dict comparison.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from numbers import Rational
from typing import Union

from sympy import factorint

Scalar = Union[int, Fraction, "FieldElement"]


class DegenerateInputError(ValueError):
    pass


class TowerMismatchError(ValueError):
    pass


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not field elements")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational (floats are not accepted)")


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational if it is rational, else None."""
    q = as_fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def squarefree_decomposition(q: Fraction) -> tuple[int, Fraction]:
    """Write ``q = m * c**2`` with ``m`` a squarefree integer and ``c > 0`` rational."""
    q = as_fraction(q)
    if q == 0:
        raise DegenerateInputError("zero has no squarefree part")
    sign = -1 if q < 0 else 1
    n = abs(q.numerator) * q.denominator
    m, c = 1, 1
    for p, e in factorint(n).items():
        if e % 2:
            m *= p
        c *= p ** (e // 2)
    # q = sign * n / den^2 = sign * m * (c/den)^2
    return sign * m, Fraction(c, q.denominator)


def _prime_vector(m: int) -> frozenset[int]:
    # -1 is treated as one more "prime" so negative radicands are handled uniformly
    primes = set(p for p in factorint(abs(m)))
    if m < 0:
        primes.add(-1)
    return frozenset(primes)


class SqrtTower:
    """A growing multiquadratic extension of Q.

    Generators are added lazily by :meth:`sqrt`.  Elements created earlier stay
    valid when the tower grows, since they only refer to generator indices.
    """

    def __init__(self):
        self.radicands: list[int] = []
        # echelon basis over GF(2): (pivot, prime set, generator mask)
        self._basis: list[tuple[int, frozenset[int], int]] = []

    def __len__(self):
        return len(self.radicands)

    @property
    def degree(self) -> int:
        return 2 ** len(self.radicands)

    def __repr__(self):
        gens = ", ".join(f"sqrt({a})" for a in self.radicands)
        return f"SqrtTower(Q({gens}))" if gens else "SqrtTower(Q)"

    def _reduce(self, primes: frozenset[int]) -> tuple[frozenset[int], int]:
        v, mask = set(primes), 0
        for pivot, vec, m in self._basis:
            if pivot in v:
                v ^= vec
                mask ^= m
        return frozenset(v), mask

    def rational(self, q) -> FieldElement:
        return FieldElement({0: as_fraction(q)}, self)

    def generator(self, j: int) -> FieldElement:
        return FieldElement({1 << j: Fraction(1)}, self)

    def contains_sqrt(self, a) -> bool:
        m, _ = squarefree_decomposition(as_fraction(a))
        rest, _ = self._reduce(_prime_vector(m))
        return not rest

    def sqrt(self, a) -> FieldElement:
        """Return the canonical square root of the nonzero rational ``a``.

        If ``a`` is already a square in the tower the root is expressed in the
        existing generators; otherwise a new generator is adjoined.
        """
        a = as_fraction(a)
        if a == 0:
            raise DegenerateInputError("cannot adjoin the square root of 0")
        m, c = squarefree_decomposition(a)
        if m == 1:
            return self.rational(c)
        rest, mask = self._reduce(_prime_vector(m))
        if rest:
            j = len(self.radicands)
            self.radicands.append(m)
            self._insert(_prime_vector(m), 1 << j)
            return FieldElement({1 << j: c}, self)
        # prod_{j in mask} a_j = m * k^2 with k > 0
        prod = 1
        for j in range(len(self.radicands)):
            if mask >> j & 1:
                prod *= self.radicands[j]
        k = rational_sqrt(Fraction(prod, m))
        assert k is not None and k > 0
        return FieldElement({mask: c / k}, self)

    adjoin_sqrt = sqrt

    def _insert(self, primes: frozenset[int], mask: int) -> None:
        v, mask = set(primes), mask
        for pivot, vec, m in self._basis:
            if pivot in v:
                v ^= vec
                mask ^= m
        pivot = max(v)
        new_rows = []
        for p, vec, m in self._basis:
            if pivot in vec:
                vec = vec ^ frozenset(v)
                m ^= mask
            new_rows.append((p, vec, m))
        new_rows.append((pivot, frozenset(v), mask))
        self._basis = sorted(new_rows, key=lambda row: -row[0])

    def mask_product(self, mask_a: int, mask_b: int) -> tuple[int, int]:
        """``s_A * s_B = factor * s_(A xor B)``; returns ``(factor, mask)``."""
        both = mask_a & mask_b
        factor = 1
        j = 0
        while both:
            if both & 1:
                factor *= self.radicands[j]
            both >>= 1
            j += 1
        return factor, mask_a ^ mask_b


class FieldElement:
    """Immutable element of a :class:`SqrtTower` (or of Q when ``tower`` is None)."""

    __slots__ = ("coeffs", "tower")

    def __init__(self, coeffs: dict[int, Fraction] | None = None, tower: SqrtTower | None = None):
        clean = {m: Fraction(c) for m, c in (coeffs or {}).items() if c != 0}
        if tower is None and any(m for m in clean):
            raise TowerMismatchError("irrational element needs a tower")
        self.coeffs = clean
        self.tower = tower

    @classmethod
    def coerce(cls, value, tower: SqrtTower | None = None) -> FieldElement:
        if isinstance(value, FieldElement):
            return value
        return cls({0: as_fraction(value)}, tower)

    def _common(self, other) -> tuple[FieldElement, SqrtTower | None]:
        other = FieldElement.coerce(other)
        if self.tower is None or other.tower is None or self.tower is other.tower:
            return other, self.tower or other.tower
        if self.is_rational() and other.is_rational():
            return other, self.tower
        raise TowerMismatchError("elements belong to different towers")

    def is_rational(self) -> bool:
        return all(m == 0 for m in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs.get(0, Fraction(0))

    def __add__(self, other):
        try:
            other, tower = self._common(other)
        except TypeError:
            return NotImplemented
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return FieldElement(out, tower)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement({m: -c for m, c in self.coeffs.items()}, self.tower)

    def __sub__(self, other):
        try:
            other, _ = self._common(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other, tower = self._common(other)
        except TypeError:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                if ma & mb:
                    factor, m = tower.mask_product(ma, mb)
                else:
                    factor, m = 1, ma | mb
                out[m] = out.get(m, 0) + ca * cb * factor
        return FieldElement(out, tower)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return FieldElement({0: 1 / self.coeffs[0]}, self.tower)
        top = max(m.bit_length() for m in self.coeffs) - 1
        bit = 1 << top
        # x = a + b s_top  ->  x (a - b s_top) = a^2 - a_top b^2 lies in a smaller tower
        conj = FieldElement(
            {m: (-c if m & bit else c) for m, c in self.coeffs.items()}, self.tower
        )
        norm = self * conj
        return conj * norm.inverse()

    def __truediv__(self, other):
        other = FieldElement.coerce(other, self.tower)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return FieldElement.coerce(other, self.tower) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = FieldElement({0: Fraction(1)}, self.tower)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            other = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def _monomial_str(self, mask: int) -> str:
        parts = []
        j = 0
        while mask:
            if mask & 1:
                parts.append(f"sqrt({self.tower.radicands[j]})")
            mask >>= 1
            j += 1
        return "*".join(parts)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for m in sorted(self.coeffs):
            c = self.coeffs[m]
            if m == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(self._monomial_str(m))
            elif c == -1:
                terms.append("-" + self._monomial_str(m))
            else:
                terms.append(f"{c}*{self._monomial_str(m)}")
        return " + ".join(terms).replace("+ -", "- ")

    def __repr__(self):
        return f"FieldElement({self})"
