"""Exact Gaussian elimination over rationals and square-root towers."""

from __future__ import annotations

from typing import Sequence

from .field import FieldElement


class ExactMatrix:
    """Dense matrix of :class:`FieldElement` entries."""

    def __init__(self, rows: Sequence[Sequence[object]], ncols: int | None = None):
        self.rows = [[FieldElement.coerce(v) for v in row] for row in rows]
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")
        self.ncols = ncols

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> ExactMatrix:
        return cls([[0] * n for _ in range(m)], n)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> list[FieldElement]:
        return [row[j] for row in self.rows]

    def submatrix(self, columns: Sequence[int]) -> ExactMatrix:
        return ExactMatrix([[row[j] for j in columns] for row in self.rows], len(columns))

    def apply(self, vector: Sequence[object]) -> list[FieldElement]:
        if len(vector) != self.ncols:
            raise ValueError("dimension mismatch")
        vec = [FieldElement.coerce(v) for v in vector]
        out = []
        for row in self.rows:
            acc = FieldElement()
            for a, b in zip(row, vec):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def rref(self) -> tuple[list[list[FieldElement]], list[int]]:
        """Reduced row echelon form and pivot columns (first nonzero pivoting)."""
        m = [list(row) for row in self.rows]
        pivots: list[int] = []
        r = 0
        for c in range(self.ncols):
            pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
            if pivot is None:
                continue
            m[r], m[pivot] = m[pivot], m[r]
            inv = m[r][c].inverse()
            m[r] = [v * inv if v else v for v in m[r]]
            for i in range(len(m)):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [a - f * b if b else a for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == len(m):
                break
        return m, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> list[list[FieldElement]]:
        """Basis of the right null space, one vector per free column."""
        reduced, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [FieldElement() for _ in range(self.ncols)]
            v[f] = FieldElement.coerce(1)
            for row, p in zip(reduced, pivots):
                if row[f]:
                    v[p] = -row[f]
            basis.append(v)
        return basis

    def to_strings(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.rows]


def kernel(matrix: ExactMatrix) -> list[list[FieldElement]]:
    return matrix.kernel()


def proportional(u: Sequence[FieldElement], v: Sequence[FieldElement]) -> bool:
    """True when u and v span the same line (both nonzero)."""
    u = [FieldElement.coerce(a) for a in u]
    v = [FieldElement.coerce(a) for a in v]
    i = next((k for k, a in enumerate(u) if a), None)
    if i is None or not v[i]:
        return False
    ratio = v[i] / u[i]
    return all(b == a * ratio for a, b in zip(u, v))
