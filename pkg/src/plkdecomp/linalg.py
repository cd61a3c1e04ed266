"""Exact rational linear algebra.

Everything here works on :class:`fractions.Fraction` entries. Subspaces are
stored in canonical reduced row-echelon form so two subspaces are equal iff
their bases are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]


def as_fraction(value) -> Fraction:
    """Convert ints, strings ("0.36", "3/4") and Fractions exactly.

    Floats are converted through ``repr`` so that ``0.36`` becomes 9/25 and not
    the binary approximation.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def as_vector(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> Matrix:
        rows = [as_vector(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> Matrix:
        return cls.from_rows(columns, cols=rows).T

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> Matrix:
        return cls.from_rows(
            [[1 if i == j else 0 for j in range(size)] for i in range(size)], cols=size
        )

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def row_list(self) -> list[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def col_list(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> Matrix:
        return Matrix(
            self.cols,
            self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        other_cols = other.col_list()
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in other_cols:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return Matrix(self.rows, other.cols, tuple(out))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def select_columns(self, indices: Sequence[int]) -> Matrix:
        return Matrix.from_columns([self.col(j) for j in indices], rows=self.rows)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.row_list()]


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form of the given rows.

    Pivoting takes the first row (top down) with a nonzero entry in the current
    column. Returns the nonzero reduced rows and their pivot columns.
    """
    m = [[as_fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    prow = 0
    for c in range(ncols):
        if prow == len(m):
            break
        sel = next((i for i in range(prow, len(m)) if m[i][c] != 0), None)
        if sel is None:
            continue
        m[prow], m[sel] = m[sel], m[prow]
        p = m[prow][c]
        if p != 1:
            m[prow] = [x / p for x in m[prow]]
        pr = m[prow]
        for i in range(len(m)):
            if i != prow and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], pr)]
        pivots.append(c)
        prow += 1
    return m[:prow], pivots


def rank(M: Matrix) -> int:
    """Dimension of the row space of ``M``."""
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(rref(M.row_list(), M.cols)[1])


def nullspace(M: Matrix) -> list[Vector]:
    """Basis of ``{x : M x = 0}``, one vector per free column."""
    red, pivots = rref(M.row_list(), M.cols)
    free = [c for c in range(M.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for r, pc in zip(red, pivots):
            v[pc] = -r[f]
        basis.append(tuple(v))
    return basis


def plu(M: Matrix) -> tuple[list[int], Matrix, Matrix]:
    """Row-permuted LU factorization ``M[perm] = L @ U``.

    ``L`` is unit lower triangular (rows x rows) and ``U`` is in row-echelon
    form. Works for rank-deficient and rectangular matrices.
    """
    n, m = M.rows, M.cols
    U = [list(M.row(i)) for i in range(n)]
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    perm = list(range(n))
    prow = 0
    for c in range(m):
        if prow == n:
            break
        sel = next((i for i in range(prow, n) if U[i][c] != 0), None)
        if sel is None:
            continue
        if sel != prow:
            U[prow], U[sel] = U[sel], U[prow]
            perm[prow], perm[sel] = perm[sel], perm[prow]
            # swap the already-computed multipliers
            for j in range(prow):
                L[prow][j], L[sel][j] = L[sel][j], L[prow][j]
        for i in range(prow + 1, n):
            if U[i][c] != 0:
                f = U[i][c] / U[prow][c]
                L[i][prow] = f
                U[i] = [a - f * b for a, b in zip(U[i], U[prow])]
        prow += 1
    return perm, Matrix.from_rows(L, cols=n), Matrix.from_rows(U, cols=m)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of ``Q^ambient_dim`` with a canonical RREF basis."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> Subspace:
        vecs = [as_vector(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError(f"vector of length {len(v)} in {ambient_dim}-space")
        red, _ = rref(vecs, ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> Subspace:
        return cls.span(Matrix.identity(ambient_dim).row_list(), ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v: Sequence) -> bool:
        return Subspace.span(self.basis + (as_vector(v),), self.ambient_dim).dim == self.dim

    def basis_matrix(self) -> Matrix:
        """Basis vectors as rows."""
        return Matrix.from_rows(self.basis, cols=self.ambient_dim)


def column_space(M: Matrix) -> Subspace:
    return Subspace.span(M.col_list(), M.rows)


def _check_ambient(A: Subspace, B: Subspace) -> None:
    if A.ambient_dim != B.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {A.ambient_dim} vs {B.ambient_dim}")


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    _check_ambient(A, B)
    return Subspace.span(A.basis + B.basis, A.ambient_dim)


def sum_of(spaces: Sequence[Subspace], ambient_dim: int) -> Subspace:
    return Subspace.span([v for S in spaces for v in S.basis], ambient_dim)


def subspace_intersection_dim(A: Subspace, B: Subspace) -> int:
    return A.dim + B.dim - subspace_sum(A, B).dim


def orthogonal_complement(A: Subspace) -> Subspace:
    if A.dim == 0:
        return Subspace.full(A.ambient_dim)
    return Subspace.span(nullspace(A.basis_matrix()), A.ambient_dim)


def coordinates(v: Sequence, basis: Sequence[Sequence]) -> Vector | None:
    """Coefficients ``a`` with ``v = sum a_j basis[j]``, or None if outside the span.

    ``basis`` must be linearly independent.
    """
    v = as_vector(v)
    k = len(basis)
    aug = [list(as_vector(b[i] for b in basis)) + [v[i]] for i in range(len(v))]
    red, pivots = rref(aug, k + 1)
    if k in pivots:
        return None
    if len(pivots) != k:
        raise ValueError("basis vectors are linearly dependent")
    return tuple(r[k] for r in red)


def float_matrix(vectors: Sequence[Sequence[Fraction]], ncols: int):
    import numpy as np

    if not vectors:
        return np.zeros((0, ncols))
    return np.array([[float(x) for x in v] for v in vectors], dtype=float)
