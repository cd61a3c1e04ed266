from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from plkdecomp.linalg import (
    Matrix,
    Subspace,
    as_fraction,
    coordinates,
    nullspace,
    orthogonal_complement,
    plu,
    rank,
    rref,
    subspace_intersection_dim,
    subspace_sum,
)

from .strategies import fraction_matrices


def _sympy(rows):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])


def test_decimal_strings_are_exact():
    assert as_fraction("0.36") == Fraction(9, 25)
    assert as_fraction(0.36) == Fraction(9, 25)
    assert as_fraction("9.4") == Fraction(47, 5)


def test_matrix_shape_checks():
    with pytest.raises(ValueError):
        Matrix.from_rows([[1, 2], [3]])
    M = Matrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert M.shape == (2, 3)
    assert M.T.shape == (3, 2)
    assert (M @ M.T).tolist() == [[14, 32], [32, 77]]


@given(fraction_matrices())
def test_rank_matches_sympy(data):
    rows, cols = data
    assert rank(Matrix.from_rows(rows, cols=cols)) == _sympy(rows).rank()


@given(fraction_matrices())
def test_rref_matches_sympy(data):
    rows, cols = data
    red, pivots = rref(rows, cols)
    ref, ref_piv = _sympy(rows).rref()
    assert tuple(pivots) == ref_piv
    for i, r in enumerate(red):
        assert [sympy.Rational(x.numerator, x.denominator) for x in r] == list(ref.row(i))


@given(fraction_matrices())
def test_nullspace_is_kernel_with_right_dimension(data):
    rows, cols = data
    M = Matrix.from_rows(rows, cols=cols)
    ns = nullspace(M)
    assert len(ns) == cols - rank(M)
    for v in ns:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


@given(fraction_matrices())
def test_plu_reconstructs(data):
    rows, cols = data
    M = Matrix.from_rows(rows, cols=cols)
    perm, L, U = plu(M)
    assert (L @ U).tolist() == [list(M.row(p)) for p in perm]
    for i in range(L.rows):
        assert L[i, i] == 1 and all(L[i, j] == 0 for j in range(i + 1, L.cols))


@given(fraction_matrices(), fraction_matrices())
def test_dimension_formula(a, b):
    (ra, ca), (rb, cb) = a, b
    n = min(ca, cb)
    A = Subspace.span([r[:n] for r in ra], n)
    B = Subspace.span([r[:n] for r in rb], n)
    S = subspace_sum(A, B)
    assert S.dim == A.dim + B.dim - subspace_intersection_dim(A, B)
    assert all(v in S for v in A.basis + B.basis)


@given(fraction_matrices())
def test_orthogonal_complement(data):
    rows, cols = data
    A = Subspace.span(rows, cols)
    P = orthogonal_complement(A)
    assert A.dim + P.dim == cols
    assert all(sum(x * y for x, y in zip(u, v)) == 0 for u in A.basis for v in P.basis)
    assert orthogonal_complement(P) == A


def test_canonical_basis_makes_equal_spans_equal():
    A = Subspace.span([(1, 1, 0), (0, 1, 1)], 3)
    B = Subspace.span([(1, 2, 1), (1, 0, -1), (2, 2, 0)], 3)
    assert A == B


def test_coordinates():
    basis = [(1, 0, 1), (0, 1, 1)]
    assert coordinates((2, 3, 5), basis) == (2, 3)
    assert coordinates((0, 0, 1), basis) is None
    with pytest.raises(ValueError):
        coordinates((1, 1, 2), [(1, 1, 2), (2, 2, 4)])


def test_ambient_mismatch():
    with pytest.raises(ValueError):
        subspace_sum(Subspace.zero(2), Subspace.zero(3))
