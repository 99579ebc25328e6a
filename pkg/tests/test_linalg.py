from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from koszulprop.linalg import (
    ChainComplex,
    DifferentialError,
    RationalMatrix,
    block_diagonal,
    column_space_basis,
    homology_dims,
    kernel_basis,
    rank,
    reduced_echelon,
)


def dense_rank(rows):
    # textbook elimination over Fractions, used as the oracle
    A = [[Fraction(x) for x in r] for r in rows]
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
    return r


small = st.integers(-3, 3)
matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_known_ranks():
    assert rank(RationalMatrix.identity(4)) == 4
    assert rank(RationalMatrix.zeros(3, 2)) == 0
    M = RationalMatrix.from_dense([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert rank(M) == 2
    half = RationalMatrix.from_dense([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]])
    assert rank(half) == 1


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_rank_matches_dense_oracle(rows):
    assert rank(RationalMatrix.from_dense(rows)) == dense_rank(rows)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_kernel_is_kernel_and_rank_nullity(rows):
    M = RationalMatrix.from_dense(rows)
    K = kernel_basis(M)
    assert (M @ K).is_zero()
    assert K.cols + rank(M) == M.cols
    assert rank(K) == K.cols


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_reduced_echelon_pivots_are_unit(rows):
    red = reduced_echelon(RationalMatrix.from_dense(rows).entries.values())
    for p, row in red.items():
        assert row[p] == 1
        for q in red:
            if q != p:
                assert q not in row


def test_matmul_and_transpose():
    A = RationalMatrix.from_dense([[1, 2], [0, 1], [3, 0]])
    B = RationalMatrix.from_dense([[1, 0, 2], [1, 1, 0]])
    assert (A @ B).to_dense() == [[3, 2, 2], [1, 1, 0], [3, 0, 6]]
    assert A.transpose().transpose() == A
    with pytest.raises(ValueError):
        A @ A


def test_column_space_basis_picks_independent_subset():
    vecs = [{0: 1}, {0: 2}, {1: 1}, {0: 1, 1: 1}]
    assert column_space_basis(vecs) == [0, 2]


def test_block_diagonal():
    D = block_diagonal([RationalMatrix.identity(2), RationalMatrix.from_dense([[5]])])
    assert D.to_dense() == [[1, 0, 0], [0, 1, 0], [0, 0, 5]]


def simplex_boundary():
    # the boundary of a triangle: 3 vertices, 3 edges, 1 face
    d1 = RationalMatrix.from_dense([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])
    d2 = RationalMatrix.from_dense([[1], [1], [1]])
    return ChainComplex.from_maps([3, 3, 1], [d1, d2])


def test_homology_of_filled_triangle():
    C = simplex_boundary()
    assert homology_dims(C) == [1, 0, 0]
    assert C.euler_characteristic() == 1


def test_hollow_triangle_has_a_loop():
    d1 = RationalMatrix.from_dense([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])
    C = ChainComplex.from_maps([3, 3], [d1])
    assert homology_dims(C) == [1, 1]


def test_d_squared_violation_is_reported():
    d1 = RationalMatrix.from_dense([[1, 0]])
    d2 = RationalMatrix.from_dense([[1], [0]])
    C = ChainComplex.from_maps([1, 2, 1], [d1, d2])
    with pytest.raises(DifferentialError):
        homology_dims(C)


def test_euler_characteristic_equals_alternating_homology():
    C = simplex_boundary()
    H = homology_dims(C)
    assert sum((-1) ** i * h for i, h in enumerate(H)) == C.euler_characteristic()
