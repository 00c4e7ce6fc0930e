from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from ladder_persist.exactla import (
    FieldElem,
    Matrix,
    SingularMatrixError,
    check_prime,
    column_echelon,
    field_inv,
    inverse,
    kernel_basis,
    rank,
    row_echelon,
    solve,
)

PRIMES = st.sampled_from([2, 3, 5, 7, 101])


@st.composite
def matrices(draw, max_dim=6):
    p = draw(PRIMES)
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return Matrix(np.array(entries, dtype=np.int64).reshape(r, c), p)


def sympy_rank(m: Matrix) -> int:
    if 0 in m.shape:
        return 0
    return DomainMatrix.from_Matrix(sympy.Matrix(m.tolist())).convert_to(GF(m.p)).rank()


def test_check_prime_rejects_composites():
    for bad in (0, 1, 4, 9, 100):
        with pytest.raises(ValueError):
            check_prime(bad)
    assert check_prime(46337) == 46337


def test_field_elem_arithmetic():
    a, b = FieldElem(3, 5), FieldElem(4, 5)
    assert a + b == 2 and a * b == 2 and a - b == 4 and -a == 2
    assert a / b == a * field_inv(b)
    assert field_inv(b) * b == 1
    with pytest.raises(ZeroDivisionError):
        field_inv(FieldElem(0, 5))


def test_matrix_is_immutable_and_reduced():
    m = Matrix([[7, -1]], 5)
    assert m.tolist() == [[2, 4]]
    with pytest.raises(ValueError):
        m.a[0, 0] = 1
    assert m[0, 1] == FieldElem(4, 5)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == sympy_rank(m)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_row_echelon_shape(m):
    e, q = row_echelon(m)
    assert q @ m == e
    assert rank(q) == q.rows
    r = rank(m)
    a = e.a
    assert not a[r:].any()
    pivots = [int(np.flatnonzero(a[i])[0]) for i in range(r)]
    assert pivots == sorted(set(pivots))
    for i, c in enumerate(pivots):
        assert a[i, c] == 1 and np.count_nonzero(a[:, c]) == 1


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_column_echelon_shape(m):
    e, pm = column_echelon(m)
    assert m @ pm == e
    assert rank(pm) == pm.rows
    r = rank(m)
    z = m.cols - r
    a = e.a
    assert not a[:, :z].any()
    # last nonzero of each pivot column moves strictly down
    lows = [int(np.flatnonzero(a[:, j])[-1]) for j in range(z, m.cols)]
    assert lows == sorted(set(lows))
    for j, low in zip(range(z, m.cols), lows):
        assert a[low, j] == 1 and np.count_nonzero(a[low]) == 1


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_kernel_basis(m):
    k = kernel_basis(m)
    assert k.cols == m.cols - rank(m)
    assert not (m @ k).a.any()
    assert rank(k) == k.cols


@settings(max_examples=150, deadline=None)
@given(matrices(), st.data())
def test_solve_consistent_and_inconsistent(m, data):
    x = Matrix(np.array(data.draw(st.lists(st.integers(0, m.p - 1), min_size=m.cols, max_size=m.cols)),
                        dtype=np.int64).reshape(m.cols, 1), m.p)
    b = m @ x
    sol = solve(m, b)
    assert sol is not None and m @ sol == b
    if rank(m) < m.rows:
        # a right-hand side outside the column space
        aug_rank = None
        for i in range(m.rows):
            e = np.zeros((m.rows, 1), dtype=np.int64)
            e[i, 0] = 1
            cand = Matrix(e, m.p)
            if rank(Matrix(np.concatenate([m.a, cand.a], axis=1), m.p)) > rank(m):
                aug_rank = cand
                break
        assert aug_rank is not None
        assert solve(m, aug_rank) is None


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_inverse(m):
    if m.rows != m.cols:
        with pytest.raises(SingularMatrixError):
            inverse(m)
        return
    if rank(m) < m.rows:
        with pytest.raises(SingularMatrixError):
            inverse(m)
        return
    inv = inverse(m)
    assert inv @ m == Matrix.identity(m.rows, m.p)
    if m.rows:
        assert inv.tolist() == (sympy.Matrix(m.tolist()).inv_mod(m.p) % m.p).tolist()


def test_empty_extents():
    z = Matrix.zeros(0, 3, 5)
    assert rank(z) == 0
    assert kernel_basis(z).shape == (3, 3)
    assert (Matrix.zeros(2, 0, 5) @ z).shape == (2, 3)
