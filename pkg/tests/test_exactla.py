from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors

from hocodim.errors import InputError, RingMismatch
from hocodim.exactla import (
    GF,
    QQ,
    ZZ,
    ExactMatrix,
    determinant,
    hstack,
    integer_kernel_basis,
    inverse,
    kernel_basis,
    kron,
    parse_ring,
    rank,
    rref,
    smith_normal_form,
    solve,
    subquotient_dim,
)

RINGS = [QQ, GF(2), GF(3), GF(7)]


def int_matrices(max_dim=6, bound=9):
    return st.integers(1, max_dim).flatmap(lambda r: st.integers(1, max_dim).flatmap(
        lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r)))


def test_parse_ring():
    assert parse_ring("q") == QQ
    assert parse_ring("z") == ZZ
    assert parse_ring("fp:5") == GF(5)
    for bad in ["fp:4", "r", "fp:x"]:
        with pytest.raises(InputError):
            parse_ring(bad)


def test_fp_arithmetic_reduces():
    m = ExactMatrix(GF(3), [[4, -1], [Fraction(1, 2), 0]])
    assert m.a.tolist() == [[1, 2], [2, 0]]


def test_kernel_examples():
    assert kernel_basis(ExactMatrix.zeros(QQ, 2, 3)).cols == 3
    assert kernel_basis(ExactMatrix.identity(QQ, 3)).cols == 0
    k = kernel_basis(ExactMatrix(GF(2), [[1, 1], [1, 1]]))
    assert k.cols == 1 and k.a[:, 0].tolist() == [1, 1]
    with pytest.raises(RingMismatch):
        kernel_basis(ExactMatrix(ZZ, [[1]]))


def test_solve_examples():
    b = ExactMatrix(QQ, [[1, 2], [3, 4]])
    assert solve(ExactMatrix.identity(QQ, 2), b) == b
    assert solve(ExactMatrix.zeros(QQ, 2, 2), b) is None
    assert solve(ExactMatrix(QQ, [[2]]), ExactMatrix(QQ, [[1]])).entry(0, 0) == Fraction(1, 2)
    assert solve(ExactMatrix(ZZ, [[2]]), ExactMatrix(ZZ, [[1]])) is None
    with pytest.raises(InputError):
        solve(ExactMatrix.identity(QQ, 2), ExactMatrix.identity(QQ, 3))


def test_snf_examples():
    assert smith_normal_form(ExactMatrix(ZZ, [[2, 0], [0, 3]])).diagonal == (1, 6)
    z = smith_normal_form(ExactMatrix.zeros(ZZ, 2, 3))
    assert list(z.diagonal) == [0, 0]
    assert z.U == ExactMatrix.identity(ZZ, 2) and z.V == ExactMatrix.identity(ZZ, 3)
    assert smith_normal_form(ExactMatrix(ZZ, [[2, 0], [0, 2]])).diagonal == (2, 2)


def test_subquotient():
    z = ExactMatrix.identity(QQ, 3)
    b = ExactMatrix(QQ, [[1], [1], [0]])
    d, reps = subquotient_dim(z, b)
    assert d == 2 and reps.cols == 2
    assert rank(hstack([b, reps])) == 3
    with pytest.raises(InputError):
        subquotient_dim(b, z)


def test_inverse_and_determinant():
    a = ExactMatrix(ZZ, [[2, 1], [1, 1]])
    assert inverse(a) @ a == ExactMatrix.identity(ZZ, 2)
    assert determinant(ExactMatrix(QQ, [[1, 2], [3, 4]])) == -2
    with pytest.raises(InputError):
        inverse(ExactMatrix(ZZ, [[2]]))


def test_kron_shape():
    k = kron(ExactMatrix.identity(QQ, 2), ExactMatrix(QQ, [[1, 2]]))
    assert k.shape == (2, 4) and k.a.tolist() == [[1, 2, 0, 0], [0, 0, 1, 2]]


@given(int_matrices(), st.sampled_from(RINGS))
def test_rank_nullity(rows, ring):
    a = ExactMatrix(ring, rows)
    k = kernel_basis(a)
    assert rank(a) + k.cols == a.cols
    assert (a @ k).is_zero()
    oracle = sympy.Matrix(rows).rank() if ring == QQ else None
    if oracle is not None:
        assert rank(a) == oracle


@given(int_matrices(), st.sampled_from(RINGS))
def test_rref_is_reduced(rows, ring):
    r, piv = rref(ExactMatrix(ring, rows))
    for i, p in enumerate(piv):
        assert r.entry(i, p) == 1
        assert all(r.entry(k, p) == 0 for k in range(r.rows) if k != i)


@given(int_matrices(), st.lists(st.integers(-5, 5), min_size=6, max_size=6), st.sampled_from(RINGS))
def test_solve_finds_consistent_systems(rows, x, ring):
    a = ExactMatrix(ring, rows)
    xs = ExactMatrix(ring, np.array(x[:a.cols], dtype=object).reshape(a.cols, 1))
    b = a @ xs
    sol = solve(a, b)
    assert sol is not None and a @ sol == b


@given(int_matrices(max_dim=7, bound=30))
def test_snf_against_sympy(rows):
    a = ExactMatrix(ZZ, rows)
    s = smith_normal_form(a)
    assert s.U @ a @ s.V == s.D
    assert abs(determinant(s.U)) == 1 and abs(determinant(s.V)) == 1
    nz = [d for d in s.diagonal if d]
    assert all(b % a_ == 0 for a_, b in zip(nz, nz[1:]))
    oracle = [abs(int(d)) for d in invariant_factors(sympy.Matrix(rows), domain=sympy.ZZ)]
    assert [d for d in s.diagonal] == oracle + [0] * (len(s.diagonal) - len(oracle))


@given(int_matrices(max_dim=6, bound=12))
def test_integer_kernel(rows):
    a = ExactMatrix(ZZ, rows)
    k = integer_kernel_basis(a)
    assert (a @ k).is_zero()
    assert k.cols == a.cols - rank(a.change_ring(QQ))
