import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monicrep.exactlin import (
    DimensionMismatch,
    Field,
    GF2,
    Matrix,
    block_diag,
    column_basis,
    hstack,
    in_span,
    inverse,
    kernel_basis,
    left_inverse,
    rank,
    rref,
    solve,
    sum_is_direct,
    sum_is_direct_iterated,
    vstack,
)

GF3 = Field(3)
GF5 = Field(5)
QQ = Field.rationals()
FIELDS = [GF2, GF3, GF5, QQ]


@st.composite
def matrices(draw, field=None, max_rows=5, max_cols=5, min_rows=0, min_cols=0):
    f = field if field is not None else draw(st.sampled_from(FIELDS))
    r = draw(st.integers(min_rows, max_rows))
    c = draw(st.integers(min_cols, max_cols))
    if f.p is None:
        entry = st.fractions(min_value=-3, max_value=3, max_denominator=3)
    else:
        entry = st.integers(0, f.p - 1)
    rows = [[draw(entry) for _ in range(c)] for _ in range(r)]
    return Matrix.from_rows(f, rows, c)


def image_size(m: Matrix) -> int:
    """Brute-force |image| over a prime field by enumerating all inputs."""
    p = m.field.p
    seen = set()
    for v in itertools.product(range(p), repeat=m.cols):
        seen.add(tuple(((m.a @ np.array(v, dtype=np.int64)) % p).tolist()) if m.cols else ())
    return len(seen)


def test_field_rejects_composite():
    with pytest.raises(ValueError):
        Field(4)


def test_field_inverse_and_reduction():
    assert GF5.inv(2) == 3
    assert GF5.element(-1) == 4
    assert QQ.inv(Fraction(2, 3)) == Fraction(3, 2)
    with pytest.raises(ZeroDivisionError):
        GF3.inv(0)


def test_rref_small_example():
    m = Matrix.from_rows(QQ, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    r, piv = rref(m)
    assert piv == [0, 1]
    assert r.to_json() == [["1", "0", "1"], ["0", "1", "1"], ["0", "0", "0"]]


def test_kernel_and_rank_over_f2():
    m = Matrix.from_rows(GF2, [[1, 1, 0], [0, 1, 1]])
    assert rank(m) == 2
    k = kernel_basis(m)
    assert k.shape == (3, 1)
    assert (m @ k).is_zero()


def test_zero_sized_matrices():
    z = Matrix.zeros(GF3, 0, 4)
    assert rank(z) == 0
    assert kernel_basis(z).shape == (4, 4)
    assert rank(Matrix.zeros(GF3, 3, 0)) == 0
    assert sum_is_direct([]) and sum_is_direct_iterated([])


def test_dimension_mismatch():
    a = Matrix.identity(GF2, 2)
    b = Matrix.identity(GF2, 3)
    with pytest.raises(DimensionMismatch):
        a @ b
    with pytest.raises(ValueError):
        a @ Matrix.identity(GF3, 2)


def test_singular_inverse():
    with pytest.raises(ZeroDivisionError):
        inverse(Matrix.from_rows(GF3, [[1, 2], [2, 1]]))


def test_stack_helpers():
    a = Matrix.identity(GF2, 2)
    assert hstack(GF2, [a, a], 2).shape == (2, 4)
    assert vstack(GF2, [a, a], 2).shape == (4, 2)
    assert block_diag(GF2, [a, Matrix.zeros(GF2, 1, 0)]).shape == (3, 2)


def test_sum_directness_examples():
    e1 = Matrix.column(GF3, [1, 0])
    e2 = Matrix.column(GF3, [0, 1])
    s = Matrix.column(GF3, [1, 1])
    assert sum_is_direct([e1, e2], 2)
    assert not sum_is_direct([e1, e2, s], 2)
    assert not sum_is_direct_iterated([e1, e2, s], 2)
    assert not sum_is_direct([e1, e1], 2)


@settings(max_examples=200, deadline=None)
@given(matrices(field=GF2, max_rows=4, max_cols=5))
def test_rank_matches_brute_force_image_f2(m):
    assert 2 ** rank(m) == image_size(m)


@settings(max_examples=100, deadline=None)
@given(matrices(field=GF3, max_rows=3, max_cols=4))
def test_rank_matches_brute_force_image_f3(m):
    assert 3 ** rank(m) == image_size(m)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    k = kernel_basis(m)
    assert rank(m) + k.cols == m.cols
    assert rank(k) == k.cols
    if k.cols:
        assert (m @ k).is_zero()


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rref_idempotent_and_row_equivalent(m):
    r, piv = rref(m)
    r2, piv2 = rref(r)
    assert r2 == r and piv2 == piv
    assert len(piv) == rank(m)
    # same row space: stacking adds no rank
    assert rank(vstack(m.field, [m, r], m.cols)) == rank(m)


@settings(max_examples=150, deadline=None)
@given(matrices(min_rows=1, min_cols=1), st.data())
def test_solve_consistent_systems(m, data):
    f = m.field
    x0 = data.draw(matrices(field=f, max_rows=m.cols, max_cols=2, min_rows=m.cols, min_cols=1))
    b = m @ x0
    x = solve(m, b)
    assert x is not None and m @ x == b


@settings(max_examples=150, deadline=None)
@given(matrices(min_rows=1, max_rows=4))
def test_column_basis_and_left_inverse(m):
    basis = column_basis(m)
    assert basis.cols == rank(m)
    assert in_span(basis, m)
    if basis.cols:
        assert left_inverse(basis) @ basis == Matrix.identity(m.field, basis.cols)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_two_directness_routes_agree(f, data):
    rows = data.draw(st.integers(0, 4))
    maps = data.draw(st.lists(matrices(field=f, max_rows=rows, min_rows=rows, max_cols=3), max_size=4))
    assert sum_is_direct(maps, rows) == sum_is_direct_iterated(maps, rows)


def test_rational_entries_exact():
    m = Matrix.from_rows(QQ, [["1/3", "1/2"], ["2/3", "1"]])
    assert rank(m) == 1
    inv = inverse(Matrix.from_rows(QQ, [["1/3", 0], [0, "1/2"]]))
    assert inv.tolist() == [[3, 0], [0, 2]]
