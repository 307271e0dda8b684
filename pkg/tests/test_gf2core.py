"""Tests for linear algebra over F2."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linlayout.errors import (
    DependentBasisError,
    DimensionMismatchError,
    DivisionError,
    LayoutError,
    NotSurjectiveError,
    UnsolvableError,
)
from linlayout.gf2core import (
    Basis,
    BitMatrix,
    BitVector,
    basis_complement,
    basis_complete,
    bm_block_diag,
    bm_identity,
    bm_left_divide,
    bm_mul,
    bm_null_space,
    bm_rank,
    bm_right_inverse,
    bm_solve_min_weight,
    bm_transpose,
    in_span,
    independent_subset,
    rank_of,
    span_element,
    span_elements,
    span_intersection_dim,
)
from linlayout.utils import popcount


@st.composite
def bit_matrices(draw, max_rows: int = 5, max_cols: int = 7) -> BitMatrix:
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    columns = draw(st.lists(st.integers(0, (1 << rows) - 1), min_size=cols, max_size=cols))
    return BitMatrix.from_columns(columns, rows)


class TestBitMatrix:
    """Tests for BitMatrix."""

    def test_columns_are_lsb_first(self):
        m = BitMatrix.from_lists([[1, 0], [1, 1]])
        assert m.columns() == (0b11, 0b10)
        assert m.row(1) == 0b11

    def test_from_columns_round_trips(self):
        assert BitMatrix.from_columns([5, 0, 2], 3).columns() == (5, 0, 2)

    def test_column_too_large(self):
        with pytest.raises(DimensionMismatchError, match="does not fit in 2 rows"):
            BitMatrix.from_columns([4], 2)

    def test_entries_must_be_bits(self):
        with pytest.raises(LayoutError, match="0 or 1"):
            BitMatrix(np.array([[2]]))

    def test_apply_xors_columns(self):
        m = BitMatrix.from_columns([0b011, 0b110], 3)
        assert m.apply(0b11) == 0b101
        assert m.apply(0) == 0

    def test_apply_many_matches_apply(self):
        m = BitMatrix.from_columns([0b011, 0b110, 0b100], 3)
        values = np.arange(8).reshape(2, 4)
        expected = np.array([[m.apply(int(x)) for x in row] for row in values])
        assert np.array_equal(m.apply_many(values), expected)

    def test_equality_and_hash(self):
        a = BitMatrix.identity(3)
        b = BitMatrix.from_columns([1, 2, 4], 3)
        assert a == b
        assert hash(a) == hash(b)

    def test_empty(self):
        m = BitMatrix.zeros(0, 0)
        assert m.shape == (0, 0)
        assert bm_rank(m) == 0


class TestBitVector:
    """Tests for BitVector."""

    def test_string_round_trip(self):
        v = BitVector.from_string("101")
        assert v.value == 5
        assert v.to_string() == "101"
        assert v.bits == (1, 0, 1)
        assert v.weight() == 2

    def test_value_must_fit(self):
        with pytest.raises(DimensionMismatchError):
            BitVector(2, 4)


class TestProducts:
    """Tests for bm_mul, bm_transpose and bm_block_diag functions."""

    def test_mul_identity(self):
        m = BitMatrix.from_columns([3, 1, 2], 2)
        assert bm_mul(bm_identity(2), m) == m
        assert bm_mul(m, bm_identity(3)) == m

    def test_transpose(self):
        m = BitMatrix.from_columns([0b01, 0b11], 2)
        assert bm_transpose(m).columns() == (0b11, 0b10)

    @given(bit_matrices())
    def test_transpose_is_an_involution(self, m):
        assert bm_transpose(bm_transpose(m)) == m
        assert bm_transpose(bm_mul(m, bm_transpose(m))) == bm_mul(m, bm_transpose(m))

    def test_mul_is_composition(self):
        a = BitMatrix.from_columns([0b01, 0b11], 2)
        b = BitMatrix.from_columns([0b10, 0b11], 2)
        product = bm_mul(a, b)
        for x in range(4):
            assert product.apply(x) == a.apply(b.apply(x))

    def test_mul_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            bm_mul(BitMatrix.identity(2), BitMatrix.identity(3))

    def test_block_diag(self):
        m = bm_block_diag(BitMatrix.identity(1), BitMatrix.from_columns([0b11], 2))
        assert m.columns() == (0b001, 0b110)


class TestRankAndNullSpace:
    """Tests for bm_rank and bm_null_space functions."""

    def test_rank(self):
        assert bm_rank(BitMatrix.from_columns([1, 2, 3], 2)) == 2
        assert bm_rank(BitMatrix.zeros(3, 2)) == 0

    @given(bit_matrices())
    def test_rank_nullity(self, m):
        null = bm_null_space(m)
        assert bm_rank(m) + len(null) == m.cols
        for v in null:
            assert m.apply(v) == 0
        assert rank_of(null) == len(null)


class TestSolveMinWeight:
    """Tests for bm_solve_min_weight function."""

    def test_unsolvable_names_column(self):
        b = BitMatrix.from_columns([1], 2)
        a = BitMatrix.from_columns([1, 2], 2)
        with pytest.raises(UnsolvableError) as excinfo:
            bm_solve_min_weight(b, a)
        assert excinfo.value.column == 1

    def test_prefers_single_column(self):
        b = BitMatrix.from_columns([0b01, 0b10, 0b11], 2)
        x = bm_solve_min_weight(b, BitMatrix.from_columns([0b11], 2))
        assert x.columns() == (0b100,)

    def test_without_search_keeps_pivot_solution(self):
        b = BitMatrix.from_columns([0b01, 0b10, 0b11], 2)
        x = bm_solve_min_weight(b, BitMatrix.from_columns([0b11], 2), search=False)
        assert x.columns() == (0b011,)

    @settings(max_examples=60)
    @given(bit_matrices(), st.data())
    def test_matches_exhaustive_search(self, b, data):
        count = data.draw(st.integers(1, 3))
        seeds = data.draw(
            st.lists(st.integers(0, (1 << b.cols) - 1), min_size=count, max_size=count)
        )
        a = BitMatrix.from_columns([b.apply(x) for x in seeds], b.rows)
        solution = bm_solve_min_weight(b, a)
        assert bm_mul(b, solution) == a
        for j, target in enumerate(a.columns()):
            best = min(popcount(x) for x in range(1 << b.cols) if b.apply(x) == target)
            assert popcount(solution.column(j)) == best


class TestRightInverse:
    """Tests for bm_right_inverse function."""

    def test_identity_of_permutation(self):
        m = BitMatrix.from_columns([2, 1], 2)
        assert bm_mul(m, bm_right_inverse(m)) == BitMatrix.identity(2)

    def test_skips_zero_columns(self):
        m = BitMatrix.from_columns([0, 1, 2], 2)
        assert bm_right_inverse(m).columns() == (0b010, 0b100)

    def test_not_surjective(self):
        with pytest.raises(NotSurjectiveError) as excinfo:
            bm_right_inverse(BitMatrix.from_columns([1, 1], 2))
        assert excinfo.value.row == 1


class TestLeftDivide:
    """Tests for bm_left_divide function."""

    def test_block_diagonal(self):
        m = bm_block_diag(BitMatrix.identity(1), BitMatrix.from_columns([3, 1], 2))
        assert bm_left_divide(m, BitMatrix.identity(1)) == BitMatrix.from_columns([3, 1], 2)

    def test_off_diagonal_entry(self):
        m = BitMatrix.from_columns([0b001, 0b011], 3)
        with pytest.raises(DivisionError) as excinfo:
            bm_left_divide(m, BitMatrix.identity(1))
        assert (excinfo.value.row, excinfo.value.col) == (0, 1)

    def test_divisor_too_large(self):
        with pytest.raises(DimensionMismatchError):
            bm_left_divide(BitMatrix.identity(1), BitMatrix.identity(2))


class TestBases:
    """Tests for Basis and the span helpers."""

    def test_dependent_basis(self):
        with pytest.raises(DependentBasisError, match="linearly dependent"):
            Basis(3, (1, 2, 3))

    def test_zero_vector(self):
        with pytest.raises(DependentBasisError, match="zero or outside"):
            Basis(3, (0,))

    def test_as_strings(self):
        assert Basis(3, (1, 6)).as_strings() == ["100", "011"]

    def test_complement_uses_lowest_standard_vectors(self):
        assert basis_complement(Basis(3, (0b101,))) == (1, 2)
        assert basis_complete(Basis(3, (0b101,))).vectors == (5, 1, 2)

    def test_in_span(self):
        assert in_span(0b110, [0b010, 0b100])
        assert not in_span(0b001, [0b010, 0b100])
        assert in_span(0, [])

    def test_independent_subset_keeps_order(self):
        assert independent_subset([4, 1, 5, 2]) == (4, 1, 2)

    def test_span_elements_are_indexed_by_bits(self):
        assert span_elements([2, 5]) == [0, 2, 5, 7]
        assert span_element([2, 5], 3) == 7

    def test_intersection_dimension(self):
        u = Basis(4, (1, 2))
        v = Basis(4, (3, 4))
        assert span_intersection_dim(u, v) == 1
        assert span_intersection_dim(u, Basis(4, (4, 8))) == 0

    def test_intersection_needs_same_space(self):
        with pytest.raises(DimensionMismatchError):
            span_intersection_dim(Basis(3, (1,)), Basis(4, (1,)))
