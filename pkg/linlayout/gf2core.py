"""
Exact linear algebra over the two-element field.

Matrices are dense numpy ``uint8`` arrays of 0/1 entries. Bit vectors of
the flattened spaces are plain Python ints, least significant bit first:
bit ``i`` of an int is coordinate ``i`` of the vector, and column ``j`` of a
matrix is the image of the ``j``-th input bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from linlayout.constants import APPLY_MANY_MAX_BITS, MAX_BITS, MIN_WEIGHT_SEARCH_BITS
from linlayout.errors import (
    DependentBasisError,
    DimensionMismatchError,
    DivisionError,
    LayoutError,
    NotSurjectiveError,
    UnsolvableError,
)
from linlayout.utils import format_bits, iter_bits, parse_bits, popcount

LOG = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """
    Dense matrix over F2.

    Attributes:
        bits: Read-only ``uint8`` array of shape (rows, cols).
    """

    bits: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.bits, dtype=np.uint8, copy=True)
        if array.ndim != 2:
            raise DimensionMismatchError(f"bit matrix must be 2-D, got shape {array.shape}")
        rows, cols = array.shape
        if rows > MAX_BITS or cols > MAX_BITS:
            raise DimensionMismatchError(
                f"bit matrix {rows}x{cols} exceeds the {MAX_BITS}-bit limit"
            )
        if array.size and int(array.max()) > 1:
            raise LayoutError("bit matrix entries must be 0 or 1")
        array.setflags(write=False)
        object.__setattr__(self, "bits", array)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> BitMatrix:
        """Build a matrix from nested row lists; ``cols`` is needed only when there are no rows."""
        if not rows:
            return cls.zeros(0, cols or 0)
        return cls(np.array(rows, dtype=np.uint8))

    @classmethod
    def from_columns(cls, columns: Sequence[int], rows: int) -> BitMatrix:
        """Build a matrix whose column ``j`` is the LSB-first int ``columns[j]``."""
        array = np.zeros((rows, len(columns)), dtype=np.uint8)
        for j, column in enumerate(columns):
            if column >> rows:
                raise DimensionMismatchError(
                    f"column {j} value {column} does not fit in {rows} rows"
                )
            for i in iter_bits(column):
                array[i, j] = 1
        return cls(array)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @property
    def rows(self) -> int:
        return int(self.bits.shape[0])

    @property
    def cols(self) -> int:
        return int(self.bits.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def column(self, j: int) -> int:
        """Return column ``j`` as an LSB-first int."""
        value = 0
        for i in np.flatnonzero(self.bits[:, j]):
            value |= 1 << int(i)
        return value

    def columns(self) -> tuple[int, ...]:
        return tuple(self.column(j) for j in range(self.cols))

    def row(self, i: int) -> int:
        """Return row ``i`` as an LSB-first int over the columns."""
        value = 0
        for j in np.flatnonzero(self.bits[i, :]):
            value |= 1 << int(j)
        return value

    def apply(self, x: int) -> int:
        """Multiply by the column vector ``x`` (an LSB-first int)."""
        if x >> self.cols:
            raise DimensionMismatchError(f"input {x} does not fit in {self.cols} bits")
        result = 0
        for j in iter_bits(x):
            result ^= self.column(j)
        return result

    def apply_many(self, values: np.ndarray) -> np.ndarray:
        """
        Evaluate the matrix on many inputs at once.

        Args:
            values: Integer array of LSB-first inputs, any shape.

        Returns:
            ``int64`` array of outputs with the same shape as ``values``.
        """
        if self.rows > APPLY_MANY_MAX_BITS or self.cols > APPLY_MANY_MAX_BITS:
            raise DimensionMismatchError(
                f"apply_many supports at most {APPLY_MANY_MAX_BITS} bits, got {self.shape}"
            )
        values = np.asarray(values, dtype=np.int64)
        flat = values.reshape(-1)
        in_bits = (flat[:, None] >> np.arange(self.cols, dtype=np.int64)) & 1
        out_bits = (in_bits @ self.bits.T.astype(np.int64)) & 1
        weights = np.left_shift(np.int64(1), np.arange(self.rows, dtype=np.int64))
        return (out_bits @ weights).reshape(values.shape)

    def transpose(self) -> BitMatrix:
        return BitMatrix(self.bits.T)

    def weight(self) -> int:
        """Number of 1 entries."""
        return int(self.bits.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.shape, self.bits.tobytes()))

    def __repr__(self) -> str:
        body = ";".join("".join(str(int(b)) for b in row) for row in self.bits)
        return f"BitMatrix({self.rows}x{self.cols}: {body})"


@dataclass(frozen=True)
class BitVector:
    """
    A vector of F2^length stored as an LSB-first int.

    Attributes:
        length: Number of coordinates.
        value: Coordinates packed with coordinate 0 in bit 0.
    """

    length: int
    value: int

    def __post_init__(self) -> None:
        if self.length < 0 or self.length > MAX_BITS:
            raise DimensionMismatchError(f"bit vector length {self.length} out of range")
        if self.value < 0 or self.value >> self.length:
            raise DimensionMismatchError(
                f"value {self.value} does not fit in {self.length} bits"
            )

    @classmethod
    def from_string(cls, text: str) -> BitVector:
        """Parse an LSB-first string: ``"101"`` is 5."""
        return cls(len(text), parse_bits(text))

    def to_string(self) -> str:
        return format_bits(self.value, self.length)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.length))

    def weight(self) -> int:
        return popcount(self.value)

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class Basis:
    """
    An ordered list of linearly independent nonzero vectors of F2^dim.

    Attributes:
        dim: Ambient dimension.
        vectors: LSB-first ints, each nonzero and below 2^dim.
    """

    dim: int
    vectors: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vectors", tuple(int(v) for v in self.vectors))
        for v in self.vectors:
            if v <= 0 or v >> self.dim:
                raise DependentBasisError(
                    f"basis vector {format_bits(v, self.dim)!r} is zero or outside F2^{self.dim}"
                )
        if rank_of(self.vectors) != len(self.vectors):
            raise DependentBasisError(
                "basis vectors are linearly dependent: "
                + ", ".join(format_bits(v, self.dim) for v in self.vectors)
            )

    def __len__(self) -> int:
        return len(self.vectors)

    def as_strings(self) -> list[str]:
        return [format_bits(v, self.dim) for v in self.vectors]


# Int bitset helpers


def _insert(echelon: dict[int, int], v: int) -> bool:
    """Reduce ``v`` against an echelon form keyed by leading bit; insert if independent."""
    while v:
        top = v.bit_length() - 1
        pivot = echelon.get(top)
        if pivot is None:
            echelon[top] = v
            return True
        v ^= pivot
    return False


def rank_of(vectors: Iterable[int]) -> int:
    """Dimension of the span of the given int vectors."""
    echelon: dict[int, int] = {}
    return sum(1 for v in vectors if _insert(echelon, v))


def in_span(v: int, vectors: Iterable[int]) -> bool:
    """Whether ``v`` lies in the span of ``vectors``."""
    echelon: dict[int, int] = {}
    for u in vectors:
        _insert(echelon, u)
    return not _insert(echelon, v)


def independent_subset(vectors: Iterable[int]) -> tuple[int, ...]:
    """Greedy maximal independent subset, keeping input order."""
    echelon: dict[int, int] = {}
    return tuple(v for v in vectors if _insert(echelon, v))


def span_element(vectors: Sequence[int], index: int) -> int:
    """XOR of ``vectors[k]`` over the set bits ``k`` of ``index``."""
    value = 0
    for k in iter_bits(index):
        value ^= vectors[k]
    return value


def span_elements(vectors: Sequence[int]) -> list[int]:
    """All ``2^len(vectors)`` elements of the span, indexed as in span_element."""
    return [span_element(vectors, index) for index in range(1 << len(vectors))]


# Matrix operations


def bm_identity(n: int) -> BitMatrix:
    return BitMatrix.identity(n)


def bm_transpose(m: BitMatrix) -> BitMatrix:
    return m.transpose()


def bm_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """
    Multiply two matrices over F2.

    Raises:
        DimensionMismatchError: If ``a.cols != b.rows``.
    """
    if a.cols != b.rows:
        raise DimensionMismatchError(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    product = (a.bits.astype(np.int64) @ b.bits.astype(np.int64)) & 1
    return BitMatrix(product.astype(np.uint8))


def bm_block_diag(m1: BitMatrix, m2: BitMatrix) -> BitMatrix:
    """Return [[m1, 0], [0, m2]] with ``m1`` in the low rows and columns."""
    array = np.zeros((m1.rows + m2.rows, m1.cols + m2.cols), dtype=np.uint8)
    array[: m1.rows, : m1.cols] = m1.bits
    array[m1.rows :, m1.cols :] = m2.bits
    return BitMatrix(array)


def _row_reduce(work: np.ndarray, ncols: int) -> list[int]:
    """
    Bring the first ``ncols`` columns of ``work`` to reduced row echelon form in place.

    The pivot of each column is the first nonzero row at or below the
    current pivot row. Returns the pivot column of each pivot row.
    """
    pivots: list[int] = []
    row = 0
    nrows = work.shape[0]
    for col in range(ncols):
        if row == nrows:
            break
        hits = np.flatnonzero(work[row:, col])
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            work[[row, pivot]] = work[[pivot, row]]
        mask = work[:, col].astype(bool)
        mask[row] = False
        work[mask] ^= work[row]
        pivots.append(col)
        row += 1
    return pivots


def bm_rank(m: BitMatrix) -> int:
    work = m.bits.copy()
    return len(_row_reduce(work, m.cols))


def bm_null_space(m: BitMatrix) -> list[int]:
    """Basis of the kernel of ``m`` as LSB-first ints, one per free column."""
    work = m.bits.copy()
    pivots = _row_reduce(work, m.cols)
    pivot_set = set(pivots)
    basis: list[int] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vector = 1 << free
        for r, col in enumerate(pivots):
            if work[r, free]:
                vector |= 1 << col
        basis.append(vector)
    return basis


def _min_weight_refine(solution: np.ndarray, null_vectors: np.ndarray) -> np.ndarray:
    """Walk the null space in Gray-code order keeping, per column, the lightest solution."""
    best = solution.copy()
    best_weight = best.sum(axis=0)
    current = solution.copy()
    for step in range(1, 1 << null_vectors.shape[0]):
        flip = (step & -step).bit_length() - 1
        current ^= null_vectors[flip][:, None]
        weight = current.sum(axis=0)
        better = weight < best_weight
        if better.any():
            best[:, better] = current[:, better]
            best_weight = np.where(better, weight, best_weight)
    return best


def bm_solve_min_weight(b: BitMatrix, a: BitMatrix, search: bool = True) -> BitMatrix:
    """
    Solve ``B X = A`` with as few 1 bits in ``X`` as possible.

    Gaussian elimination sets every free variable to zero. When the null
    space of ``B`` has at most MIN_WEIGHT_SEARCH_BITS dimensions and
    ``search`` is set, each column is then improved by exhaustive search
    over the null space; ties keep the zero-slack solution.

    Args:
        b: Matrix whose columns span the right-hand side.
        a: Right-hand side with ``a.rows == b.rows``.
        search: Enable the null-space refinement.

    Returns:
        ``X`` of shape (b.cols, a.cols).

    Raises:
        DimensionMismatchError: If the row counts differ.
        UnsolvableError: If a column of ``a`` is outside the column span of ``b``.
    """
    if a.rows != b.rows:
        raise DimensionMismatchError(
            f"cannot solve {b.rows}x{b.cols} system for {a.rows}x{a.cols} right-hand side"
        )
    work = np.concatenate([b.bits, a.bits], axis=1).astype(np.uint8)
    pivots = _row_reduce(work, b.cols)
    rank = len(pivots)
    residual = work[rank:, b.cols :]
    if residual.size and residual.any():
        column = int(np.flatnonzero(residual.any(axis=0))[0])
        raise UnsolvableError(
            f"column {column} of the right-hand side is outside the column span", column
        )
    solution = np.zeros((b.cols, a.cols), dtype=np.uint8)
    for r, col in enumerate(pivots):
        solution[col, :] = work[r, b.cols :]

    nullity = b.cols - rank
    if search and nullity and a.cols:
        if nullity <= MIN_WEIGHT_SEARCH_BITS:
            null_vectors = np.array(
                [[(v >> i) & 1 for i in range(b.cols)] for v in bm_null_space(b)],
                dtype=np.uint8,
            )
            solution = _min_weight_refine(solution, null_vectors)
        else:
            LOG.debug("Null space of dimension %d too large, keeping zero-slack solution", nullity)
    return BitMatrix(solution)


def bm_right_inverse(m: BitMatrix) -> BitMatrix:
    """
    Return ``X`` with ``M X = I``.

    Raises:
        NotSurjectiveError: If some row unit vector is outside the column span.
    """
    try:
        return bm_solve_min_weight(m, BitMatrix.identity(m.rows))
    except UnsolvableError as exc:
        raise NotSurjectiveError(
            f"matrix {m.rows}x{m.cols} is not surjective: row {exc.column} outside column span",
            row=exc.column,
        ) from exc


def bm_left_divide(m: BitMatrix, m1: BitMatrix) -> BitMatrix:
    """
    Return ``M2`` such that ``M = [[M1, 0], [0, M2]]``.

    Raises:
        DimensionMismatchError: If ``m1`` is larger than ``m``.
        DivisionError: At the first entry, in row-major order, breaking the structure.
    """
    if m.rows < m1.rows or m.cols < m1.cols:
        raise DimensionMismatchError(
            f"cannot divide {m.rows}x{m.cols} by larger {m1.rows}x{m1.cols}"
        )
    m2 = BitMatrix(m.bits[m1.rows :, m1.cols :])
    expected = bm_block_diag(m1, m2)
    diff = np.argwhere(expected.bits != m.bits)
    if diff.size:
        row, col = (int(x) for x in diff[0])
        raise DivisionError(
            f"matrix is not block diagonal with the divisor: entry ({row}, {col}) differs",
            row=row,
            col=col,
        )
    return m2


# Bases


def basis_complement(partial: Basis) -> tuple[int, ...]:
    """Lowest-index standard vectors completing ``partial`` to a basis of F2^dim."""
    echelon: dict[int, int] = {}
    for v in partial.vectors:
        _insert(echelon, v)
    added: list[int] = []
    for i in range(partial.dim):
        if _insert(echelon, 1 << i):
            added.append(1 << i)
    return tuple(added)


def basis_complete(partial: Basis) -> Basis:
    """
    Extend ``partial`` to a basis of the whole space.

    New vectors are the lowest-index standard basis vectors not yet in the span.

    Examples:
        >>> basis_complete(Basis(3, (0b101,))).vectors
        (5, 1, 2)
    """
    return Basis(partial.dim, partial.vectors + basis_complement(partial))


def span_intersection_dim(u: Basis, v: Basis) -> int:
    """
    Dimension of span(u) ∩ span(v), by dim(U) + dim(V) - dim(U + V).

    Raises:
        DimensionMismatchError: If the ambient dimensions differ.
    """
    if u.dim != v.dim:
        raise DimensionMismatchError(
            f"bases live in different spaces: F2^{u.dim} and F2^{v.dim}"
        )
    return len(u) + len(v) - rank_of(u.vectors + v.vectors)
