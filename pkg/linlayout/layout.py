"""
Labelled linear layouts.

A layout maps hardware-index bits (``reg``/``thread``/``warp`` or memory
labels) to logical tensor coordinate bits. Input labels are kept in bit
order: the first label owns the lowest matrix columns. Output labels are
kept in logical order, as a tensor shape is written: the last label is the
fastest moving dimension and owns the lowest matrix rows, so the row index
of a bit is its position in the flattened row-major tensor index.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from linlayout.constants import (
    DEFAULT_LAYOUT_NAME,
    DEFAULT_MAX_VECTOR_BITS,
    HARDWARE_DIMS,
    MEMORY_DIMS,
    REG,
)
from linlayout.errors import (
    LabelMismatchError,
    LayoutError,
    LayoutParseError,
    NotSurjectiveError,
)
from linlayout.gf2core import (
    BitMatrix,
    bm_left_divide,
    bm_mul,
    bm_rank,
    bm_right_inverse,
)
from linlayout.utils import popcount

LOG = logging.getLogger(__name__)

HwPoint = Mapping[str, int]
TensorPoint = dict[str, int]

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class DimLabel:
    """
    A named dimension of 2^size_log2 points.

    Attributes:
        name: Identifier such as "reg", "offset" or a tensor dim name.
        size_log2: Number of bits of the dimension.
    """

    name: str
    size_log2: int

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise LayoutError(f"invalid dimension name {self.name!r}")
        if self.size_log2 < 0:
            raise LayoutError(f"dimension {self.name} has negative size {self.size_log2}")

    @property
    def size(self) -> int:
        return 1 << self.size_log2

    def __str__(self) -> str:
        return f"{self.name}:{self.size_log2}"


def dims(spec: Sequence[tuple[str, int]]) -> tuple[DimLabel, ...]:
    """Shorthand: ``dims([("reg", 2), ("thread", 5)])``."""
    return tuple(DimLabel(name, bits) for name, bits in spec)


def _check_unique(labels: Sequence[DimLabel], side: str) -> None:
    names = [label.name for label in labels]
    if len(set(names)) != len(names):
        raise LayoutError(f"duplicate {side} dimension names: {names}")


def _offsets(labels: Sequence[DimLabel]) -> dict[str, tuple[int, int]]:
    offsets: dict[str, tuple[int, int]] = {}
    start = 0
    for label in labels:
        offsets[label.name] = (start, label.size_log2)
        start += label.size_log2
    return offsets


@dataclass(frozen=True)
class LinearLayout:
    """
    A linear map over F2 between labelled spaces.

    Attributes:
        in_dims: Input labels, lowest bits first.
        out_dims: Output labels in logical order, fastest dimension last.
        matrix: Bit matrix with one column per input bit and one row per output bit.
        name: Display name, ignored by equality.
    """

    in_dims: tuple[DimLabel, ...]
    out_dims: tuple[DimLabel, ...]
    matrix: BitMatrix
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "in_dims", tuple(self.in_dims))
        object.__setattr__(self, "out_dims", tuple(self.out_dims))
        _check_unique(self.in_dims, "input")
        _check_unique(self.out_dims, "output")
        in_bits = sum(label.size_log2 for label in self.in_dims)
        out_bits = sum(label.size_log2 for label in self.out_dims)
        if self.matrix.shape != (out_bits, in_bits):
            raise LayoutError(
                f"matrix {self.matrix.rows}x{self.matrix.cols} does not match "
                f"{out_bits} output and {in_bits} input bits"
            )

    @classmethod
    def from_columns(
        cls,
        in_dims: Sequence[DimLabel],
        out_dims: Sequence[DimLabel],
        columns: Sequence[int],
        name: str = "",
    ) -> LinearLayout:
        """Build a layout from flattened column images, one per input bit."""
        rows = sum(label.size_log2 for label in out_dims)
        return cls(tuple(in_dims), tuple(out_dims), BitMatrix.from_columns(columns, rows), name)

    @property
    def in_bits(self) -> int:
        return self.matrix.cols

    @property
    def out_bits(self) -> int:
        return self.matrix.rows

    @property
    def out_bit_order(self) -> tuple[DimLabel, ...]:
        """Output labels lowest bits first (fastest dimension first)."""
        return tuple(reversed(self.out_dims))

    @property
    def in_names(self) -> tuple[str, ...]:
        return tuple(label.name for label in self.in_dims)

    @property
    def out_names(self) -> tuple[str, ...]:
        return tuple(label.name for label in self.out_dims)

    @property
    def out_shape(self) -> tuple[int, ...]:
        return tuple(label.size for label in self.out_dims)

    def in_offsets(self) -> dict[str, tuple[int, int]]:
        """Map input name to (first column, bit count)."""
        return _offsets(self.in_dims)

    def out_offsets(self) -> dict[str, tuple[int, int]]:
        """Map output name to (first row, bit count)."""
        return _offsets(self.out_bit_order)

    def in_size(self, name: str) -> int:
        """Bit count of an input label, 0 when absent."""
        return self.in_offsets().get(name, (0, 0))[1]

    def in_columns(self, name: str) -> tuple[int, ...]:
        """Images of the bits of one input label as flattened ints (empty when absent)."""
        offsets = self.in_offsets()
        if name not in offsets:
            return ()
        start, size = offsets[name]
        return tuple(self.matrix.column(start + k) for k in range(size))

    def columns(self) -> tuple[int, ...]:
        return self.matrix.columns()

    def split_out(self, value: int) -> TensorPoint:
        """Unpack a flattened output int into per-dimension coordinates (logical order)."""
        offsets = self.out_offsets()
        return {
            label.name: (value >> offsets[label.name][0]) & (label.size - 1)
            for label in self.out_dims
        }

    def join_out(self, point: Mapping[str, int]) -> int:
        """Pack output coordinates into a flattened int; missing names count as 0."""
        return _pack(self.out_offsets(), {l.name: l for l in self.out_dims}, point, "output")

    def join_in(self, point: HwPoint) -> int:
        """Pack input coordinates into an int; missing names count as 0."""
        return _pack(self.in_offsets(), {l.name: l for l in self.in_dims}, point, "input")

    def split_in(self, value: int) -> dict[str, int]:
        offsets = self.in_offsets()
        return {
            label.name: (value >> offsets[label.name][0]) & (label.size - 1)
            for label in self.in_dims
        }

    def with_name(self, name: str) -> LinearLayout:
        return LinearLayout(self.in_dims, self.out_dims, self.matrix, name)

    def __str__(self) -> str:
        return format_layout(self)


def _pack(
    offsets: dict[str, tuple[int, int]],
    labels: dict[str, DimLabel],
    point: Mapping[str, int],
    side: str,
) -> int:
    value = 0
    for name, coord in point.items():
        if name not in labels:
            raise LayoutError(f"unknown {side} dimension {name!r}")
        if coord < 0 or coord >= labels[name].size:
            raise LayoutError(
                f"{side} coordinate {name}={coord} out of range [0, {labels[name].size})"
            )
        value |= coord << offsets[name][0]
    return value


def ll_empty() -> LinearLayout:
    """The layout with no labels; the unit of ll_product."""
    return LinearLayout((), (), BitMatrix.zeros(0, 0))


# Algebra


def ll_apply(l: LinearLayout, p: HwPoint) -> TensorPoint:
    """
    Evaluate a layout on a hardware point.

    Examples:
        Layout A maps register 1 of thread 9, warp 0 to (i=2, j=3).
    """
    return l.split_out(l.matrix.apply(l.join_in(p)))


def ll_compose(outer: LinearLayout, inner: LinearLayout) -> LinearLayout:
    """
    Return ``outer ∘ inner``.

    The outputs of ``inner``, lowest bits first, must be exactly the inputs
    of ``outer`` (names and sizes); use ll_relabel for renames.

    Raises:
        LabelMismatchError: If the labels are not congruent.
    """
    if inner.out_bit_order != outer.in_dims:
        raise LabelMismatchError(
            "cannot compose: inner outputs "
            f"({', '.join(map(str, inner.out_bit_order))}) != outer inputs "
            f"({', '.join(map(str, outer.in_dims))})"
        )
    return LinearLayout(inner.in_dims, outer.out_dims, bm_mul(outer.matrix, inner.matrix))


def ll_product(l1: LinearLayout, l2: LinearLayout) -> LinearLayout:
    """
    Label-wise block-diagonal product.

    For a label shared by both factors the bits of ``l1`` are the low
    bits. Labels only in ``l2`` are more significant: they are appended to
    the inputs and prepended to the logical outputs.
    """
    in_sizes: dict[str, int] = {}
    for label in l1.in_dims + l2.in_dims:
        in_sizes[label.name] = in_sizes.get(label.name, 0) + label.size_log2
    out_bit_sizes: dict[str, int] = {}
    for label in l1.out_bit_order + l2.out_bit_order:
        out_bit_sizes[label.name] = out_bit_sizes.get(label.name, 0) + label.size_log2
    in_dims = tuple(DimLabel(name, size) for name, size in in_sizes.items())
    out_dims = tuple(
        reversed([DimLabel(name, size) for name, size in out_bit_sizes.items()])
    )
    result_out = _offsets(reversed(out_dims))
    result_in = _offsets(in_dims)
    l1_out = {label.name: label.size_log2 for label in l1.out_dims}

    def remap(layout: LinearLayout, column: int, high: bool) -> int:
        value = 0
        for name, (start, size) in layout.out_offsets().items():
            shift = result_out[name][0] + (l1_out.get(name, 0) if high else 0)
            value |= ((column >> start) & ((1 << size) - 1)) << shift
        return value

    columns = [0] * sum(in_sizes.values())
    for layout, high in ((l1, False), (l2, True)):
        for name, (start, size) in layout.in_offsets().items():
            base = result_in[name][0] + (l1.in_size(name) if high else 0)
            for k in range(size):
                columns[base + k] = remap(layout, layout.matrix.column(start + k), high)
    return LinearLayout.from_columns(in_dims, out_dims, columns)


def ll_right_inverse(l: LinearLayout) -> LinearLayout:
    """
    Right inverse of a surjective layout, with inputs and outputs swapped.

    The inverse takes the outputs of ``l`` (lowest bits first) as inputs and
    returns the inputs of ``l`` as outputs, so ``ll_compose(l, inverse)`` is
    the identity on the outputs of ``l``.

    Raises:
        NotSurjectiveError: If ``l`` is not surjective.
    """
    matrix = bm_right_inverse(l.matrix)
    return LinearLayout(l.out_bit_order, tuple(reversed(l.in_dims)), matrix)


def ll_slice(l: LinearLayout, removed_out_dim: str) -> LinearLayout:
    """
    Drop one output dimension.

    Raises:
        LayoutError: If the dimension does not exist.
        NotSurjectiveError: If the remaining map is not surjective.
    """
    offsets = l.out_offsets()
    if removed_out_dim not in offsets:
        raise LayoutError(f"unknown output dimension {removed_out_dim!r}")
    start, size = offsets[removed_out_dim]
    keep = [r for r in range(l.out_bits) if not start <= r < start + size]
    sliced = BitMatrix(l.matrix.bits[keep, :])
    out_dims = tuple(label for label in l.out_dims if label.name != removed_out_dim)
    if bm_rank(sliced) != sliced.rows:
        raise NotSurjectiveError(
            f"slicing {removed_out_dim!r} leaves a non-surjective layout"
        )
    return LinearLayout(l.in_dims, out_dims, sliced)


def ll_relabel(
    l: LinearLayout,
    in_names: Mapping[str, str] | None = None,
    out_names: Mapping[str, str] | None = None,
) -> LinearLayout:
    """Rename labels; the matrix is unchanged."""
    in_names = in_names or {}
    out_names = out_names or {}
    return LinearLayout(
        tuple(DimLabel(in_names.get(d.name, d.name), d.size_log2) for d in l.in_dims),
        tuple(DimLabel(out_names.get(d.name, d.name), d.size_log2) for d in l.out_dims),
        l.matrix,
        l.name,
    )


def ll_reorder_out(l: LinearLayout, order: Sequence[str]) -> LinearLayout:
    """Permute the logical output dimensions; ``order`` lists every name, slowest first."""
    if sorted(order) != sorted(l.out_names):
        raise LabelMismatchError(f"order {list(order)} is not a permutation of {list(l.out_names)}")
    by_name = {label.name: label for label in l.out_dims}
    out_dims = tuple(by_name[name] for name in order)
    old = l.out_offsets()
    new = _offsets(reversed(out_dims))
    rows = [0] * l.out_bits
    for name, (start, size) in new.items():
        for k in range(size):
            rows[start + k] = old[name][0] + k
    return LinearLayout(l.in_dims, out_dims, BitMatrix(l.matrix.bits[rows, :]), l.name)


def ll_reorder_in(l: LinearLayout, order: Sequence[str]) -> LinearLayout:
    """Permute the input labels; ``order`` lists every name, lowest bits first."""
    if sorted(order) != sorted(l.in_names):
        raise LabelMismatchError(f"order {list(order)} is not a permutation of {list(l.in_names)}")
    by_name = {label.name: label for label in l.in_dims}
    old = l.in_offsets()
    cols = [old[name][0] + k for name in order for k in range(old[name][1])]
    return LinearLayout(
        tuple(by_name[name] for name in order), l.out_dims, BitMatrix(l.matrix.bits[:, cols]), l.name
    )


def ll_hardware(l: LinearLayout) -> LinearLayout:
    """
    Order the inputs as reg, thread, warp, adding missing ones with size 0.

    Raises:
        LabelMismatchError: If an input label is not a hardware label.
    """
    extra = [name for name in l.in_names if name not in HARDWARE_DIMS]
    if extra:
        raise LabelMismatchError(f"not a hardware layout: inputs {extra}")
    padded = LinearLayout(
        l.in_dims + tuple(DimLabel(n, 0) for n in HARDWARE_DIMS if n not in l.in_names),
        l.out_dims,
        l.matrix,
        l.name,
    )
    return ll_reorder_in(padded, HARDWARE_DIMS)


def ll_reshape_out(l: LinearLayout, out_dims: Sequence[DimLabel]) -> LinearLayout:
    """Reinterpret the flattened output bits under a new logical shape."""
    out_dims = tuple(out_dims)
    if sum(label.size_log2 for label in out_dims) != l.out_bits:
        raise LayoutError(
            f"cannot reshape {l.out_bits} output bits into ({', '.join(map(str, out_dims))})"
        )
    return LinearLayout(l.in_dims, out_dims, l.matrix, l.name)


def ll_merge_out(l: LinearLayout, name: str = "offset") -> LinearLayout:
    """Collapse every output dimension into one label over the flattened index."""
    return ll_reshape_out(l, (DimLabel(name, l.out_bits),))


def ll_left_divide(l: LinearLayout, t: LinearLayout) -> LinearLayout:
    """
    Label-wise left division ``l ÷ t``.

    For each label of ``t`` its bits must be the lowest bits of the same
    label of ``l``. The quotient keeps every label of ``l`` with the tile's
    bits removed.

    Raises:
        LabelMismatchError: If a label of ``t`` is missing or larger in ``l``.
        DivisionError: If ``l`` is not block diagonal with ``t``.
    """
    l_in = l.in_offsets()
    l_out = l.out_offsets()
    for label in t.in_dims:
        if label.name not in l_in or l_in[label.name][1] < label.size_log2:
            raise LabelMismatchError(f"tile input {label} does not fit the layout inputs")
    for label in t.out_dims:
        if label.name not in l_out or l_out[label.name][1] < label.size_log2:
            raise LabelMismatchError(f"tile output {label} does not fit the layout outputs")

    tile_in = {label.name: label.size_log2 for label in t.in_dims}
    tile_out = {label.name: label.size_log2 for label in t.out_dims}
    col_order = [l_in[d.name][0] + k for d in t.in_dims for k in range(d.size_log2)]
    col_order += [
        start + k
        for name, (start, size) in l_in.items()
        for k in range(tile_in.get(name, 0), size)
    ]
    row_order = [l_out[d.name][0] + k for d in t.out_bit_order for k in range(d.size_log2)]
    row_order += [
        start + k
        for name, (start, size) in l_out.items()
        for k in range(tile_out.get(name, 0), size)
    ]
    permuted = BitMatrix(l.matrix.bits[np.ix_(row_order, col_order)])
    quotient = bm_left_divide(permuted, t.matrix)
    in_dims = tuple(DimLabel(d.name, d.size_log2 - tile_in.get(d.name, 0)) for d in l.in_dims)
    out_dims = tuple(DimLabel(d.name, d.size_log2 - tile_out.get(d.name, 0)) for d in l.out_dims)
    return LinearLayout(in_dims, out_dims, quotient)


# Predicates and analyses


def ll_is_surjective(l: LinearLayout) -> bool:
    return bm_rank(l.matrix) == l.out_bits


def ll_is_injective(l: LinearLayout) -> bool:
    return bm_rank(l.matrix) == l.in_bits


def ll_is_invertible(l: LinearLayout) -> bool:
    return l.in_bits == l.out_bits and ll_is_surjective(l)


def ll_is_distributed(l: LinearLayout) -> bool:
    """
    Whether ``l`` is a distributed layout.

    Inputs must be hardware labels; the map must be surjective with every
    column of weight at most one and no repeated nonzero column.
    """
    if not set(l.in_names) <= set(HARDWARE_DIMS):
        return False
    nonzero = [c for c in l.columns() if c]
    if any(c & (c - 1) for c in nonzero):
        return False
    if len(set(nonzero)) != len(nonzero):
        return False
    return ll_is_surjective(l)


def ll_is_memory(l: LinearLayout) -> bool:
    """Whether ``l`` is an invertible memory layout with column weights 1 or 2."""
    if not set(l.in_names) <= MEMORY_DIMS:
        return False
    if any(popcount(c) not in (1, 2) for c in l.columns()):
        return False
    return ll_is_invertible(l)


def ll_broadcast_mask(l: LinearLayout, in_dim: str) -> int:
    """
    Mask of zero columns within one input label; bit k set means input bit k duplicates data.

    Raises:
        LayoutError: If the label does not exist.
    """
    if in_dim not in l.in_offsets():
        raise LayoutError(f"unknown input dimension {in_dim!r}")
    mask = 0
    for k, column in enumerate(l.in_columns(in_dim)):
        if column == 0:
            mask |= 1 << k
    return mask


def ll_contiguous_log2(l: LinearLayout) -> int:
    """
    Largest k such that flattened tensor bits 0..k-1 are register bits 0..k-1.

    Each thread then owns 2^k elements contiguous in the row-major index.
    """
    if REG not in l.in_offsets():
        return 0
    reg_start, reg_bits = l.in_offsets()[REG]
    inverse = bm_right_inverse(l.matrix)
    k = 0
    while k < min(reg_bits, l.out_bits) and inverse.column(k) == 1 << (reg_start + k):
        k += 1
    return k


def ll_vector_bits(
    l: LinearLayout, elem_bits: int, max_vector_bits: int = DEFAULT_MAX_VECTOR_BITS
) -> int:
    """Width of the widest vectorised access allowed by the layout's contiguity."""
    return min(max_vector_bits, (1 << ll_contiguous_log2(l)) * elem_bits)


def vector_instruction(vector_bits: int) -> str:
    """
    Name the load/store width for an access of ``vector_bits``.

    Examples:
        >>> vector_instruction(128)
        'v4.b32'
        >>> vector_instruction(16)
        'b16'
    """
    if vector_bits > 32:
        return f"v{vector_bits // 32}.b32"
    return f"b{vector_bits}"


# Text form


def _format_column(l: LinearLayout, column: int) -> str:
    if column == 0:
        return "0"
    point = l.split_out(column)
    return "(" + ",".join(str(point[label.name]) for label in l.out_dims) + ")"


def format_layout(l: LinearLayout, name: str | None = None) -> str:
    """
    Render the canonical text form.

    The header names the labels; each input label then lists, lowest bit
    first, the image of each of its bits as a logical coordinate tuple, or
    ``0`` for a zero column.
    """
    title = name or l.name or DEFAULT_LAYOUT_NAME
    lines = [
        f"layout {title} in({','.join(map(str, l.in_dims))}) out({','.join(map(str, l.out_dims))})"
    ]
    for label in l.in_dims:
        images = " ".join(_format_column(l, c) for c in l.in_columns(label.name))
        lines.append(f"{label.name}: {images}".rstrip())
    return "\n".join(lines) + "\n"


def format_matrix(l: LinearLayout) -> str:
    """Render the full bit matrix, one row per output bit, lowest bit first."""
    row_names: list[str] = []
    for label in l.out_bit_order:
        row_names.extend(f"{label.name}{k}" for k in range(label.size_log2))
    width = max((len(n) for n in row_names), default=1)
    blocks = [
        (label.name, start, size, max(len(label.name), 2 * size - 1))
        for label in l.in_dims
        for start, size in [l.in_offsets()[label.name]]
        if size
    ]
    header = " " * width + " " + " ".join(f"| {name:<{cell}}" for name, _, _, cell in blocks)
    lines = [header.rstrip()]
    for r, row_name in enumerate(row_names):
        cells = " ".join(
            "| " + f"{' '.join(str(int(b)) for b in l.matrix.bits[r, start : start + size]):<{cell}}"
            for _, start, size, cell in blocks
        )
        lines.append(f"{row_name:<{width}} {cells}".rstrip())
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^layout\s+(\S+)\s+in\((.*?)\)\s+out\((.*?)\)\s*$")
_TOKEN_RE = re.compile(r"\([^)]*\)|[^\s()]+")


def _parse_labels(text: str, line_no: int) -> tuple[DimLabel, ...]:
    labels: list[DimLabel] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, bits = item.partition(":")
        if not sep:
            raise LayoutParseError(f"expected <name>:<bits>, got {item!r}", line_no)
        try:
            labels.append(DimLabel(name.strip(), int(bits)))
        except ValueError as exc:
            raise LayoutParseError(str(exc), line_no) from exc
    return tuple(labels)


def _parse_column(token: str, out_dims: tuple[DimLabel, ...], line_no: int) -> dict[str, int]:
    if token == "0":
        return {}
    if not (token.startswith("(") and token.endswith(")")):
        raise LayoutParseError(f"expected a coordinate tuple or 0, got {token!r}", line_no)
    body = token[1:-1].strip()
    parts = [p.strip() for p in body.split(",")] if body else []
    if len(parts) != len(out_dims):
        raise LayoutParseError(
            f"tuple {token} has {len(parts)} coordinates, expected {len(out_dims)}", line_no
        )
    try:
        return {label.name: int(p) for label, p in zip(out_dims, parts)}
    except ValueError as exc:
        raise LayoutParseError(f"non-integer coordinate in {token}", line_no) from exc


def parse_layouts(text: str) -> list[LinearLayout]:
    """
    Parse every layout in a text document.

    ``#`` starts a comment. Every input label of a header must be listed
    exactly once before the next header.

    Raises:
        LayoutParseError: With the offending line number.
    """
    layouts: list[LinearLayout] = []
    current: dict | None = None

    def finish() -> None:
        if current is None:
            return
        missing = [d.name for d in current["in_dims"] if d.name not in current["columns"]]
        if missing:
            raise LayoutParseError(
                f"layout {current['name']} is missing lines for {', '.join(missing)}",
                current["line_no"],
            )
        columns = [c for d in current["in_dims"] for c in current["columns"][d.name]]
        layouts.append(
            LinearLayout.from_columns(
                current["in_dims"], current["out_dims"], columns, current["name"]
            )
        )

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _HEADER_RE.match(line)
        if header:
            finish()
            in_dims = _parse_labels(header.group(2), line_no)
            out_dims = _parse_labels(header.group(3), line_no)
            try:
                _check_unique(in_dims, "input")
                _check_unique(out_dims, "output")
            except LayoutError as exc:
                raise LayoutParseError(str(exc), line_no) from exc
            current = {
                "name": header.group(1),
                "in_dims": in_dims,
                "out_dims": out_dims,
                "columns": {},
                "line_no": line_no,
            }
            continue
        if current is None:
            raise LayoutParseError("expected a 'layout' header", line_no)
        label_name, sep, rest = line.partition(":")
        label_name = label_name.strip()
        sizes = {d.name: d.size_log2 for d in current["in_dims"]}
        if not sep or label_name not in sizes:
            raise LayoutParseError(f"unknown input label in {line!r}", line_no)
        if label_name in current["columns"]:
            raise LayoutParseError(f"input label {label_name} listed twice", line_no)
        tokens = _TOKEN_RE.findall(rest)
        if len(tokens) != sizes[label_name]:
            raise LayoutParseError(
                f"{label_name} has {sizes[label_name]} bits but {len(tokens)} images", line_no
            )
        empty = LinearLayout((), current["out_dims"], BitMatrix.zeros(
            sum(d.size_log2 for d in current["out_dims"]), 0
        ))
        images: list[int] = []
        for token in tokens:
            point = _parse_column(token, current["out_dims"], line_no)
            try:
                images.append(empty.join_out(point))
            except LayoutError as exc:
                raise LayoutParseError(str(exc), line_no) from exc
        current["columns"][label_name] = images
    finish()
    return layouts


def parse_layout(text: str) -> LinearLayout:
    """Parse a document holding exactly one layout."""
    layouts = parse_layouts(text)
    if len(layouts) != 1:
        raise LayoutParseError(f"expected exactly one layout, found {len(layouts)}")
    return layouts[0]
