"""Constructors for the named layout families: blocked, mma, memory layouts and SIMD tiles."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from linlayout.constants import (
    DEFAULT_DIM_NAMES,
    MMA_BITWIDTHS,
    OFFSET,
    REG,
    THREAD,
    WARP,
)
from linlayout.errors import LayoutSpecError
from linlayout.gf2core import BitMatrix
from linlayout.layout import (
    DimLabel,
    LinearLayout,
    ll_is_injective,
    ll_product,
    vector_instruction,
)
from linlayout.utils import log2_exact

LOG = logging.getLogger(__name__)


def default_dim_names(rank: int) -> tuple[str, ...]:
    """Positional tensor dimension names: i, j, k, ... then d6, d7, ..."""
    return tuple(
        DEFAULT_DIM_NAMES[d] if d < len(DEFAULT_DIM_NAMES) else f"d{d}" for d in range(rank)
    )


def identity_tile(k: int, in_label: str, out_dim: str) -> LinearLayout:
    """Identity map from the first ``k`` bits of ``in_label`` to the first ``k`` bits of ``out_dim``."""
    if k < 0:
        raise LayoutSpecError(f"identity tile size must be >= 0, got {k}")
    return LinearLayout(
        (DimLabel(in_label, k),), (DimLabel(out_dim, k),), BitMatrix.identity(k)
    )


def zero_tile(k: int, in_label: str) -> LinearLayout:
    """``k`` input bits mapping to zero (broadcast columns)."""
    return LinearLayout((DimLabel(in_label, k),), (), BitMatrix.zeros(0, k))


def _empty_on(in_labels: Sequence[str], out_names: Sequence[str]) -> LinearLayout:
    """Zero-size layout fixing the label order of later products."""
    return LinearLayout(
        tuple(DimLabel(name, 0) for name in in_labels),
        tuple(DimLabel(name, 0) for name in out_names),
        BitMatrix.zeros(0, 0),
    )


def _check_order(order: Sequence[int], rank: int) -> None:
    if sorted(order) != list(range(rank)):
        raise LayoutSpecError(f"order {list(order)} is not a permutation of 0..{rank - 1}")


@dataclass(frozen=True)
class BlockedSpec:
    """
    Parameters of a blocked layout, all per dimension and in log2 units.

    Attributes:
        shape: Tensor size per dimension.
        size_per_thread: Register bits per dimension.
        threads_per_warp: Thread bits per dimension.
        warps_per_cta: Warp bits per dimension.
        order: Dimensions from fastest to slowest.
        names: Tensor dimension names (positional defaults when empty).
    """

    shape: tuple[int, ...]
    size_per_thread: tuple[int, ...]
    threads_per_warp: tuple[int, ...]
    warps_per_cta: tuple[int, ...]
    order: tuple[int, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        rank = len(self.shape)
        for attr in ("size_per_thread", "threads_per_warp", "warps_per_cta", "order"):
            if len(getattr(self, attr)) != rank:
                raise LayoutSpecError(
                    f"{attr} has {len(getattr(self, attr))} entries, shape has {rank}"
                )
        _check_order(self.order, rank)
        if not self.names:
            object.__setattr__(self, "names", default_dim_names(rank))
        elif len(self.names) != rank:
            raise LayoutSpecError(f"{len(self.names)} names for a rank-{rank} shape")
        for d in range(rank):
            total = self.size_per_thread[d] + self.threads_per_warp[d] + self.warps_per_cta[d]
            if total != self.shape[d] or min(
                self.size_per_thread[d], self.threads_per_warp[d], self.warps_per_cta[d]
            ) < 0:
                raise LayoutSpecError(
                    f"dim {d}: reg {1 << max(self.size_per_thread[d], 0)} x threads "
                    f"{1 << max(self.threads_per_warp[d], 0)} x warps "
                    f"{1 << max(self.warps_per_cta[d], 0)} does not cover size {1 << self.shape[d]}"
                )

    @classmethod
    def from_counts(
        cls,
        shape: Sequence[int],
        size_per_thread: Sequence[int],
        threads_per_warp: Sequence[int],
        warps_per_cta: Sequence[int],
        order: Sequence[int],
        names: Sequence[str] = (),
    ) -> BlockedSpec:
        """Build a spec from element counts such as ``shape=(16, 16)``."""
        return cls(
            shape=tuple(log2_exact(n, "shape") for n in shape),
            size_per_thread=tuple(log2_exact(n, "size per thread") for n in size_per_thread),
            threads_per_warp=tuple(log2_exact(n, "threads per warp") for n in threads_per_warp),
            warps_per_cta=tuple(log2_exact(n, "warps per CTA") for n in warps_per_cta),
            order=tuple(order),
            names=tuple(names),
        )


def blocked(spec: BlockedSpec) -> LinearLayout:
    """
    Blocked layout: each level (registers, then threads, then warps) fills
    the dimensions fastest first.
    """
    layout = _empty_on((REG, THREAD, WARP), spec.names)
    for label, sizes in (
        (REG, spec.size_per_thread),
        (THREAD, spec.threads_per_warp),
        (WARP, spec.warps_per_cta),
    ):
        for d in spec.order:
            layout = ll_product(layout, identity_tile(sizes[d], label, spec.names[d]))
    return layout.with_name("blocked")


@dataclass(frozen=True)
class MmaSpec:
    """
    Parameters of a matrix-multiply register tile.

    Attributes:
        kind: "mma" or "wgmma".
        operand: "lhs", "rhs" or "out".
        bitwidth: Element width in bits (8, 16 or 32).
        warps: Extra warp bits per dimension; for wgmma they are added on top
            of the four warps of one warp group.
        order: Warp order, fastest dimension first.
        names: The two tensor dimension names.
    """

    kind: str = "mma"
    operand: str = "out"
    bitwidth: int = 16
    warps: tuple[int, int] = (0, 0)
    order: tuple[int, int] = (1, 0)
    names: tuple[str, str] = field(default_factory=lambda: default_dim_names(2))

    def __post_init__(self) -> None:
        if self.kind not in ("mma", "wgmma"):
            raise LayoutSpecError(f"unknown mma kind {self.kind!r}")
        if self.operand not in ("lhs", "rhs", "out"):
            raise LayoutSpecError(f"unknown mma operand {self.operand!r}")
        if self.bitwidth not in MMA_BITWIDTHS:
            raise LayoutSpecError(
                f"unsupported mma bitwidth {self.bitwidth}, expected one of {MMA_BITWIDTHS}"
            )
        if self.kind == "wgmma" and self.operand == "rhs":
            raise LayoutSpecError("wgmma reads its rhs operand from shared memory")
        if len(self.warps) != 2 or min(self.warps) < 0:
            raise LayoutSpecError(f"warps must be two non-negative bit counts, got {self.warps}")
        _check_order(self.order, 2)
        if len(self.names) != 2:
            raise LayoutSpecError(f"mma tiles are 2-D, got names {self.names}")


def mma_tile(spec: MmaSpec) -> LinearLayout:
    """
    Register tile of an mma/wgmma operand, extended across warps.

    The lhs and output tiles expand
    ``id^{reg,1}_{log2(32/b)} × id^{thread,1}_2 × id^{thread,0}_3 × id^{reg,0}_1 × id^{reg,1}_1``;
    the rhs tile expands
    ``id^{reg,0}_{log2(32/b)} × id^{thread,0}_2 × id^{thread,1}_3 × id^{reg,1}_1``
    term by term. Extra warps follow ``spec.order``: the output takes the
    identity on every dimension while an operand broadcasts (zero columns)
    along its reduction dimension.
    """
    dim0, dim1 = spec.names
    packed = log2_exact(32 // spec.bitwidth, "32 / bitwidth")
    if spec.operand == "rhs":
        factors = [(REG, dim0, packed), (THREAD, dim0, 2), (THREAD, dim1, 3), (REG, dim1, 1)]
        reduction = 0
    else:
        factors = [
            (REG, dim1, packed),
            (THREAD, dim1, 2),
            (THREAD, dim0, 3),
            (REG, dim0, 1),
            (REG, dim1, 1),
        ]
        reduction = 1 if spec.operand == "lhs" else None
    if spec.kind == "wgmma":
        factors.append((WARP, dim0, 2))

    layout = _empty_on((REG, THREAD, WARP), spec.names)
    for label, out_dim, k in factors:
        layout = ll_product(layout, identity_tile(k, label, out_dim))
    for d in spec.order:
        bits = spec.warps[d]
        if d == reduction:
            layout = ll_product(layout, zero_tile(bits, WARP))
        else:
            layout = ll_product(layout, identity_tile(bits, WARP, spec.names[d]))
    LOG.debug("Built %s %s tile for %d-bit elements", spec.kind, spec.operand, spec.bitwidth)
    return layout.with_name(f"{spec.kind}_{spec.operand}")


def unswizzled(
    shape: Sequence[int], order: Sequence[int], names: Sequence[str] = ()
) -> LinearLayout:
    """
    Memory layout mapping offsets straight onto the tensor.

    Args:
        shape: Bits per dimension.
        order: Dimensions from fastest to slowest.
        names: Tensor dimension names.
    """
    names = tuple(names) or default_dim_names(len(shape))
    _check_order(order, len(shape))
    layout = _empty_on((OFFSET,), names)
    for d in order:
        layout = ll_product(layout, identity_tile(shape[d], OFFSET, names[d]))
    return layout.with_name("unswizzled")


@dataclass(frozen=True)
class SwizzleSpec:
    """
    mma swizzling parameters for a 2^m x 2^n tile.

    Attributes:
        m: Row bits.
        n: Column bits.
        vec: Elements per swizzled vector.
        per_phase: Rows sharing one phase.
        max_phase: Number of distinct phases.
    """

    m: int
    n: int
    vec: int = 1
    per_phase: int = 1
    max_phase: int = 1

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0:
            raise LayoutSpecError(f"tile bits must be >= 0, got m={self.m} n={self.n}")
        log2_exact(self.vec, "vec")
        log2_exact(self.per_phase, "per_phase")
        log2_exact(self.max_phase, "max_phase")
        if self.vec > 1 << self.n:
            raise LayoutSpecError(f"vec {self.vec} exceeds the row length {1 << self.n}")


def swizzle_offset(spec: SwizzleSpec, i: int, j: int) -> int:
    """
    Offset of tensor element (i, j) under mma swizzling, evaluated directly.

    Examples:
        >>> swizzle_offset(SwizzleSpec(m=1, n=2, vec=2, per_phase=1, max_phase=2), 1, 0)
        6
    """
    phase = (i // spec.per_phase) % spec.max_phase
    column = ((phase ^ (j // spec.vec)) * spec.vec) ^ (j % spec.vec)
    return (i << spec.n) | (column % (1 << spec.n))


def mma_swizzle(spec: SwizzleSpec, names: Sequence[str] = ()) -> LinearLayout:
    """
    The offset -> (row, column) layout of mma swizzling.

    Column offset bits map to themselves. Row offset bit ``r`` maps to row
    bit ``r`` plus the column bits
    ``vec * ((2^r / per_phase) mod max_phase) mod 2^n``.
    """
    names = tuple(names) or default_dim_names(2)
    columns = [1 << k for k in range(spec.n)]
    for r in range(spec.m):
        phase = ((1 << r) // spec.per_phase) % spec.max_phase
        xor = (spec.vec * phase) % (1 << spec.n)
        columns.append((1 << (spec.n + r)) | xor)
    return LinearLayout.from_columns(
        (DimLabel(OFFSET, spec.m + spec.n),),
        (DimLabel(names[0], spec.m), DimLabel(names[1], spec.n)),
        columns,
        "mma_swizzle",
    )


@dataclass(frozen=True)
class TilePattern:
    """
    The fixed layout fragment an instruction imposes.

    Attributes:
        tile: Injective layout from hardware labels onto ``offset``.
        instruction: Instruction name, e.g. "v4.b32" or "ldmatrix".
        width_bits: Bits moved per thread by one instruction.
    """

    tile: LinearLayout
    instruction: str
    width_bits: int

    def __post_init__(self) -> None:
        if not ll_is_injective(self.tile):
            raise LayoutSpecError(f"tile for {self.instruction} is not injective")


def vectorized_tile(vector_bits: int, elem_bits: int) -> TilePattern:
    """Tile of a vectorised load/store: 2^k consecutive registers onto consecutive offsets."""
    if vector_bits < elem_bits:
        raise LayoutSpecError(f"vector of {vector_bits} bits cannot hold {elem_bits}-bit elements")
    k = log2_exact(vector_bits // elem_bits, "elements per vector")
    return TilePattern(identity_tile(k, REG, OFFSET), vector_instruction(vector_bits), vector_bits)


def ldmatrix_tile(elem_bytes: int) -> TilePattern:
    """
    Tile of ldmatrix/stmatrix: each thread moves 4 contiguous bytes and
    four threads cover one 16-byte row.
    """
    if elem_bytes not in (1, 2, 4):
        raise LayoutSpecError(f"ldmatrix needs 1, 2 or 4 byte elements, got {elem_bytes}")
    regs = log2_exact(4 // elem_bytes, "elements per 32-bit word")
    tile = ll_product(identity_tile(regs, REG, OFFSET), identity_tile(2, THREAD, OFFSET))
    return TilePattern(tile, "ldmatrix", 32)
