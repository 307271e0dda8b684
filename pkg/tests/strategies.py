"""Hypothesis strategies producing random distributed layouts."""

from __future__ import annotations

from typing import Sequence

from hypothesis import strategies as st

from linlayout.constants import HARDWARE_DIMS, REG, THREAD, WARP
from linlayout.layout import DimLabel, LinearLayout

PAIR_MODES = ("same", "same_thread_warp", "same_warp", "random")


def hardware_layout(
    out_dims: Sequence[DimLabel],
    reg: Sequence[int],
    thread: Sequence[int],
    warp: Sequence[int],
    name: str = "",
) -> LinearLayout:
    in_dims = (DimLabel(REG, len(reg)), DimLabel(THREAD, len(thread)), DimLabel(WARP, len(warp)))
    return LinearLayout.from_columns(in_dims, out_dims, [*reg, *thread, *warp], name)


@st.composite
def tensor_dims(draw, max_bits: int = 6) -> tuple[DimLabel, ...]:
    total = draw(st.integers(1, max_bits))
    if draw(st.booleans()):
        return (DimLabel("i", total),)
    rows = draw(st.integers(0, total))
    return DimLabel("i", rows), DimLabel("j", total - rows)


def _with_zeros(draw, vectors: Sequence[int], max_zeros: int) -> list[int]:
    result = list(vectors)
    for _ in range(draw(st.integers(0, max_zeros))):
        result.insert(draw(st.integers(0, len(result))), 0)
    return result


@st.composite
def distributed_layouts(
    draw,
    out_dims: Sequence[DimLabel] | None = None,
    max_bits: int = 6,
    broadcast: bool = True,
) -> LinearLayout:
    """Every tensor bit goes to one hardware bit; with ``broadcast`` some zero columns are added."""
    if out_dims is None:
        out_dims = draw(tensor_dims(max_bits))
    d = sum(label.size_log2 for label in out_dims)
    vectors = [1 << p for p in draw(st.permutations(range(d)))]
    regs = draw(st.integers(0, d))
    threads = draw(st.integers(0, d - regs))
    zeros = 1 if broadcast else 0
    return hardware_layout(
        out_dims,
        _with_zeros(draw, vectors[:regs], zeros),
        _with_zeros(draw, vectors[regs : regs + threads], zeros),
        _with_zeros(draw, vectors[regs + threads :], zeros),
    )


@st.composite
def layout_pairs(
    draw,
    mode: str | None = None,
    max_bits: int = 6,
    broadcast: bool = True,
) -> tuple[LinearLayout, LinearLayout]:
    """
    A source and target layout over the same tensor.

    ``same`` repeats the source, ``same_thread_warp`` permutes its registers,
    ``same_warp`` trades vectors between registers and threads and
    ``random`` draws an unrelated target.
    """
    mode = mode or draw(st.sampled_from(PAIR_MODES))
    a = draw(distributed_layouts(max_bits=max_bits, broadcast=broadcast))
    reg, thread, warp = (list(a.in_columns(name)) for name in HARDWARE_DIMS)
    if mode == "same":
        return a, a
    if mode == "same_thread_warp":
        return a, hardware_layout(a.out_dims, draw(st.permutations(reg)), thread, warp)
    if mode == "same_warp":
        pool = list(draw(st.permutations([c for c in reg + thread if c])))
        new_thread = [pool.pop() if c else 0 for c in thread]
        new_reg = _with_zeros(draw, pool, 1 if broadcast else 0)
        return a, hardware_layout(a.out_dims, new_reg, new_thread, warp)
    return a, draw(distributed_layouts(out_dims=a.out_dims, broadcast=broadcast))
