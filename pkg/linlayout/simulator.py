"""
Reference executor for conversion plans, bank accesses, gathers and shape ops.

Every distributed layout is expanded into a lane state: an array indexed
by ``[warp, thread, reg]`` holding the flattened tensor index of the
element in that slot. Plans are executed mechanically on lane states and
compared with the lane state of the target layout.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from linlayout.config import BankConfig
from linlayout.constants import (
    DEFAULT_ELEM_BITS,
    MAX_REPORTED_MISMATCHES,
    REG,
    REPORT_SCHEMA,
    THREAD,
    VECT,
    WARP,
)
from linlayout.errors import SimulationError
from linlayout.gf2core import BitMatrix, bm_right_inverse, span_element, span_elements
from linlayout.layout import LinearLayout, ll_broadcast_mask, ll_hardware, ll_is_invertible
from linlayout.planner import (
    NOOP,
    REG_PERMUTE,
    SHARED_MEMORY,
    WARP_SHUFFLE,
    ConversionPlan,
    GatherPlan,
    MemoryLayout,
)
from linlayout.shapeops import ShapeOp
from linlayout.storage import JsonlWriter

LOG = logging.getLogger(__name__)

EMPTY = -1


class LaneState:
    """
    Contents of every (warp, thread, reg) slot of a distributed layout.

    Attributes:
        layout: The layout with inputs ordered reg, thread, warp.
        values: ``int64`` array of shape (warps, threads, regs).
    """

    def __init__(self, layout: LinearLayout) -> None:
        self.layout = ll_hardware(layout)
        offsets = self.layout.in_offsets()
        shape = tuple(1 << offsets[name][1] for name in (WARP, THREAD, REG))
        hw = np.arange(1 << self.layout.in_bits, dtype=np.int64)
        self.values = self.layout.matrix.apply_many(hw).reshape(shape)

    @property
    def warps(self) -> int:
        return self.values.shape[0]

    @property
    def lanes(self) -> int:
        return self.values.shape[1]

    @property
    def regs(self) -> int:
        return self.values.shape[2]

    def empty(self) -> np.ndarray:
        return np.full(self.values.shape, EMPTY, dtype=np.int64)


@dataclass
class SimReport:
    """
    Outcome of simulating a plan.

    Attributes:
        kind: Plan kind that was executed.
        shuffle_rounds: Rounds executed by warp shuffles.
        read_wavefronts: Simulated wavefronts of the widest load instruction.
        write_wavefronts: Simulated wavefronts of the widest store instruction.
        smem_bytes: Shared memory footprint.
        mismatch_count: Number of slots holding the wrong element.
        mismatches: The first mismatching slots.
    """

    kind: str
    shuffle_rounds: int = 0
    read_wavefronts: int = 0
    write_wavefronts: int = 0
    smem_bytes: int = 0
    mismatch_count: int = 0
    mismatches: list[dict[str, int]] = field(default_factory=list)

    @property
    def correct(self) -> bool:
        return self.mismatch_count == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA,
            "kind": self.kind,
            "correct": self.correct,
            "shuffle_rounds": self.shuffle_rounds,
            "read_wavefronts": self.read_wavefronts,
            "write_wavefronts": self.write_wavefronts,
            "smem_bytes": self.smem_bytes,
            "mismatch_count": self.mismatch_count,
            "mismatches": self.mismatches,
        }


def compare_states(expected: np.ndarray, got: np.ndarray) -> tuple[int, list[dict[str, int]]]:
    """Count differing slots and describe the first few."""
    if expected.shape != got.shape:
        raise SimulationError(f"lane state shapes differ: {expected.shape} vs {got.shape}")
    diff = np.argwhere(expected != got)
    records = [
        {
            "warp": int(w),
            "thread": int(t),
            "reg": int(r),
            "expected": int(expected[w, t, r]),
            "got": int(got[w, t, r]),
        }
        for w, t, r in diff[:MAX_REPORTED_MISMATCHES]
    ]
    return len(diff), records


def _inverse(layout: LinearLayout, what: str) -> BitMatrix:
    if not ll_is_invertible(layout):
        raise SimulationError(f"{what} layout is not invertible")
    return bm_right_inverse(layout.matrix)


def _check_index(value: int, limit: int, what: str) -> int:
    if not 0 <= value < limit:
        raise SimulationError(f"{what} {value} out of range [0, {limit})")
    return value


# Conversions


def _run_register_map(plan: ConversionPlan, source: LaneState, target: LaneState) -> np.ndarray:
    permutation = plan.register_map.permutation()
    if len(permutation) != target.regs:
        raise SimulationError(
            f"register map covers {len(permutation)} registers, target has {target.regs}"
        )
    for reg in permutation:
        _check_index(reg, source.regs, "source register")
    return source.values[:, :, permutation]


def _run_shuffle(
    plan: ConversionPlan,
    source: LaneState,
    target: LaneState,
    trace: JsonlWriter | None,
) -> np.ndarray:
    shuffle = plan.shuffle
    result = target.empty()
    vpos_a = [1 << p for p in shuffle.v_reg_a]
    vpos_b = [1 << p for p in shuffle.v_reg_b]
    if len(vpos_a) != len(vpos_b):
        raise SimulationError("vector register positions differ between source and target")
    for number, rnd in enumerate(shuffle.rounds):
        if len(rnd.src_lane) != target.lanes or len(rnd.send_reg) != source.lanes:
            raise SimulationError(f"round {number} does not cover every lane")
        for lane_b in range(target.lanes):
            lane_a = _check_index(rnd.src_lane[lane_b], source.lanes, "source lane")
            send = rnd.send_reg[lane_a]
            recv = rnd.recv_reg[lane_b]
            for u in range(1 << len(vpos_a)):
                reg_a = _check_index(send | span_element(vpos_a, u), source.regs, "send register")
                reg_b = _check_index(recv | span_element(vpos_b, u), target.regs, "receive register")
                result[:, lane_b, reg_b] = source.values[:, lane_a, reg_a]
        if trace is not None:
            trace.write({"round": number, "offset": rnd.offset, "src_lane": list(rnd.src_lane)})
    # Broadcast registers copy their base register
    mask = shuffle.b_copy_mask
    for reg in range(target.regs):
        if reg & mask:
            result[:, :, reg] = result[:, :, reg & ~mask]
    return result


def _run_shared_memory(plan: ConversionPlan, source: LaneState, target: LaneState) -> np.ndarray:
    inverse = _inverse(plan.memory.layout, "memory")
    buffer = np.full(1 << inverse.rows, EMPTY, dtype=np.int64)
    buffer[inverse.apply_many(source.values)] = source.values
    return buffer[inverse.apply_many(target.values)]


def sim_convert(plan: ConversionPlan, trace: JsonlWriter | None = None) -> SimReport:
    """
    Execute ``plan`` on the source lane state and compare with the target.

    Raises:
        SimulationError: If the plan addresses lanes or registers that do not
            exist, or its memory layout is not invertible.
    """
    source = LaneState(plan.a)
    target = LaneState(plan.b)
    report = SimReport(kind=plan.kind)
    if plan.kind == NOOP:
        if source.values.shape != target.values.shape:
            raise SimulationError("noop plan between layouts of different hardware shape")
        result = source.values.copy()
    elif plan.kind == REG_PERMUTE:
        result = _run_register_map(plan, source, target)
    elif plan.kind == WARP_SHUFFLE:
        result = _run_shuffle(plan, source, target, trace)
        report.shuffle_rounds = len(plan.shuffle.rounds)
    elif plan.kind == SHARED_MEMORY:
        result = _run_shared_memory(plan, source, target)
        report.write_wavefronts = sim_bank_count(plan.memory, plan.a, plan.elem_bits, plan.bank, trace)
        report.read_wavefronts = sim_bank_count(plan.memory, plan.b, plan.elem_bits, plan.bank, trace)
        report.smem_bytes = (1 << plan.memory.layout.in_bits) * plan.elem_bits // 8
    else:
        raise SimulationError(f"unknown plan kind {plan.kind!r}")
    report.mismatch_count, report.mismatches = compare_states(target.values, result)
    if report.correct:
        LOG.info("Simulated %s plan: correct", plan.kind)
    else:
        LOG.warning("Simulated %s plan: %d slots differ", plan.kind, report.mismatch_count)
    return report


# Shared memory banks


@dataclass(frozen=True)
class Transaction:
    """One memory transaction of a vectorised instruction."""

    instruction: int
    index: int
    wavefronts: int
    banks: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "instruction": self.instruction,
            "transaction": self.index,
            "wavefronts": self.wavefronts,
            "rows_per_bank": list(self.banks),
        }


class BankModel:
    """
    Banked shared memory.

    One instruction covers every thread of one warp for one combination of
    the non-vector registers. It is split into ``2^split`` transactions on
    the high thread bits; a transaction takes as many wavefronts as the
    largest number of distinct rows any single bank is asked for.
    """

    def __init__(self, bank: BankConfig | None = None) -> None:
        self.bank = bank or BankConfig()
        self.log: list[Transaction] = []

    def _rows_per_bank(self, addresses: np.ndarray) -> np.ndarray:
        banks = (addresses // self.bank.bank_bytes) % self.bank.banks
        rows = addresses // self.bank.line_bytes
        pairs = np.unique(np.stack([banks.reshape(-1), rows.reshape(-1)]), axis=1)
        return np.bincount(pairs[0], minlength=self.bank.banks)

    def access(
        self,
        mem: MemoryLayout | LinearLayout,
        dist: LinearLayout,
        elem_bits: int = DEFAULT_ELEM_BITS,
    ) -> int:
        """
        Wavefronts of the worst instruction accessing ``mem`` with ``dist``.

        Raises:
            SimulationError: If the vect bits of ``mem`` are not registers of ``dist``.
        """
        layout = mem.layout if isinstance(mem, MemoryLayout) else mem
        inverse = _inverse(layout, "memory")
        dist = ll_hardware(dist)
        regs = dist.in_columns(REG)
        try:
            vect_pos = [regs.index(v) for v in layout.in_columns(VECT)]
        except ValueError as exc:
            raise SimulationError(
                "vect bits of the memory layout are not registers of the access"
            ) from exc

        elem_bytes = elem_bits // 8
        vector_bytes = (1 << len(vect_pos)) * elem_bytes
        threads = dist.in_size(THREAD)
        split = min(max(0, (vector_bytes // self.bank.bank_bytes).bit_length() - 1), threads)
        low_threads = threads - split
        reg_zero = ll_broadcast_mask(dist, REG)
        other_masks = [
            1 << k for k in range(len(regs)) if k not in vect_pos and not reg_zero >> k & 1
        ]
        elements = np.array(span_elements([1 << p for p in vect_pos]), dtype=np.int64)
        reg_bits = dist.in_size(REG)

        worst = 0
        instruction = 0
        for warp in range(1 << dist.in_size(WARP)):
            for combo in range(1 << len(other_masks)):
                base = (warp << (reg_bits + threads)) | span_element(other_masks, combo)
                total = 0
                for tx in range(1 << split):
                    lanes = np.arange(1 << low_threads, dtype=np.int64) | (tx << low_threads)
                    hw = base | (lanes[:, None] << reg_bits) | elements[None, :]
                    offsets = inverse.apply_many(dist.matrix.apply_many(hw))
                    rows_per_bank = self._rows_per_bank(offsets * elem_bytes)
                    wavefronts = int(rows_per_bank.max())
                    self.log.append(
                        Transaction(instruction, tx, wavefronts, tuple(int(n) for n in rows_per_bank))
                    )
                    total += wavefronts
                worst = max(worst, total)
                instruction += 1
        LOG.debug("Bank model: %d instructions, worst %d wavefronts", instruction, worst)
        return worst


def sim_bank_count(
    mem: MemoryLayout | LinearLayout,
    dist: LinearLayout,
    elem_bits: int = DEFAULT_ELEM_BITS,
    bank: BankConfig | None = None,
    trace: JsonlWriter | None = None,
) -> int:
    """Wavefronts of the worst vectorised instruction; the transaction log goes to ``trace``."""
    model = BankModel(bank)
    worst = model.access(mem, dist, elem_bits)
    if trace is not None:
        for transaction in model.log:
            trace.write(transaction.to_dict())
    return worst


# Gather


def sim_gather(plan: GatherPlan, l: LinearLayout, src: np.ndarray, idx: np.ndarray) -> SimReport:
    """
    Run a gather plan and compare with ``np.take_along_axis``.

    In round ``j`` each lane reads from lane ``thread ^ lane_xor[j]``; a slot
    is filled in the round whose lane matches the owner of its source element.

    Raises:
        SimulationError: If the plan is infeasible or an index is out of range.
    """
    if not plan.feasible:
        raise SimulationError(f"gather along {plan.axis_name} is not feasible with warp shuffles")
    l = ll_hardware(l)
    shape = l.out_shape
    if src.shape != shape or idx.shape != shape:
        raise SimulationError(f"gather operands must have shape {shape}")
    axis_size = shape[plan.axis]
    if idx.size and (idx.min() < 0 or idx.max() >= axis_size):
        raise SimulationError(f"gather index out of range [0, {axis_size})")
    expected_values = np.take_along_axis(src, idx, axis=plan.axis).reshape(-1)

    state = LaneState(l)
    inverse = bm_right_inverse(l.matrix)
    src_flat = src.reshape(-1)
    idx_flat = idx.reshape(-1)
    reg_bits = l.in_size(REG)
    thread_bits = l.in_size(THREAD)
    thread_copy = ll_broadcast_mask(l, THREAD) << reg_bits
    warp_copy = ll_broadcast_mask(l, WARP) << (reg_bits + thread_bits)
    axis_shift = l.out_offsets()[l.out_names[plan.axis]][0]
    axis_mask = (axis_size - 1) << axis_shift

    expected = np.full(state.values.shape, EMPTY, dtype=np.int64)
    got = np.full(state.values.shape, EMPTY, dtype=np.int64)
    lane_rounds = {xor: j for j, xor in enumerate(plan.lane_xor)}
    for w in range(state.warps):
        for t in range(state.lanes):
            for r in range(state.regs):
                elem = int(state.values[w, t, r])
                expected[w, t, r] = expected_values[elem]
                source_elem = (elem & ~axis_mask) | (int(idx_flat[elem]) << axis_shift)
                hw = inverse.apply(source_elem)
                here = r | (t << reg_bits) | (w << (reg_bits + thread_bits))
                hw |= here & (thread_copy | warp_copy)
                src_warp = hw >> (reg_bits + thread_bits)
                src_lane = (hw >> reg_bits) & ((1 << thread_bits) - 1)
                if src_warp != w or (t ^ src_lane) not in lane_rounds:
                    continue
                got[w, t, r] = src_flat[state.values[src_warp, src_lane, hw & ((1 << reg_bits) - 1)]]
    report = SimReport(kind="gather", shuffle_rounds=plan.rounds)
    report.mismatch_count, report.mismatches = compare_states(expected, got)
    return report


# Shape operations


def _reference(op: ShapeOp) -> list[np.ndarray]:
    """Operand element ids of every result element, one array per result."""
    numel = int(np.prod(op.in_shape))
    x = np.arange(numel, dtype=np.int64).reshape(op.in_shape)
    if op.kind == "trans":
        results = [np.transpose(x, op.perm)]
    elif op.kind == "reshape":
        results = [x.reshape(op.out_shape)]
    elif op.kind == "expand_dims":
        results = [np.expand_dims(x, op.axis)]
    elif op.kind == "broadcast":
        results = [np.broadcast_to(x, op.out_shape)]
    elif op.kind == "join":
        results = [np.stack([x, x + numel], axis=-1)]
    else:
        results = [x[..., 0], x[..., 1]]
    return [r.reshape(-1) for r in results]


def _operand_slot(op: ShapeOp, reg: int, in_regs: int, half: int) -> tuple[int, int]:
    """Operand register and id offset feeding result register ``reg``."""
    if op.kind == "broadcast":
        return reg & (in_regs - 1), 0
    if op.kind == "join":
        return reg >> 1, reg & 1
    if op.kind == "split":
        return (reg << 1) | half, 0
    return reg, 0


def sim_shape_op(op: ShapeOp, l_in: LinearLayout, l_out: LinearLayout) -> SimReport:
    """
    Check that ``op`` maps ``l_in`` to ``l_out`` without moving data between lanes.

    Raises:
        SimulationError: If the layouts do not fit the op's shapes or thread counts.
    """
    if l_in.out_shape != op.in_shape or l_out.out_shape != op.out_shape:
        raise SimulationError(f"layouts do not match the shapes of {op.kind}")
    source = LaneState(l_in)
    target = LaneState(l_out)
    if (source.warps, source.lanes) != (target.warps, target.lanes):
        raise SimulationError(f"{op.kind} changes the number of threads or warps")
    numel = int(np.prod(op.in_shape))
    report = SimReport(kind=op.kind)
    for half, reference in enumerate(_reference(op)):
        expected = reference[target.values]
        got = target.empty()
        for reg in range(target.regs):
            operand_reg, select = _operand_slot(op, reg, source.regs, half)
            try:
                _check_index(operand_reg, source.regs, "operand register")
            except SimulationError as exc:
                raise SimulationError(f"{op.kind}: {exc}") from exc
            got[:, :, reg] = source.values[:, :, operand_reg] + select * numel
        count, records = compare_states(expected, got)
        report.mismatch_count += count
        report.mismatches.extend(records[: MAX_REPORTED_MISMATCHES - len(report.mismatches)])
    return report

