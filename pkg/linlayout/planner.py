"""
Conversion planning between distributed layouts.

Vectors of the flattened tensor space are LSB-first ints; a distributed
layout's columns are then standard vectors (one bit set) or zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

from linlayout.config import BankConfig, PlannerConfig
from linlayout.constants import (
    BANK,
    DEFAULT_ELEM_BITS,
    IDX,
    OFFSET,
    PLAN_SCHEMA,
    REG,
    SUPPORTED_ELEM_BITS,
    THREAD,
    VECT,
    WARP,
)
from linlayout.constructors import TilePattern, vectorized_tile
from linlayout.errors import (
    DivisionError,
    LabelMismatchError,
    NotSurjectiveError,
    PlanError,
    TileMismatchError,
    UnsolvableError,
)
from linlayout.gf2core import (
    Basis,
    BitMatrix,
    basis_complement,
    bm_right_inverse,
    bm_solve_min_weight,
    in_span,
    independent_subset,
    span_element,
    span_intersection_dim,
)
from linlayout.layout import (
    DimLabel,
    LinearLayout,
    format_layout,
    ll_compose,
    ll_broadcast_mask,
    ll_hardware,
    ll_is_distributed,
    ll_is_surjective,
    ll_left_divide,
    ll_merge_out,
    ll_right_inverse,
    parse_layout,
)
from linlayout.utils import format_bits, iter_bits, log2_exact, parse_bits

LOG = logging.getLogger(__name__)

NOOP = "noop"
REG_PERMUTE = "reg_permute"
WARP_SHUFFLE = "warp_shuffle"
SHARED_MEMORY = "shared_memory"
PLAN_KINDS = (NOOP, REG_PERMUTE, WARP_SHUFFLE, SHARED_MEMORY)


def _strings(vectors: Sequence[int], length: int) -> list[str]:
    return [format_bits(v, length) for v in vectors]


def _ints(strings: Sequence[str]) -> tuple[int, ...]:
    return tuple(parse_bits(s) for s in strings)


def hardware_lookup(l: LinearLayout) -> dict[int, int]:
    """Map each tensor bit to the input bit holding it; zero columns are skipped."""
    lookup: dict[int, int] = {}
    for position, column in enumerate(l.columns()):
        if column:
            lookup.setdefault(column.bit_length() - 1, position)
    return lookup


def to_hardware(lookup: dict[int, int], x: int) -> int:
    """Canonical hardware index of tensor vector ``x``; broadcast bits read as 0."""
    hw = 0
    for bit in iter_bits(x):
        hw |= 1 << lookup[bit]
    return hw


# Plan records


@dataclass(frozen=True)
class PlanStats:
    """Predicted cost of a conversion."""

    rounds: int = 0
    read_wavefronts: int = 0
    write_wavefronts: int = 0
    smem_bytes: int = 0

    def to_dict(self) -> dict[str, int]:
        return {
            "rounds": self.rounds,
            "read_wavefronts": self.read_wavefronts,
            "write_wavefronts": self.write_wavefronts,
            "smem_bytes": self.smem_bytes,
        }


@dataclass(frozen=True)
class RegisterMap:
    """
    Register permutation of a thread-local conversion.

    Attributes:
        sources: For each destination register bit, the source register index it reads.
        src_regs: Number of source register bits.
    """

    sources: tuple[int, ...]
    src_regs: int

    def source_of(self, reg: int) -> int:
        return span_element(self.sources, reg)

    def permutation(self) -> list[int]:
        """Source register of every destination register."""
        return [self.source_of(r) for r in range(1 << len(self.sources))]


@dataclass(frozen=True)
class ShuffleRound:
    """
    One round of warp shuffles; arrays are indexed by lane.

    Attributes:
        offset: Tensor vector R(r) of the round.
        hw_offset: The same vector in source hardware coordinates.
        send_reg: Base register each source lane sends.
        src_lane: Lane each destination lane reads from.
        recv_reg: Base register each destination lane writes.
    """

    offset: int
    hw_offset: int
    send_reg: tuple[int, ...]
    src_lane: tuple[int, ...]
    recv_reg: tuple[int, ...]


@dataclass(frozen=True)
class ShufflePlan:
    """
    Warp-shuffle schedule.

    Attributes:
        d: Tensor bits.
        hw_bits: Source hardware bits, used to render ``hw_offset``.
        V: Vectorisation basis, moved as one payload.
        I: Thread vectors shared by both layouts.
        E: Source-only thread vectors, ascending.
        F: Target-only thread vectors, ascending.
        G: Pairs ``E[i] ^ F[i]``.
        R: Complement of ``V + I + G + warps``, enumerating the rounds.
        v_reg_a: Source register bits of V.
        v_reg_b: Target register bits of V.
        b_copy_mask: Target register bits that are broadcast, filled by local copies.
        rounds: ``2^len(R)`` rounds.
    """

    d: int
    hw_bits: int
    V: tuple[int, ...]
    I: tuple[int, ...]
    E: tuple[int, ...]
    F: tuple[int, ...]
    G: tuple[int, ...]
    R: tuple[int, ...]
    v_reg_a: tuple[int, ...]
    v_reg_b: tuple[int, ...]
    b_copy_mask: int
    rounds: tuple[ShuffleRound, ...]

    def exchange_span(self) -> list[int]:
        """All elements of span(V + I + G)."""
        basis = self.V + self.I + self.G
        return [span_element(basis, k) for k in range(1 << len(basis))]

    def to_dict(self) -> dict[str, Any]:
        d = self.d
        return {
            "V": _strings(self.V, d),
            "I": _strings(self.I, d),
            "E": _strings(self.E, d),
            "F": _strings(self.F, d),
            "G": _strings(self.G, d),
            "R": _strings(self.R, d),
            "hw_bits": self.hw_bits,
            "v_reg_a": list(self.v_reg_a),
            "v_reg_b": list(self.v_reg_b),
            "b_copy_mask": self.b_copy_mask,
            "rounds": [
                {
                    "offset": format_bits(r.offset, d),
                    "hw_offset": format_bits(r.hw_offset, self.hw_bits),
                    "send_reg": list(r.send_reg),
                    "src_lane": list(r.src_lane),
                    "recv_reg": list(r.recv_reg),
                }
                for r in self.rounds
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], d: int) -> ShufflePlan:
        return cls(
            d=d,
            hw_bits=int(data["hw_bits"]),
            V=_ints(data["V"]),
            I=_ints(data["I"]),
            E=_ints(data["E"]),
            F=_ints(data["F"]),
            G=_ints(data["G"]),
            R=_ints(data["R"]),
            v_reg_a=tuple(data["v_reg_a"]),
            v_reg_b=tuple(data["v_reg_b"]),
            b_copy_mask=int(data["b_copy_mask"]),
            rounds=tuple(
                ShuffleRound(
                    offset=parse_bits(r["offset"]),
                    hw_offset=parse_bits(r["hw_offset"]),
                    send_reg=tuple(r["send_reg"]),
                    src_lane=tuple(r["src_lane"]),
                    recv_reg=tuple(r["recv_reg"]),
                )
                for r in data["rounds"]
            ),
        )


@dataclass(frozen=True)
class MemoryLayout:
    """
    Swizzled shared memory layout ``(vect, bank, idx) -> tensor`` and how it was chosen.

    Attributes:
        layout: The memory layout.
        U: Basis of span(V + A_bank).
        W: Basis of span(V + B_bank).
        E: Bank vectors only in the smaller side.
        F: Bank vectors only in the larger side.
        H: Pairs ``E[i] ^ F[i]``.
        C: Complement of span(U + W).
        padded: idx vectors taken from A_bank (or completion) because H + C ran short.
        split: log2 of transactions per vectorised instruction.
    """

    layout: LinearLayout
    U: tuple[int, ...] = ()
    W: tuple[int, ...] = ()
    E: tuple[int, ...] = ()
    F: tuple[int, ...] = ()
    H: tuple[int, ...] = ()
    C: tuple[int, ...] = ()
    padded: int = 0
    split: int = 0

    @property
    def d(self) -> int:
        return self.layout.out_bits

    @property
    def vect(self) -> tuple[int, ...]:
        return self.layout.in_columns(VECT)

    @property
    def bank(self) -> tuple[int, ...]:
        return self.layout.in_columns(BANK)

    @property
    def idx(self) -> tuple[int, ...]:
        return self.layout.in_columns(IDX)

    @property
    def achieved(self) -> int:
        """Conflict-free idx dimension: idx vectors drawn from H and C."""
        return len(self.idx) - self.padded

    def to_dict(self) -> dict[str, Any]:
        d = self.d
        return {
            "layout": format_layout(self.layout, "S"),
            "U": _strings(self.U, d),
            "W": _strings(self.W, d),
            "E": _strings(self.E, d),
            "F": _strings(self.F, d),
            "H": _strings(self.H, d),
            "C": _strings(self.C, d),
            "padded": self.padded,
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MemoryLayout:
        return cls(
            layout=parse_layout(data["layout"]),
            U=_ints(data.get("U", [])),
            W=_ints(data.get("W", [])),
            E=_ints(data.get("E", [])),
            F=_ints(data.get("F", [])),
            H=_ints(data.get("H", [])),
            C=_ints(data.get("C", [])),
            padded=int(data.get("padded", 0)),
            split=int(data.get("split", 0)),
        )


@dataclass(frozen=True)
class TileMatch:
    """
    Result of dividing a layout by an instruction tile.

    Attributes:
        quotient: ``P_reg L ÷ T``.
        permutation: New register bit k is old register bit permutation[k]; None when not needed.
    """

    quotient: LinearLayout
    permutation: tuple[int, ...] | None = None


@dataclass(frozen=True)
class ConversionPlan:
    """
    How to move data from layout ``a`` to layout ``b``.

    Attributes:
        kind: noop, reg_permute, warp_shuffle or shared_memory.
        a: Source layout (hardware input order).
        b: Target layout (hardware input order).
        elem_bits: Element width.
        quotient: ``b^-1 ∘ a`` from source to target hardware bits.
        stats: Predicted rounds and wavefronts.
        register_map: Payload of reg_permute.
        shuffle: Payload of warp_shuffle.
        memory: Payload of shared_memory.
        store_tile: Vectorised store match for ``a`` (shared_memory).
        load_tile: Vectorised load match for ``b`` (shared_memory).
        bank: Bank geometry the plan was made for.
        reason: Why a cheaper kind was not used.
    """

    kind: str
    a: LinearLayout
    b: LinearLayout
    elem_bits: int
    quotient: LinearLayout
    stats: PlanStats = field(default_factory=PlanStats)
    register_map: RegisterMap | None = None
    shuffle: ShufflePlan | None = None
    memory: MemoryLayout | None = None
    store_tile: TileMatch | None = None
    load_tile: TileMatch | None = None
    bank: BankConfig = field(default_factory=BankConfig)
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        """Plan document with a fixed field order."""
        document: dict[str, Any] = {
            "schema": PLAN_SCHEMA,
            "kind": self.kind,
            "elem_bits": self.elem_bits,
            "bank": str(self.bank),
            "source": format_layout(self.a, "A"),
            "target": format_layout(self.b, "B"),
            "quotient": format_layout(self.quotient, "Q"),
            "stats": self.stats.to_dict(),
            "reason": self.reason,
        }
        if self.register_map is not None:
            document["register_map"] = {
                "sources": list(self.register_map.sources),
                "src_regs": self.register_map.src_regs,
                "permutation": self.register_map.permutation(),
            }
        if self.shuffle is not None:
            document["shuffle"] = self.shuffle.to_dict()
        if self.memory is not None:
            document["memory"] = self.memory.to_dict()
            for key, match in (("store_tile", self.store_tile), ("load_tile", self.load_tile)):
                if match is not None:
                    document["memory"][key] = {
                        "permutation": None if match.permutation is None else list(match.permutation),
                    }
        return document

    @classmethod
    def from_dict(cls, document: dict[str, Any]) -> ConversionPlan:
        """
        Rebuild a plan from its document.

        Raises:
            PlanError: For unknown schemas, kinds or missing payloads.
        """
        if document.get("schema") != PLAN_SCHEMA:
            raise PlanError(f"unsupported plan schema {document.get('schema')!r}")
        kind = document.get("kind")
        if kind not in PLAN_KINDS:
            raise PlanError(f"unknown plan kind {kind!r}")
        try:
            a = ll_hardware(parse_layout(document["source"]))
            b = ll_hardware(parse_layout(document["target"]))
            quotient = parse_layout(document["quotient"])
            stats = PlanStats(**document["stats"])
            register_map = shuffle = memory = None
            if kind == REG_PERMUTE:
                data = document["register_map"]
                register_map = RegisterMap(tuple(data["sources"]), int(data["src_regs"]))
            elif kind == WARP_SHUFFLE:
                shuffle = ShufflePlan.from_dict(document["shuffle"], a.out_bits)
            elif kind == SHARED_MEMORY:
                memory = MemoryLayout.from_dict(document["memory"])
            return cls(
                kind=kind,
                a=a,
                b=b,
                elem_bits=int(document["elem_bits"]),
                quotient=quotient,
                stats=stats,
                register_map=register_map,
                shuffle=shuffle,
                memory=memory,
                bank=BankConfig.parse(document.get("bank", "32x4")),
                reason=document.get("reason", ""),
            )
        except (KeyError, TypeError) as exc:
            raise PlanError(f"malformed {kind} plan: missing or invalid {exc}") from exc


@dataclass(frozen=True)
class GatherPlan:
    """
    Warp-shuffle gather along one axis.

    Attributes:
        axis: Gathered dimension (position).
        axis_name: Its label.
        feasible: True when no warp bit moves along the axis.
        rounds: ``2^len(thread_bits)`` when feasible, else 0.
        thread_bits: Thread bit positions whose columns move along the axis.
        reg_bits: Register bit positions whose columns move along the axis.
        lane_xor: Per round, the lane mask XORed onto the reading lane.
        fallback: "shared_memory" when infeasible.
    """

    axis: int
    axis_name: str
    feasible: bool
    rounds: int
    thread_bits: tuple[int, ...] = ()
    reg_bits: tuple[int, ...] = ()
    lane_xor: tuple[int, ...] = ()
    fallback: str | None = None


# Helpers


def _check_pair(a: LinearLayout, b: LinearLayout) -> tuple[LinearLayout, LinearLayout]:
    if a.out_dims != b.out_dims:
        raise PlanError(
            f"layouts cover different tensors: ({', '.join(map(str, a.out_dims))}) "
            f"vs ({', '.join(map(str, b.out_dims))})"
        )
    if not ll_is_surjective(b):
        raise NotSurjectiveError("target layout is not surjective")
    for side, layout in (("source", a), ("target", b)):
        if not ll_is_distributed(layout):
            raise PlanError(f"{side} layout is not distributed")
    return ll_hardware(a), ll_hardware(b)


def _vector_basis(a: LinearLayout, b: LinearLayout, limit: int) -> tuple[int, ...]:
    """Register vectors common to both layouts, in source register order, at most ``limit``."""
    b_regs = set(b.in_columns(REG))
    common = [c for c in a.in_columns(REG) if c and c in b_regs]
    return tuple(common[: max(limit, 0)])


def _block_is_identity(q: BitMatrix, a: LinearLayout, b: LinearLayout, label: str) -> bool:
    a_start, a_size = a.in_offsets()[label]
    b_start, b_size = b.in_offsets()[label]
    if a_size != b_size:
        return False
    return all(q.column(a_start + k) == 1 << (b_start + k) for k in range(a_size))


def quotient_matrix(a: LinearLayout, b: LinearLayout) -> BitMatrix:
    """
    Min-weight solution ``Q`` of ``B Q = A``, with the identity on blocks equal in both layouts.
    """
    q = bm_solve_min_weight(b.matrix, a.matrix)
    columns = list(q.columns())
    for label in (REG, THREAD, WARP):
        if a.in_columns(label) == b.in_columns(label):
            a_start, size = a.in_offsets()[label]
            b_start = b.in_offsets()[label][0]
            for k in range(size):
                columns[a_start + k] = 1 << (b_start + k)
    return BitMatrix.from_columns(columns, b.in_bits)


def _max_vector_log2(elem_bits: int, cap_bits: int) -> int:
    if elem_bits > cap_bits:
        return 0
    return log2_exact(cap_bits // elem_bits, "vector elements")


# Planning


def plan_convert(
    a: LinearLayout,
    b: LinearLayout,
    elem_bits: int = DEFAULT_ELEM_BITS,
    cfg: PlannerConfig | None = None,
) -> ConversionPlan:
    """
    Plan the conversion from layout ``a`` to layout ``b``.

    The quotient ``b^-1 ∘ a`` decides the kind: identity means nothing to
    do, identity outside registers is a register permutation, identity on
    warps is a warp shuffle and anything else goes through shared memory.

    Raises:
        PlanError: If the layouts cover different tensors or are not distributed.
        NotSurjectiveError: If ``b`` is not surjective.
    """
    cfg = cfg or PlannerConfig()
    if elem_bits not in SUPPORTED_ELEM_BITS:
        raise PlanError(f"unsupported element width {elem_bits}")
    a, b = _check_pair(a, b)
    q = quotient_matrix(a, b)
    quotient = LinearLayout(a.in_dims, tuple(reversed(b.in_dims)), q, "quotient")
    common = dict(a=a, b=b, elem_bits=elem_bits, quotient=quotient, bank=cfg.bank)

    if a == b:
        LOG.info("Layouts are equal, no conversion needed")
        return ConversionPlan(kind=NOOP, **common)

    # Registers only move within a thread
    thread_same = _block_is_identity(q, a, b, THREAD)
    warp_same = _block_is_identity(q, a, b, WARP)
    reg_rows = (1 << b.in_size(REG)) - 1
    if thread_same and warp_same and all(c & ~reg_rows == 0 for c in q.columns()[: a.in_size(REG)]):
        register_map = plan_register_map(a, b)
        LOG.info("Conversion is thread-local: register permutation")
        return ConversionPlan(kind=REG_PERMUTE, register_map=register_map, **common)

    reason = ""
    if not warp_same:
        reason = "data moves between warps"
    elif a.in_size(THREAD) != b.in_size(THREAD):
        reason = "thread counts differ"
    elif ll_broadcast_mask(a, THREAD) != ll_broadcast_mask(b, THREAD):
        reason = "thread broadcast bits differ"
    if not reason:
        shuffle = plan_shuffle(a, b, elem_bits, cfg)
        LOG.info("Conversion uses warp shuffles in %d rounds", len(shuffle.rounds))
        stats = PlanStats(rounds=len(shuffle.rounds))
        return ConversionPlan(kind=WARP_SHUFFLE, shuffle=shuffle, stats=stats, **common)

    LOG.info("Conversion goes through shared memory: %s", reason)
    memory = plan_swizzle(a, b, elem_bits, cfg)
    stats = PlanStats(
        rounds=0,
        read_wavefronts=predict_wavefronts(memory, b, elem_bits, cfg.bank),
        write_wavefronts=predict_wavefronts(memory, a, elem_bits, cfg.bank),
        smem_bytes=(1 << a.out_bits) * elem_bits // 8,
    )
    # Vectorised store and load through the swizzled layout
    vector_bits = (1 << len(memory.vect)) * elem_bits
    tile = vectorized_tile(vector_bits, elem_bits)
    return ConversionPlan(
        kind=SHARED_MEMORY,
        memory=memory,
        stats=stats,
        store_tile=_memory_tile(memory, a, tile),
        load_tile=_memory_tile(memory, b, tile),
        reason=reason,
        **common,
    )


def plan_register_map(a: LinearLayout, b: LinearLayout) -> RegisterMap:
    """For every target register bit, the source register index holding its element."""
    a_regs = a.in_columns(REG)
    b_regs = b.in_columns(REG)
    a_reg_matrix = BitMatrix.from_columns(a_regs, a.out_bits)
    try:
        solution = bm_solve_min_weight(a_reg_matrix, BitMatrix.from_columns(b_regs, a.out_bits))
    except UnsolvableError as exc:
        raise PlanError(
            f"target register bit {exc.column} is not held by source registers"
        ) from exc
    return RegisterMap(solution.columns(), len(a_regs))


def _drop_threads(l: LinearLayout, mask: int) -> LinearLayout:
    """``l`` without the thread bits set in ``mask``."""
    threads = tuple(c for k, c in enumerate(l.in_columns(THREAD)) if not mask >> k & 1)
    in_dims = (DimLabel(REG, l.in_size(REG)), DimLabel(THREAD, len(threads)), DimLabel(WARP, l.in_size(WARP)))
    return LinearLayout.from_columns(
        in_dims, l.out_dims, l.in_columns(REG) + threads + l.in_columns(WARP), l.name
    )


def _expand_lanes(plan: ShufflePlan, a: LinearLayout, mask: int) -> ShufflePlan:
    """
    Lift a plan over the non-broadcast lanes of ``a`` to every lane.

    A lane reads from the lift of its reduced source lane with its own
    broadcast bits, so each round stays a permutation of the lanes.
    """
    threads = a.in_size(THREAD)
    kept = [k for k in range(threads) if not mask >> k & 1]
    projection = BitMatrix.from_columns(
        [0 if mask >> k & 1 else 1 << kept.index(k) for k in range(threads)], len(kept)
    )
    embed = bm_right_inverse(projection) if kept else BitMatrix.zeros(threads, 0)
    reduced = [projection.apply(lane) for lane in range(1 << threads)]
    lookup = hardware_lookup(a)
    rounds = tuple(
        ShuffleRound(
            offset=rnd.offset,
            hw_offset=to_hardware(lookup, rnd.offset),
            send_reg=tuple(rnd.send_reg[c] for c in reduced),
            src_lane=tuple(embed.apply(rnd.src_lane[c]) | (lane & mask) for lane, c in enumerate(reduced)),
            recv_reg=tuple(rnd.recv_reg[c] for c in reduced),
        )
        for rnd in plan.rounds
    )
    return replace(plan, hw_bits=a.in_bits, rounds=rounds)


def plan_shuffle(
    a: LinearLayout,
    b: LinearLayout,
    elem_bits: int = DEFAULT_ELEM_BITS,
    cfg: PlannerConfig | None = None,
) -> ShufflePlan:
    """
    Build the warp-shuffle rounds converting ``a`` to ``b``.

    Each round exchanges the affine space ``R(r) + span(V + I + G)``,
    which holds exactly one vectorised element per lane in both layouts.

    Thread bits broadcast by both layouts are dropped first and the rounds
    of the reduced pair are expanded back to every lane, so duplicate lanes
    exchange within their own copy. Broadcast warp bits need no shuffle.

    Raises:
        PlanError: If warps differ, thread counts differ or the layouts
            broadcast different thread bits.
    """
    cfg = cfg or PlannerConfig()
    a, b = _check_pair(a, b)
    d = a.out_bits
    a_thr, b_thr = a.in_columns(THREAD), b.in_columns(THREAD)
    warps = a.in_columns(WARP)
    if warps != b.in_columns(WARP):
        raise PlanError("warp shuffles need identical warp bits")
    if len(a_thr) != len(b_thr):
        raise PlanError("warp shuffles need the same number of thread bits")
    a_mask, b_mask = ll_broadcast_mask(a, THREAD), ll_broadcast_mask(b, THREAD)
    if a_mask != b_mask:
        raise PlanError(
            f"warp shuffles need the same thread broadcast bits: source {a_mask:#b}, target {b_mask:#b}"
        )
    if a_mask:
        reduced = plan_shuffle(_drop_threads(a, a_mask), _drop_threads(b, b_mask), elem_bits, cfg)
        LOG.debug("Expanding shuffle rounds over broadcast thread bits %#b", a_mask)
        return _expand_lanes(reduced, a, a_mask)
    warps = tuple(w for w in warps if w)

    limit = _max_vector_log2(elem_bits, cfg.shuffle_bits)
    vectors = _vector_basis(a, b, limit)
    shared = sorted(set(a_thr) & set(b_thr))
    only_a = sorted(set(a_thr) - set(b_thr))
    only_b = sorted(set(b_thr) - set(a_thr))
    pairs = tuple(e ^ f for e, f in zip(only_a, only_b))
    kept = Basis(d, vectors + tuple(shared) + pairs + warps)
    rest = basis_complement(kept)
    LOG.debug("Shuffle bases: |V|=%d |I|=%d |G|=%d |R|=%d", len(vectors), len(shared), len(pairs), len(rest))

    # One round per coset of the exchange span
    a_lookup, b_lookup = hardware_lookup(a), hardware_lookup(b)
    a_regs, b_regs = a.in_size(REG), b.in_size(REG)
    lanes = 1 << len(a_thr)
    exchange = tuple(shared) + pairs
    rounds: list[ShuffleRound] = []
    for r in range(1 << len(rest)):
        offset = span_element(rest, r)
        send_reg = [-1] * lanes
        src_lane = [-1] * lanes
        recv_reg = [-1] * lanes
        for k in range(1 << len(exchange)):
            x = offset ^ span_element(exchange, k)
            hw_a = to_hardware(a_lookup, x)
            hw_b = to_hardware(b_lookup, x)
            lane_a, reg_a = (hw_a >> a_regs) % lanes, hw_a & ((1 << a_regs) - 1)
            lane_b, reg_b = (hw_b >> b_regs) % lanes, hw_b & ((1 << b_regs) - 1)
            send_reg[lane_a] = reg_a
            src_lane[lane_b] = lane_a
            recv_reg[lane_b] = reg_b
        rounds.append(
            ShuffleRound(
                offset=offset,
                hw_offset=to_hardware(a_lookup, offset),
                send_reg=tuple(send_reg),
                src_lane=tuple(src_lane),
                recv_reg=tuple(recv_reg),
            )
        )

    # Broadcast registers of b are filled by local copies
    b_zero = 0
    for k, column in enumerate(b.in_columns(REG)):
        if column == 0:
            b_zero |= 1 << k
    return ShufflePlan(
        d=d,
        hw_bits=a.in_bits,
        V=vectors,
        I=tuple(shared),
        E=tuple(only_a),
        F=tuple(only_b),
        G=pairs,
        R=rest,
        v_reg_a=tuple(a_lookup[v.bit_length() - 1] for v in vectors),
        v_reg_b=tuple(b_lookup[v.bit_length() - 1] for v in vectors),
        b_copy_mask=b_zero,
        rounds=tuple(rounds),
    )


def _split_log2(vector_bytes: int, bank: BankConfig) -> int:
    """log2 of the transactions one vectorised instruction is split into."""
    return max(0, (vector_bytes // bank.bank_bytes).bit_length() - 1)


def _bank_vectors(l: LinearLayout, split: int, all_threads: bool) -> tuple[int, ...]:
    threads = l.in_columns(THREAD)
    if not all_threads:
        threads = threads[: max(len(threads) - split, 0)]
    return tuple(c for c in threads if c)


def plan_swizzle(
    a: LinearLayout,
    b: LinearLayout,
    elem_bits: int = DEFAULT_ELEM_BITS,
    cfg: PlannerConfig | None = None,
) -> MemoryLayout:
    """
    Choose a swizzled shared memory layout for storing with ``a`` and loading with ``b``.

    The idx vectors avoid span(V + A_bank) and span(V + B_bank) as far as
    the dimension allows; they come from ``H`` (pairs of bank vectors only
    on one side) and ``C`` (a complement of both spans), and are padded from
    A_bank when those run short, which keeps the remaining conflicts on the
    store side.
    """
    cfg = cfg or PlannerConfig()
    a, b = _check_pair(a, b)
    d = a.out_bits
    elem_bytes = elem_bits // 8
    cap_bits = min(cfg.max_vector_bits, cfg.bank.line_bytes * 8)
    vectors = _vector_basis(a, b, _max_vector_log2(elem_bits, cap_bits))
    v = len(vectors)
    vector_bytes = (1 << v) * elem_bytes
    bank_bits = min(max((cfg.bank.line_bytes // vector_bytes).bit_length() - 1, 0), d - v)
    s = d - v - bank_bits
    split = _split_log2(vector_bytes, cfg.bank)

    a_bank = _bank_vectors(a, split, cfg.swizzle_thread_sets)
    b_bank = _bank_vectors(b, split, cfg.swizzle_thread_sets)
    u_basis = independent_subset(vectors + a_bank)
    w_basis = independent_subset(vectors + b_bank)
    only_a = sorted(set(a_bank) - set(b_bank) - set(vectors))
    only_b = sorted(set(b_bank) - set(a_bank) - set(vectors))
    if len(only_a) > len(only_b):
        only_a, only_b = only_b, only_a
    pairs = tuple(e ^ f for e, f in zip(only_a, only_b))
    complement = basis_complement(Basis(d, independent_subset(u_basis + w_basis)))

    # Pad from A_bank first, then unit vectors
    idx = list((pairs + complement)[:s])
    padded = 0
    for candidate in a_bank + tuple(1 << k for k in range(d)):
        if len(idx) == s:
            break
        if not in_span(candidate, vectors + tuple(idx)):
            idx.append(candidate)
            padded += 1
    if padded:
        LOG.info("Bank conflicts are unavoidable: padded %d idx vectors", padded)
    bank = basis_complement(Basis(d, vectors + tuple(idx)))

    layout = LinearLayout.from_columns(
        (DimLabel(VECT, v), DimLabel(BANK, len(bank)), DimLabel(IDX, s)),
        a.out_dims,
        vectors + bank + tuple(idx),
        "swizzled",
    )
    LOG.debug("Swizzle: v=%d b=%d s=%d |H|=%d |C|=%d", v, len(bank), s, len(pairs), len(complement))
    return MemoryLayout(
        layout=layout,
        U=u_basis,
        W=w_basis,
        E=tuple(only_a),
        F=tuple(only_b),
        H=pairs,
        C=complement,
        padded=padded,
        split=split,
    )


def transaction_threads(l: LinearLayout, vector_bytes: int, bank: BankConfig) -> tuple[int, ...]:
    """Nonzero thread columns of one transaction (the low thread bits)."""
    return _bank_vectors(ll_hardware(l), _split_log2(vector_bytes, bank), False)


def predict_wavefronts(
    mem: MemoryLayout | LinearLayout,
    dist: LinearLayout,
    elem_bits: int = DEFAULT_ELEM_BITS,
    bank: BankConfig | None = None,
) -> int:
    """
    Closed-form wavefronts of one vectorised access of ``dist`` into ``mem``.

    Each instruction is split into ``2^split`` transactions over the high
    thread bits, and each transaction needs ``2^c`` wavefronts where ``c``
    is the dimension of span(vect + idx) ∩ span(transaction threads). When
    a vector covers less than one bank the value is only a lower bound.
    """
    bank = bank or BankConfig()
    layout = mem.layout if isinstance(mem, MemoryLayout) else mem
    d = layout.out_bits
    vector_bytes = (1 << layout.in_size(VECT)) * elem_bits // 8
    if vector_bytes < bank.bank_bytes:
        LOG.warning(
            "Vectors of %d bytes cover less than one %d-byte bank: wavefront count is a lower bound",
            vector_bytes,
            bank.bank_bytes,
        )
    memory_span = Basis(d, layout.in_columns(VECT) + layout.in_columns(IDX))
    threads = Basis(d, independent_subset(transaction_threads(dist, vector_bytes, bank)))
    c = span_intersection_dim(memory_span, threads)
    split = min(_split_log2(vector_bytes, bank), ll_hardware(dist).in_size(THREAD))
    return (1 << split) * (1 << c)


def _memory_tile(memory: MemoryLayout, dist: LinearLayout, tile: TilePattern) -> TileMatch | None:
    offsets = ll_merge_out(ll_compose(ll_right_inverse(memory.layout), dist), OFFSET)
    try:
        return match_tile(offsets, tile)
    except TileMismatchError as exc:
        LOG.debug("No vectorised tile for the memory access: %s", exc)
        return None


def _embed_column(tile: LinearLayout, l: LinearLayout, column: int) -> int:
    """Move a tile column into the output coordinates of ``l``."""
    l_out = l.out_offsets()
    value = 0
    for name, (start, size) in tile.out_offsets().items():
        value |= ((column >> start) & ((1 << size) - 1)) << l_out[name][0]
    return value


def match_tile(l: LinearLayout, tile: TilePattern) -> TileMatch:
    """
    Divide ``l`` by an instruction tile, permuting registers when that makes it divisible.

    The permutation is found greedily: tile register column k is matched
    with the lowest unused register column of ``l`` with the same image.

    Raises:
        TileMismatchError: If no register permutation makes ``l`` divisible.
    """
    try:
        return TileMatch(ll_left_divide(l, tile.tile))
    except (DivisionError, LabelMismatchError) as exc:
        first_error = exc
    if REG not in l.in_names:
        raise TileMismatchError(f"{tile.instruction}: {first_error}") from first_error
    regs = list(l.in_columns(REG))
    order = list(range(len(regs)))
    for k, column in enumerate(tile.tile.in_columns(REG)):
        target = _embed_column(tile.tile, l, column)
        match = next((j for j in range(k, len(regs)) if regs[order[j]] == target), None)
        if match is None:
            raise TileMismatchError(
                f"{tile.instruction}: no register holds tile column {k}"
            ) from first_error
        order[k], order[match] = order[match], order[k]
    reg_start = l.in_offsets()[REG][0]
    columns = list(l.columns())
    for k, src in enumerate(order):
        columns[reg_start + k] = regs[src]
    permuted = LinearLayout.from_columns(l.in_dims, l.out_dims, columns, l.name)
    try:
        quotient = ll_left_divide(permuted, tile.tile)
    except (DivisionError, LabelMismatchError) as exc:
        raise TileMismatchError(f"{tile.instruction}: {exc}") from exc
    LOG.debug("Tile %s matched after register permutation %s", tile.instruction, order)
    return TileMatch(quotient, tuple(order))


def plan_gather(l: LinearLayout, axis: int | str) -> GatherPlan:
    """
    Plan a gather along ``axis`` with warp shuffles.

    Feasible when no warp column moves along the axis; then ``2^k`` rounds
    are needed, where ``k`` counts the thread columns moving along it.
    """
    if not ll_is_distributed(l):
        raise PlanError("gather needs a distributed layout")
    l = ll_hardware(l)
    names = l.out_names
    if isinstance(axis, str):
        if axis not in names:
            raise PlanError(f"unknown gather axis {axis!r}")
        axis = names.index(axis)
    if not 0 <= axis < len(names):
        raise PlanError(f"gather axis {axis} out of range for rank {len(names)}")
    start, size = l.out_offsets()[names[axis]]
    axis_rows = ((1 << size) - 1) << start

    def touching(label: str) -> tuple[int, ...]:
        return tuple(k for k, c in enumerate(l.in_columns(label)) if c & axis_rows)

    thread_bits = touching(THREAD)
    if touching(WARP):
        LOG.info("Gather along %s crosses warps; falling back to shared memory", names[axis])
        return GatherPlan(axis, names[axis], False, 0, thread_bits, touching(REG), (), SHARED_MEMORY)
    masks = tuple(1 << k for k in thread_bits)
    lane_xor = tuple(span_element(masks, j) for j in range(1 << len(masks)))
    return GatherPlan(axis, names[axis], True, len(lane_xor), thread_bits, touching(REG), lane_xor)

