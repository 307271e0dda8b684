"""
Layout transfer through shape operations and anchor-based propagation.

Every transfer keeps the operation a per-lane no-op: each (reg, thread,
warp) slot holds the same logical value before and after the op, up to
the register relabelling the op defines (broadcast may duplicate
registers, join and split move the operand selector into register bit 0).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from linlayout.constants import PROPAGATION_SCHEMA, REG, THREAD, WARP
from linlayout.constructors import default_dim_names
from linlayout.errors import (
    LayoutError,
    LayoutParseError,
    NotInImageError,
    PropagationError,
    ShapeOpError,
    UnreachableValueError,
)
from linlayout.layout import (
    DimLabel,
    LinearLayout,
    format_layout,
    ll_contiguous_log2,
    ll_hardware,
    ll_is_distributed,
)
from linlayout.utils import log2_exact

LOG = logging.getLogger(__name__)

SHAPE_KINDS = ("trans", "reshape", "join", "split", "expand_dims", "broadcast")
SOURCE_KINDS = frozenset({"load", "const", "arange", "splat"})
# Sources cheap enough to recompute in any layout
REMAT_SOURCE_KINDS = frozenset({"const", "arange", "splat"})
ELEMENTWISE_KINDS = frozenset(
    {
        "add", "sub", "mul", "div", "rem", "max", "min", "neg", "abs", "exp", "log",
        "sqrt", "and", "or", "xor", "cmp", "select", "cast", "bitcast", "fma",
    }
)


def shape_dims(shape: Sequence[int]) -> tuple[DimLabel, ...]:
    """Output labels for a tensor shape given in elements, positional names."""
    names = default_dim_names(len(shape))
    return tuple(DimLabel(name, log2_exact(size, "tensor size")) for name, size in zip(names, shape))


@dataclass(frozen=True)
class ShapeOp:
    """
    A shape operation with its operand and result shapes (in elements).

    Attributes:
        kind: One of trans, reshape, join, split, expand_dims, broadcast.
        in_shape: Operand shape.
        out_shape: Result shape.
        perm: Result dim k is operand dim perm[k] (trans only).
        axis: Inserted dimension (expand_dims only).
    """

    kind: str
    in_shape: tuple[int, ...]
    out_shape: tuple[int, ...]
    perm: tuple[int, ...] = ()
    axis: int = 0

    def __post_init__(self) -> None:
        if self.kind not in SHAPE_KINDS:
            raise ShapeOpError(f"unknown shape op {self.kind!r}")
        for size in self.in_shape + self.out_shape:
            try:
                log2_exact(size, "tensor size")
            except LayoutError as exc:
                raise ShapeOpError(str(exc)) from exc
        validate = getattr(self, f"_validate_{self.kind}")
        validate()

    def _mismatch(self, detail: str) -> ShapeOpError:
        return ShapeOpError(
            f"{self.kind}: {list(self.in_shape)} -> {list(self.out_shape)} {detail}"
        )

    def _validate_trans(self) -> None:
        if sorted(self.perm) != list(range(len(self.in_shape))):
            raise self._mismatch(f"perm {list(self.perm)} is not a permutation")
        if self.out_shape != tuple(self.in_shape[p] for p in self.perm):
            raise self._mismatch(f"does not match perm {list(self.perm)}")

    def _validate_reshape(self) -> None:
        if _numel(self.in_shape) != _numel(self.out_shape):
            raise self._mismatch("changes the number of elements")

    def _validate_expand_dims(self) -> None:
        expected = self.in_shape[: self.axis] + (1,) + self.in_shape[self.axis :]
        if not 0 <= self.axis <= len(self.in_shape) or self.out_shape != expected:
            raise self._mismatch(f"is not expand_dims at axis {self.axis}")

    def _validate_broadcast(self) -> None:
        if len(self.in_shape) != len(self.out_shape) or any(
            a != b and a != 1 for a, b in zip(self.in_shape, self.out_shape)
        ):
            raise self._mismatch("only size-1 dims may grow")

    def _validate_join(self) -> None:
        if self.out_shape != self.in_shape + (2,):
            raise self._mismatch("join appends a dimension of size 2")

    def _validate_split(self) -> None:
        if not self.in_shape or self.in_shape[-1] != 2 or self.out_shape != self.in_shape[:-1]:
            raise self._mismatch("split removes a last dimension of size 2")


def _numel(shape: Sequence[int]) -> int:
    total = 1
    for size in shape:
        total *= size
    return total


def trans_op(in_shape: Sequence[int], perm: Sequence[int]) -> ShapeOp:
    in_shape, perm = tuple(in_shape), tuple(perm)
    if sorted(perm) != list(range(len(in_shape))):
        raise ShapeOpError(f"trans: perm {list(perm)} is not a permutation of {len(in_shape)} dims")
    return ShapeOp("trans", in_shape, tuple(in_shape[p] for p in perm), perm=perm)


def reshape_op(in_shape: Sequence[int], out_shape: Sequence[int]) -> ShapeOp:
    return ShapeOp("reshape", tuple(in_shape), tuple(out_shape))


def expand_dims_op(in_shape: Sequence[int], axis: int) -> ShapeOp:
    in_shape = tuple(in_shape)
    return ShapeOp("expand_dims", in_shape, in_shape[:axis] + (1,) + in_shape[axis:], axis=axis)


def broadcast_op(in_shape: Sequence[int], out_shape: Sequence[int]) -> ShapeOp:
    return ShapeOp("broadcast", tuple(in_shape), tuple(out_shape))


def join_op(in_shape: Sequence[int]) -> ShapeOp:
    return ShapeOp("join", tuple(in_shape), tuple(in_shape) + (2,))


def split_op(in_shape: Sequence[int]) -> ShapeOp:
    return ShapeOp("split", tuple(in_shape), tuple(in_shape)[:-1])


def inverse_op(op: ShapeOp) -> ShapeOp:
    """The shape op undoing ``op``."""
    if op.kind == "trans":
        inverse = [0] * len(op.perm)
        for k, p in enumerate(op.perm):
            inverse[p] = k
        return trans_op(op.out_shape, inverse)
    if op.kind == "join":
        return split_op(op.out_shape)
    if op.kind == "split":
        return join_op(op.out_shape)
    if op.kind == "broadcast":
        raise ShapeOpError("broadcast has no inverse shape op")
    return ShapeOp("reshape", op.out_shape, op.in_shape)


# Transfer functions


def _hardware(l: LinearLayout, shape: Sequence[int], what: str) -> LinearLayout:
    """Check a distributed layout over ``shape`` and order its inputs reg, thread, warp."""
    if not ll_is_distributed(l):
        raise ShapeOpError(f"{what} layout must be distributed")
    if l.out_shape != tuple(shape):
        raise ShapeOpError(f"{what} layout covers {list(l.out_shape)}, expected {list(shape)}")
    return ll_hardware(l)


def _coords(l: LinearLayout, value: int) -> list[int]:
    point = l.split_out(value)
    return [point[label.name] for label in l.out_dims]


def _pack(out_dims: tuple[DimLabel, ...], coords: Sequence[int]) -> int:
    value = 0
    shift = 0
    for label, coord in zip(reversed(out_dims), reversed(list(coords))):
        value |= coord << shift
        shift += label.size_log2
    return value


def _rebuild(out_shape: Sequence[int], columns: dict[str, list[int]]) -> LinearLayout:
    in_dims = tuple(DimLabel(name, len(columns[name])) for name in (REG, THREAD, WARP))
    flat = columns[REG] + columns[THREAD] + columns[WARP]
    return LinearLayout.from_columns(in_dims, shape_dims(out_shape), flat)


def _hw_columns(l: LinearLayout) -> dict[str, list[int]]:
    return {name: list(l.in_columns(name)) for name in (REG, THREAD, WARP)}


def _forward_trans(op: ShapeOp, l: LinearLayout) -> LinearLayout:
    out_dims = shape_dims(op.out_shape)
    columns = {
        name: [
            _pack(out_dims, [_coords(l, c)[p] for p in op.perm]) if c else 0 for c in cols
        ]
        for name, cols in _hw_columns(l).items()
    }
    return _rebuild(op.out_shape, columns)


def _forward_broadcast(op: ShapeOp, l: LinearLayout) -> LinearLayout:
    out_dims = shape_dims(op.out_shape)
    columns = {
        name: [_pack(out_dims, _coords(l, c)) if c else 0 for c in cols]
        for name, cols in _hw_columns(l).items()
    }
    new_bits: list[int] = []
    shift = 0
    for d in reversed(range(len(op.out_shape))):
        bits = out_dims[d].size_log2
        if op.in_shape[d] == 1:
            new_bits.extend(1 << (shift + k) for k in range(bits))
        shift += bits
    pending = iter(new_bits)
    remaining = len(new_bits)
    for name in (THREAD, WARP):
        for k, column in enumerate(columns[name]):
            if remaining and column == 0:
                columns[name][k] = next(pending)
                remaining -= 1
    columns[REG].extend(pending)
    return _rebuild(op.out_shape, columns)


def _forward_join(op: ShapeOp, l: LinearLayout) -> LinearLayout:
    columns = {name: [c << 1 for c in cols] for name, cols in _hw_columns(l).items()}
    columns[REG].insert(0, 1)
    return _rebuild(op.out_shape, columns)


def _forward_split(op: ShapeOp, l: LinearLayout, error: type[ShapeOpError]) -> LinearLayout:
    columns = _hw_columns(l)
    if not columns[REG] or columns[REG][0] != 1:
        raise error("split needs register bit 0 to select the last dimension")
    columns[REG].pop(0)
    columns = {name: [c >> 1 for c in cols] for name, cols in columns.items()}
    return _rebuild(op.out_shape, columns)


def transfer_forward(op: ShapeOp, l_in: LinearLayout) -> LinearLayout:
    """
    Layout of the result of ``op`` such that the op moves no data.

    Raises:
        ShapeOpError: If the layout is not distributed over ``op.in_shape``.
    """
    l = _hardware(l_in, op.in_shape, "operand")
    if op.kind == "trans":
        return _forward_trans(op, l)
    if op.kind == "broadcast":
        return _forward_broadcast(op, l)
    if op.kind == "join":
        return _forward_join(op, l)
    if op.kind == "split":
        return _forward_split(op, l, ShapeOpError)
    return _rebuild(op.out_shape, _hw_columns(l))


def _backward_broadcast(op: ShapeOp, l: LinearLayout) -> LinearLayout:
    in_dims = shape_dims(op.in_shape)
    broadcast_rows = 0
    shift = 0
    for d in reversed(range(len(op.out_shape))):
        bits = l.out_dims[d].size_log2
        if op.in_shape[d] == 1:
            broadcast_rows |= ((1 << bits) - 1) << shift
        shift += bits

    def drop(column: int) -> int:
        coords = _coords(l, column & ~broadcast_rows)
        return _pack(in_dims, [0 if op.in_shape[d] == 1 else c for d, c in enumerate(coords)])

    columns = _hw_columns(l)
    regs = columns[REG]
    while regs and regs[-1] and not regs[-1] & ~broadcast_rows:
        regs.pop()
    columns = {name: [drop(c) for c in cols] for name, cols in columns.items()}
    return _rebuild(op.in_shape, columns)


def transfer_backward(op: ShapeOp, l_out: LinearLayout, strict: bool = True) -> LinearLayout:
    """
    Operand layout for which ``op`` produces ``l_out`` without moving data.

    With ``strict`` the result satisfies
    ``transfer_forward(op, result) == l_out``; otherwise any operand layout
    keeping the op a per-lane no-op is returned (broadcasts may then keep
    duplicated registers of ``l_out`` as zero columns).

    Raises:
        NotInImageError: If ``strict`` and ``l_out`` is not produced by the forward transfer.
    """
    l = _hardware(l_out, op.out_shape, "result")
    if op.kind == "broadcast":
        candidate = _backward_broadcast(op, l)
    elif op.kind == "join":
        candidate = _forward_split(split_op(op.out_shape), l, NotInImageError)
    elif op.kind == "split":
        candidate = _forward_join(join_op(op.out_shape), l)
    elif op.kind == "trans":
        candidate = _forward_trans(inverse_op(op), l)
    else:
        candidate = _rebuild(op.in_shape, _hw_columns(l))
    if strict and transfer_forward(op, candidate) != _rebuild(op.out_shape, _hw_columns(l)):
        raise NotInImageError(f"layout is not the {op.kind} image of any operand layout")
    return candidate


# Op graphs


@dataclass(frozen=True)
class OpNode:
    """
    One value-producing op of a graph.

    Attributes:
        id: Value number (``%id``).
        op: Op name.
        args: Operand value numbers.
        shape: Result shape in elements.
        attrs: Extra ``key=value`` attributes, e.g. ``perm`` or ``axis``.
    """

    id: int
    op: str
    args: tuple[int, ...]
    shape: tuple[int, ...]
    attrs: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class OpGraph:
    """Nodes in definition order plus anchor bindings (value id -> layout name)."""

    nodes: tuple[OpNode, ...] = ()
    anchors: Mapping[int, str] = field(default_factory=dict)

    def node(self, value_id: int) -> OpNode:
        for node in self.nodes:
            if node.id == value_id:
                return node
        raise PropagationError(f"unknown value %{value_id}")

    def users(self, value_id: int) -> list[OpNode]:
        return [node for node in self.nodes if value_id in node.args]


_NODE_RE = re.compile(r"^%(\d+)\s*=\s*(\w+)\s*\((.*?)\)\s*(.*)$")
_ANCHOR_RE = re.compile(r"^anchor\s+%(\d+)\s+(\S+)$")
_ATTR_RE = re.compile(r"(\w+)=(\[[^\]]*\]|\S+)")


def _int_list(text: str, line_no: int) -> tuple[int, ...]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise LayoutParseError(f"expected [..], got {text!r}", line_no)
    try:
        return tuple(int(x) for x in body[1:-1].split(",") if x.strip())
    except ValueError as exc:
        raise LayoutParseError(f"non-integer entry in {text!r}", line_no) from exc


def parse_graph(text: str) -> OpGraph:
    """
    Parse an op graph.

    One op per line, ``%id = op(%a, %b) key=value shape=[...]``, and
    ``anchor %id <layout-name>`` lines. Operands must be defined earlier,
    so graphs are acyclic by construction.
    """
    nodes: list[OpNode] = []
    anchors: dict[int, str] = {}
    defined: set[int] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        anchor = _ANCHOR_RE.match(line)
        if anchor:
            value_id = int(anchor.group(1))
            if value_id not in defined:
                raise LayoutParseError(f"anchor on undefined value %{value_id}", line_no)
            anchors[value_id] = anchor.group(2)
            continue
        match = _NODE_RE.match(line)
        if not match:
            raise LayoutParseError(f"cannot parse {line!r}", line_no)
        value_id = int(match.group(1))
        if value_id in defined:
            raise LayoutParseError(f"value %{value_id} defined twice", line_no)
        args: list[int] = []
        for arg in match.group(3).split(","):
            arg = arg.strip()
            if not arg:
                continue
            if not re.fullmatch(r"%\d+", arg):
                raise LayoutParseError(f"bad operand {arg!r}", line_no)
            if int(arg[1:]) not in defined:
                raise LayoutParseError(f"operand {arg} used before definition", line_no)
            args.append(int(arg[1:]))
        attrs = dict(_ATTR_RE.findall(match.group(4)))
        if "shape" not in attrs:
            raise LayoutParseError(f"value %{value_id} has no shape=[...]", line_no)
        shape = _int_list(attrs.pop("shape"), line_no)
        nodes.append(OpNode(value_id, match.group(2), tuple(args), shape, attrs))
        defined.add(value_id)
    return OpGraph(tuple(nodes), anchors)


def node_shape_op(graph: OpGraph, node: OpNode) -> ShapeOp:
    """Build the ShapeOp a shape node applies to its (first) operand."""
    arity = 2 if node.op == "join" else 1
    if len(node.args) != arity:
        raise PropagationError(f"%{node.id} = {node.op} expects {arity} operand(s)")
    in_shape = graph.node(node.args[0]).shape
    try:
        if node.op == "trans":
            perm = _int_list(node.attrs.get("perm", "[]"), 0)
            return trans_op(in_shape, perm)
        if node.op == "expand_dims":
            return expand_dims_op(in_shape, int(node.attrs.get("axis", "0")))
        if node.op == "join":
            if graph.node(node.args[1]).shape != in_shape:
                raise ShapeOpError("join operands have different shapes")
            return join_op(in_shape)
        if node.op == "split":
            return split_op(in_shape)
        if node.op == "broadcast":
            return broadcast_op(in_shape, node.shape)
        return reshape_op(in_shape, node.shape)
    except (LayoutError, ValueError) as exc:
        raise PropagationError(f"%{node.id} = {node.op}: {exc}") from exc


@dataclass(frozen=True)
class Conversion:
    """A layout conversion inserted on operand ``value`` of ``consumer``."""

    value: int
    consumer: int
    source: LinearLayout
    target: LinearLayout


@dataclass(frozen=True)
class Rematerialization:
    """The chain producing ``value`` recomputed directly in ``layout`` for ``consumer``."""

    value: int
    consumer: int
    layout: LinearLayout


@dataclass(frozen=True)
class PropagationResult:
    values: Mapping[int, LinearLayout]
    conversions: tuple[Conversion, ...] = ()
    rematerialized: tuple[Rematerialization, ...] = ()

    def to_document(self, anchor_names: Mapping[str, LinearLayout] | None = None) -> dict:
        """Structured document: value ids to layout names, the layouts, and inserted conversions."""
        names: dict[LinearLayout, str] = {}
        for name, layout in (anchor_names or {}).items():
            names.setdefault(layout, name)

        def name_of(layout: LinearLayout, value_id: int) -> str:
            if layout not in names:
                names[layout] = f"v{value_id}"
            return names[layout]

        values = {f"%{vid}": name_of(l, vid) for vid, l in sorted(self.values.items())}
        conversions = [
            {
                "value": f"%{c.value}",
                "consumer": f"%{c.consumer}",
                "from": name_of(c.source, c.value),
                "to": name_of(c.target, c.consumer),
            }
            for c in self.conversions
        ]
        remat = [
            {"value": f"%{r.value}", "consumer": f"%{r.consumer}", "layout": name_of(r.layout, r.value)}
            for r in self.rematerialized
        ]
        used = set(values.values()) | {c["from"] for c in conversions} | {c["to"] for c in conversions}
        used |= {r["layout"] for r in remat}
        layouts = {
            name: format_layout(layout, name)
            for layout, name in names.items()
            if name in used
        }
        return {
            "schema": PROPAGATION_SCHEMA,
            "values": values,
            "layouts": dict(sorted(layouts.items())),
            "conversions": conversions,
            "rematerialized": remat,
        }


def _required_operand(graph: OpGraph, consumer: OpNode, layout: LinearLayout) -> LinearLayout | None:
    """Layout an operand needs so that ``consumer`` runs in ``layout`` without data movement."""
    if consumer.op in SHAPE_KINDS:
        op = node_shape_op(graph, consumer)
        try:
            return transfer_backward(op, layout, strict=False)
        except LayoutError as exc:
            raise PropagationError(f"%{consumer.id} = {consumer.op}: {exc}") from exc
    if consumer.op in ELEMENTWISE_KINDS:
        return layout
    return None


def _cheap_chain(
    graph: OpGraph, anchored: Mapping[int, LinearLayout], value_id: int, layout: LinearLayout
) -> bool:
    """Whether the chain defining ``value_id`` can be recomputed in ``layout`` without data movement."""
    node = graph.node(value_id)
    if node.op in REMAT_SOURCE_KINDS:
        return True
    if node.id in anchored or (node.op not in ELEMENTWISE_KINDS and node.op not in SHAPE_KINDS):
        return False
    try:
        needed = _required_operand(graph, node, layout)
    except PropagationError:
        return False
    return needed is not None and all(
        _cheap_chain(graph, anchored, arg, needed) for arg in dict.fromkeys(node.args)
    )


def propagate(
    graph: OpGraph,
    layouts: Mapping[str, LinearLayout],
    rematerialize: bool = True,
) -> PropagationResult:
    """
    Assign a layout to every value of ``graph``.

    The forward pass pushes anchor layouts along uses. A multi-operand op
    whose operands disagree takes the operand layout with the highest
    contiguity (ties: lowest operand id) and a conversion is inserted on
    the other operands. The backward pass gives unanchored producer chains
    the layout their consumers need. A chain needed in several layouts is
    rematerialized per consumer when ``rematerialize`` is set; otherwise
    one conversion per extra layout is inserted. With ``rematerialize`` set,
    the backward pass also replaces a forward conversion by recomputing the
    operand chain in the target layout when that chain holds only shape
    ops, elementwise ops and constant-like sources.

    Raises:
        PropagationError: For unknown anchors, shape-incompatible anchors
            or opaque ops without an anchor.
        UnreachableValueError: If no anchor reaches some value.
    """
    anchored: dict[int, LinearLayout] = {}
    for value_id, name in graph.anchors.items():
        if name not in layouts:
            raise PropagationError(f"anchor %{value_id} names unknown layout {name!r}")
        layout = layouts[name]
        node = graph.node(value_id)
        if layout.out_shape != node.shape or not ll_is_distributed(layout):
            raise PropagationError(
                f"anchor layout {name} over {list(layout.out_shape)} does not fit "
                f"%{value_id} of shape {list(node.shape)}"
            )
        anchored[value_id] = layout

    assigned: dict[int, LinearLayout] = {}
    conversions: list[Conversion] = []
    remat: list[Rematerialization] = []

    # Forward from anchors
    for node in graph.nodes:
        kind = node.op
        if kind not in SOURCE_KINDS | ELEMENTWISE_KINDS and kind not in SHAPE_KINDS:
            if node.id not in anchored:
                raise PropagationError(f"%{node.id} = {kind} is not a shape or elementwise op and has no anchor")
        # Shape params are checked on anchored nodes too
        if kind in SHAPE_KINDS:
            node_shape_op(graph, node)
        if node.id in anchored:
            layout = anchored[node.id]
        elif kind in SHAPE_KINDS and node.args[0] in assigned:
            op = node_shape_op(graph, node)
            try:
                layout = transfer_forward(op, assigned[node.args[0]])
            except LayoutError as exc:
                raise PropagationError(f"%{node.id} = {kind}: {exc}") from exc
        elif kind in ELEMENTWISE_KINDS:
            candidates = [(a, assigned[a]) for a in node.args if a in assigned]
            if not candidates:
                continue
            layout = max(candidates, key=lambda c: (ll_contiguous_log2(c[1]), -c[0]))[1]
        else:
            continue
        assigned[node.id] = layout
        LOG.debug("Forward: %%%d = %s assigned", node.id, kind)
        for arg in dict.fromkeys(node.args):
            if arg not in assigned:
                continue
            needed = _required_operand(graph, node, layout)
            if needed is not None and needed != assigned[arg]:
                conversions.append(Conversion(arg, node.id, assigned[arg], needed))
                LOG.info("Inserted conversion on %%%d for %%%d", arg, node.id)

    # Backward to unanchored producers
    for node in reversed(graph.nodes):
        if node.id in assigned:
            continue
        needs: list[tuple[int, LinearLayout]] = []
        for user in graph.users(node.id):
            if user.id not in assigned:
                continue
            needed = _required_operand(graph, user, assigned[user.id])
            if needed is not None:
                needs.append((user.id, needed))
        if not needs:
            continue
        layout = needs[0][1]
        assigned[node.id] = layout
        for user_id, needed in needs[1:]:
            if needed == layout:
                continue
            if rematerialize:
                remat.append(Rematerialization(node.id, user_id, needed))
                LOG.info("Rematerializing the chain of %%%d for %%%d", node.id, user_id)
            else:
                conversions.append(Conversion(node.id, user_id, layout, needed))
                LOG.info("Inserted conversion on %%%d for %%%d", node.id, user_id)

    # Cheap chains recomputed in place of forward conversions
    if rematerialize:
        kept: list[Conversion] = []
        for conversion in conversions:
            if _cheap_chain(graph, anchored, conversion.value, conversion.target):
                remat.append(Rematerialization(conversion.value, conversion.consumer, conversion.target))
                LOG.info(
                    "Dropped conversion on %%%d for %%%d, chain rematerialized",
                    conversion.value,
                    conversion.consumer,
                )
            else:
                kept.append(conversion)
        conversions = kept

    for node in graph.nodes:
        if node.id not in assigned:
            raise UnreachableValueError(f"no anchor layout reaches %{node.id}", node.id)
    return PropagationResult(dict(assigned), tuple(conversions), tuple(remat))
