"""Subcommand implementations behind the ``linlayout`` entry point."""

from __future__ import annotations

import argparse
import logging
from typing import Callable, Sequence

from linlayout.cli import parse_args, planner_config
from linlayout.constants import HARDWARE_DIMS
from linlayout.constructors import (
    BlockedSpec,
    MmaSpec,
    SwizzleSpec,
    blocked,
    mma_swizzle,
    mma_tile,
    unswizzled,
)
from linlayout.errors import LayoutError, SimulationError
from linlayout.layout import (
    LinearLayout,
    format_layout,
    format_matrix,
    ll_broadcast_mask,
    ll_contiguous_log2,
    ll_is_distributed,
    ll_is_injective,
    ll_is_memory,
    ll_is_surjective,
    ll_vector_bits,
    vector_instruction,
)
from linlayout.planner import ConversionPlan, plan_convert
from linlayout.shapeops import propagate
from linlayout.simulator import SimReport, sim_convert
from linlayout.storage import JsonlWriter, write_json
from linlayout.utils import format_bits, log2_exact
from linlayout.workspace import Workspace

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def build_layout(args: argparse.Namespace) -> LinearLayout:
    """Run the constructor selected by ``build <kind>``."""
    names = tuple(args.names)
    if args.layout_kind == "blocked":
        spec = BlockedSpec.from_counts(args.shape, args.reg, args.threads, args.warps, args.order, names)
        return blocked(spec)
    if args.layout_kind == "mma":
        warps = tuple(log2_exact(n, "warps") for n in args.warps)
        extra = {"names": names} if names else {}
        spec = MmaSpec(args.mma_kind, args.operand, args.bitwidth, warps, tuple(args.order), **extra)
        return mma_tile(spec)
    if args.layout_kind == "swizzle":
        spec = SwizzleSpec(args.m, args.n, args.vec, args.per_phase, args.max_phase)
        return mma_swizzle(spec, names)
    shape = tuple(log2_exact(n, "shape") for n in args.shape)
    order = args.order if args.order is not None else tuple(reversed(range(len(shape))))
    return unswizzled(shape, order, names)


def cmd_build(args: argparse.Namespace) -> int:
    layout = build_layout(args)
    print(format_layout(layout, args.name), end="")
    if not args.no_matrix:
        print()
        print(format_matrix(layout), end="")
    return EXIT_OK


def describe_plan(plan: ConversionPlan) -> list[str]:
    """Human-readable summary of a plan, one ``key=value`` per line."""
    d = plan.a.out_bits
    lines = [f"kind={plan.kind}"]
    if plan.reason:
        lines.append(f"reason={plan.reason}")
    if plan.register_map is not None:
        lines.append("permutation=" + ",".join(map(str, plan.register_map.permutation())))
    if plan.shuffle is not None:
        shuffle = plan.shuffle
        for key in ("V", "I", "E", "F", "G", "R"):
            lines.append(f"{key}=" + " ".join(format_bits(v, d) for v in getattr(shuffle, key)))
        lines.append("span=" + " ".join(format_bits(v, d) for v in shuffle.exchange_span()))
    if plan.memory is not None:
        memory = plan.memory
        for key in ("vect", "bank", "idx"):
            lines.append(f"{key}=" + " ".join(format_bits(v, d) for v in getattr(memory, key)))
        lines.append(f"conflict_free_idx={memory.achieved}")
    for key, value in plan.stats.to_dict().items():
        lines.append(f"{key}={value}")
    return lines


def cmd_convert(args: argparse.Namespace) -> int:
    source = Workspace().single(args.source)
    target = Workspace().single(args.target)
    plan = plan_convert(source, target, args.elem_bits, planner_config(args))
    print("\n".join(describe_plan(plan)))
    if args.emit is not None:
        write_json(args.emit, plan.to_dict())
        LOG.info("Wrote %s plan to %s", plan.kind, args.emit)
    return EXIT_OK


def describe_report(report: SimReport) -> list[str]:
    lines = [f"correct={_yes(report.correct)}"]
    for key in ("kind", "shuffle_rounds", "read_wavefronts", "write_wavefronts", "smem_bytes"):
        lines.append(f"{key}={getattr(report, key)}")
    if not report.correct:
        lines.append(f"mismatches={report.mismatch_count}")
        for m in report.mismatches:
            lines.append(
                f"  warp={m['warp']} thread={m['thread']} reg={m['reg']} "
                f"expected={m['expected']} got={m['got']}"
            )
    return lines


def cmd_check(args: argparse.Namespace) -> int:
    plan = Workspace().load_plan(args.plan)
    if args.trace is not None:
        with JsonlWriter(args.trace) as trace:
            report = sim_convert(plan, trace)
        LOG.info("Wrote %d trace records to %s", trace.count, trace.path)
    else:
        report = sim_convert(plan)
    print("\n".join(describe_report(report)))
    if args.report is not None:
        write_json(args.report, report.to_dict())
    return EXIT_OK if report.correct else EXIT_FAILURE


def layout_properties(
    layout: LinearLayout, elem_bits: int, max_vector_bits: int
) -> dict[str, str]:
    """Properties printed by ``props``, in output order."""
    props = {
        "name": layout.name,
        "shape": "x".join(map(str, layout.out_shape)) or "scalar",
        "distributed": _yes(ll_is_distributed(layout)),
        "memory": _yes(ll_is_memory(layout)),
        "surjective": _yes(ll_is_surjective(layout)),
        "injective": _yes(ll_is_injective(layout)),
    }
    if ll_is_surjective(layout) and "reg" in layout.in_names:
        k = ll_contiguous_log2(layout)
        vector_bits = ll_vector_bits(layout, elem_bits, max_vector_bits)
        props["contiguous"] = str(1 << k)
        props["vector_bits"] = str(vector_bits)
        props["instruction"] = vector_instruction(vector_bits)
    for label in layout.in_dims:
        if label.name in HARDWARE_DIMS:
            mask = ll_broadcast_mask(layout, label.name)
            props[f"broadcast_{label.name}"] = format_bits(mask, label.size_log2) or "-"
    return props


def cmd_props(args: argparse.Namespace) -> int:
    layout = Workspace().single(args.layout)
    for key, value in layout_properties(layout, args.elem_bits, args.max_vector_bits).items():
        print(f"{key}={value}")
    return EXIT_OK


def cmd_propagate(args: argparse.Namespace) -> int:
    workspace = Workspace.from_files(args.layouts)
    graph = workspace.load_graph(args.graph)
    result = propagate(graph, workspace.layouts, rematerialize=not args.no_rematerialize)
    anchors = {name: workspace.get(name) for name in graph.anchors.values()}
    document = result.to_document(anchors)
    for node in graph.nodes:
        print(f"%{node.id} = {node.op} -> {document['values'][f'%{node.id}']}")
    for conversion in document["conversions"]:
        print(f"convert {conversion['value']} for {conversion['consumer']}: {conversion['from']} -> {conversion['to']}")
    for remat in document["rematerialized"]:
        print(f"rematerialize {remat['value']} for {remat['consumer']} in {remat['layout']}")
    print(f"conversions={len(document['conversions'])}")
    if args.emit is not None:
        write_json(args.emit, document)
        LOG.info("Wrote propagation result to %s", args.emit)
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "build": cmd_build,
    "convert": cmd_convert,
    "check": cmd_check,
    "props": cmd_props,
    "propagate": cmd_propagate,
}


def main(argv: Sequence[str] | None = None) -> int:
    """
    Main entry point for the linlayout command line.

    Args:
        argv: Command-line arguments (default: sys.argv).

    Returns:
        Exit code: 0 for success, 1 for failed checks or invalid input.
    """
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (LayoutError, SimulationError, ValueError) as exc:
        LOG.error("%s: %s", args.command, exc)
        return EXIT_FAILURE
