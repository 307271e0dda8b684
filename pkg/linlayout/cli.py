"""Command-line interface and argument parsing."""

from __future__ import annotations

import argparse
import logging
import os
from pathlib import Path
from typing import Sequence

from linlayout.config import BankConfig, PlannerConfig
from linlayout.constants import (
    DEFAULT_BANK_BYTES,
    DEFAULT_BANKS,
    DEFAULT_ELEM_BITS,
    DEFAULT_LOG_LEVEL,
    DEFAULT_MAX_VECTOR_BITS,
    DEFAULT_SHUFFLE_BITS,
    ENV_BANKS,
    ENV_MAX_VECTOR_BITS,
    ENV_SHUFFLE_BITS,
    MMA_BITWIDTHS,
    SUPPORTED_ELEM_BITS,
)
from linlayout.errors import LayoutError
from linlayout.utils import parse_int_list


def int_list(value: str) -> tuple[int, ...]:
    """
    argparse type for comma-separated integers.

    Examples:
        >>> int_list("16,16")
        (16, 16)
    """
    try:
        return parse_int_list(value)
    except LayoutError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def name_list(value: str) -> tuple[str, ...]:
    """
    argparse type for comma-separated dimension names.

    Examples:
        >>> name_list("m, k")
        ('m', 'k')
    """
    return tuple(part.strip() for part in value.split(",") if part.strip())


def bank_geometry(value: str) -> BankConfig:
    """argparse type for ``<banks>x<bytes>``."""
    try:
        return BankConfig.parse(value)
    except LayoutError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--log-level",
        default=DEFAULT_LOG_LEVEL,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help=f"Logging level (default: {DEFAULT_LOG_LEVEL})",
    )


def _add_planner(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("hardware model")
    group.add_argument(
        "--banks",
        type=bank_geometry,
        default=os.getenv(ENV_BANKS, f"{DEFAULT_BANKS}x{DEFAULT_BANK_BYTES}"),
        help=f"Shared memory banks as <banks>x<bytes> (default: {DEFAULT_BANKS}x{DEFAULT_BANK_BYTES})",
    )
    group.add_argument(
        "--shuffle-bits",
        type=int,
        default=int(os.getenv(ENV_SHUFFLE_BITS, str(DEFAULT_SHUFFLE_BITS))),
        help=f"Payload of one warp shuffle in bits (default: {DEFAULT_SHUFFLE_BITS})",
    )
    group.add_argument(
        "--max-vector-bits",
        type=int,
        default=int(os.getenv(ENV_MAX_VECTOR_BITS, str(DEFAULT_MAX_VECTOR_BITS))),
        help=f"Widest shared memory access in bits (default: {DEFAULT_MAX_VECTOR_BITS})",
    )
    group.add_argument(
        "--swizzle-thread-sets",
        action="store_true",
        help="Choose swizzle bank vectors from every thread bit",
    )


def _add_elem_bits(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--elem-bits",
        type=int,
        default=DEFAULT_ELEM_BITS,
        choices=SUPPORTED_ELEM_BITS,
        help=f"Element width in bits (default: {DEFAULT_ELEM_BITS})",
    )


def _add_build(subparsers: argparse._SubParsersAction) -> None:
    build = subparsers.add_parser("build", help="Construct a layout and print it")
    kinds = build.add_subparsers(dest="layout_kind", required=True)

    blocked = kinds.add_parser("blocked", help="Blocked distributed layout")
    blocked.add_argument("--shape", type=int_list, required=True, help="Tensor shape, e.g. 16,16")
    blocked.add_argument("--reg", type=int_list, required=True, help="Elements per thread per dim")
    blocked.add_argument("--threads", type=int_list, required=True, help="Threads per warp per dim")
    blocked.add_argument("--warps", type=int_list, required=True, help="Warps per CTA per dim")
    blocked.add_argument("--order", type=int_list, required=True, help="Dims fastest first")

    mma = kinds.add_parser("mma", help="Matrix-multiply operand or accumulator tile")
    mma.add_argument("--kind", dest="mma_kind", default="mma", choices=["mma", "wgmma"])
    mma.add_argument("--operand", default="out", choices=["lhs", "rhs", "out"])
    mma.add_argument("--bitwidth", type=int, default=16, choices=MMA_BITWIDTHS)
    mma.add_argument("--warps", type=int_list, default=(1, 1), help="Extra warps per dim (default: 1,1)")
    mma.add_argument("--order", type=int_list, default=(1, 0), help="Warp order, fastest first")

    swizzle = kinds.add_parser("swizzle", help="mma swizzled shared memory layout")
    swizzle.add_argument("--m", type=int, required=True, help="Row bits")
    swizzle.add_argument("--n", type=int, required=True, help="Column bits")
    swizzle.add_argument("--vec", type=int, default=1)
    swizzle.add_argument("--per-phase", type=int, default=1)
    swizzle.add_argument("--max-phase", type=int, default=1)

    plain = kinds.add_parser("unswizzled", help="Row-major shared memory layout")
    plain.add_argument("--shape", type=int_list, required=True, help="Tensor shape, e.g. 32,32")
    plain.add_argument("--order", type=int_list, default=None, help="Dims fastest first")

    for parser in (blocked, mma, swizzle, plain):
        parser.add_argument("--names", type=name_list, default=(), help="Tensor dim names, e.g. m,k")
        parser.add_argument("--name", default=None, help="Name printed in the layout header")
        parser.add_argument("--no-matrix", action="store_true", help="Skip the bit matrix")
        _add_common(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linlayout",
        description="Build, analyse and convert linear tensor layouts.",
        epilog=f"Environment variables: {ENV_BANKS}, {ENV_SHUFFLE_BITS}, {ENV_MAX_VECTOR_BITS}",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_build(subparsers)

    convert = subparsers.add_parser("convert", help="Plan a conversion between two layouts")
    convert.add_argument("source", type=Path, help="Layout file of the source layout")
    convert.add_argument("target", type=Path, help="Layout file of the target layout")
    convert.add_argument("--emit", type=Path, default=None, help="Write the plan as JSON")
    _add_elem_bits(convert)
    _add_planner(convert)
    _add_common(convert)

    check = subparsers.add_parser("check", help="Simulate a plan and verify it")
    check.add_argument("plan", type=Path, help="Plan JSON written by convert --emit")
    check.add_argument("--trace", type=Path, default=None, help="Write rounds and transactions as JSONL")
    check.add_argument("--report", type=Path, default=None, help="Write the report as JSON")
    _add_common(check)

    props = subparsers.add_parser("props", help="Print properties of a layout")
    props.add_argument("layout", type=Path, help="Layout file")
    _add_elem_bits(props)
    props.add_argument(
        "--max-vector-bits",
        type=int,
        default=int(os.getenv(ENV_MAX_VECTOR_BITS, str(DEFAULT_MAX_VECTOR_BITS))),
        help=f"Widest access in bits (default: {DEFAULT_MAX_VECTOR_BITS})",
    )
    _add_common(props)

    propagate = subparsers.add_parser("propagate", help="Assign layouts across an op graph")
    propagate.add_argument("graph", type=Path, help="Op graph file")
    propagate.add_argument(
        "--layouts", type=Path, nargs="+", required=True, help="Layout files with the anchor layouts"
    )
    propagate.add_argument(
        "--no-rematerialize",
        action="store_true",
        help="Insert conversions instead of recomputing shared producer chains",
    )
    propagate.add_argument("--emit", type=Path, default=None, help="Write the result as JSON")
    _add_common(propagate)
    return parser


def _input_files(args: argparse.Namespace) -> list[Path]:
    paths: list[Path] = []
    for attr in ("source", "target", "plan", "layout", "graph"):
        value = getattr(args, attr, None)
        if value is not None:
            paths.append(value)
    paths.extend(getattr(args, "layouts", None) or [])
    return paths


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """
    Parse command-line arguments and environment variables.

    Hardware defaults come from LINLAYOUT_BANKS, LINLAYOUT_SHUFFLE_BITS and
    LINLAYOUT_MAX_VECTOR_BITS; flags take precedence. Missing input files
    are usage errors.

    Args:
        argv: Command-line arguments (default: sys.argv).

    Returns:
        Parsed namespace with ``command`` set.
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(message)s",
    )

    # Input files must exist
    for path in _input_files(args):
        if not path.is_file():
            parser.error(f"no such file: {path}")
    return args


def planner_config(args: argparse.Namespace) -> PlannerConfig:
    """PlannerConfig from parsed convert arguments."""
    return PlannerConfig(
        bank=args.banks,
        shuffle_bits=args.shuffle_bits,
        max_vector_bits=args.max_vector_bits,
        swizzle_thread_sets=args.swizzle_thread_sets,
    )
