"""Shared helpers for bit manipulation and argument parsing."""

from __future__ import annotations

from typing import Iterator

from linlayout.errors import LayoutSpecError


def parse_int_list(value: str) -> tuple[int, ...]:
    """
    Parse a comma-separated list of integers.

    Whitespace around items is ignored and empty items are skipped.

    Args:
        value: Text such as "16,16" or "1, 0".

    Returns:
        Tuple of parsed integers.

    Raises:
        LayoutSpecError: If an item is not an integer.

    Examples:
        >>> parse_int_list("16,16")
        (16, 16)
        >>> parse_int_list(" 1, 0 ")
        (1, 0)
        >>> parse_int_list("")
        ()
    """
    items: list[int] = []
    for part in value.split(","):
        trimmed = part.strip()
        if not trimmed:
            continue
        try:
            items.append(int(trimmed))
        except ValueError as exc:
            raise LayoutSpecError(f"expected an integer, got {trimmed!r}") from exc
    return tuple(items)


def log2_exact(value: int, what: str = "value") -> int:
    """
    Return log2 of a positive power of two.

    Args:
        value: The number to convert.
        what: Name used in the error message.

    Returns:
        The exponent k with 2^k == value.

    Raises:
        LayoutSpecError: If value is not a positive power of two.

    Examples:
        >>> log2_exact(32)
        5
        >>> log2_exact(1)
        0
    """
    if value < 1 or value & (value - 1):
        raise LayoutSpecError(f"{what} must be a positive power of two, got {value}")
    return value.bit_length() - 1


def popcount(value: int) -> int:
    """
    Count the set bits of a non-negative integer.

    Examples:
        >>> popcount(0b1011)
        3
    """
    return bin(value).count("1")


def iter_bits(value: int) -> Iterator[int]:
    """
    Yield the positions of the set bits of value, lowest first.

    Examples:
        >>> list(iter_bits(0b10110))
        [1, 2, 4]
    """
    pos = 0
    while value:
        if value & 1:
            yield pos
        value >>= 1
        pos += 1


def format_bits(value: int, length: int) -> str:
    """
    Render an integer as an LSB-first bit string.

    Character i of the result is bit i of value, so "101" is 5 and "100" is 1.

    Args:
        value: Non-negative integer below 2^length.
        length: Number of characters to emit.

    Returns:
        String of '0'/'1' characters.

    Examples:
        >>> format_bits(5, 3)
        '101'
        >>> format_bits(1, 3)
        '100'
        >>> format_bits(0, 0)
        ''
    """
    return "".join("1" if (value >> i) & 1 else "0" for i in range(length))


def parse_bits(text: str) -> int:
    """
    Parse an LSB-first bit string produced by format_bits.

    Raises:
        LayoutSpecError: If the text contains characters other than 0 and 1.

    Examples:
        >>> parse_bits("101")
        5
        >>> parse_bits("010")
        2
    """
    value = 0
    for i, char in enumerate(text):
        if char == "1":
            value |= 1 << i
        elif char != "0":
            raise LayoutSpecError(f"invalid bit string {text!r}")
    return value
