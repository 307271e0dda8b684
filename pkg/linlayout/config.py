"""Configuration data structures for the layout planner."""

from __future__ import annotations

from dataclasses import dataclass, field

from linlayout.constants import (
    DEFAULT_BANK_BYTES,
    DEFAULT_BANKS,
    DEFAULT_MAX_VECTOR_BITS,
    DEFAULT_SHUFFLE_BITS,
    MIN_BANK_BYTES,
    MIN_BANKS,
    MIN_SHUFFLE_BITS,
    MIN_VECTOR_BITS,
)
from linlayout.errors import LayoutSpecError
from linlayout.utils import log2_exact


@dataclass(frozen=True)
class BankConfig:
    """
    Shared memory bank geometry.

    Attributes:
        banks: Number of banks serviced in one wavefront.
        bank_bytes: Width of one bank in bytes.
    """

    banks: int = DEFAULT_BANKS
    bank_bytes: int = DEFAULT_BANK_BYTES

    def __post_init__(self) -> None:
        if self.banks < MIN_BANKS or self.bank_bytes < MIN_BANK_BYTES:
            raise LayoutSpecError(
                f"bank geometry must be positive, got {self.banks}x{self.bank_bytes}"
            )
        log2_exact(self.banks, "banks")
        log2_exact(self.bank_bytes, "bank_bytes")

    @property
    def line_bytes(self) -> int:
        """Bytes covered by one wavefront (banks * bank_bytes)."""
        return self.banks * self.bank_bytes

    @classmethod
    def parse(cls, value: str) -> BankConfig:
        """
        Parse "<banks>x<bank_bytes>", e.g. "32x4".

        Raises:
            LayoutSpecError: If the text is malformed or not powers of two.
        """
        parts = value.lower().split("x")
        if len(parts) != 2:
            raise LayoutSpecError(f"bank geometry must look like 32x4, got {value!r}")
        try:
            banks, bank_bytes = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise LayoutSpecError(f"bank geometry must look like 32x4, got {value!r}") from exc
        return cls(banks=banks, bank_bytes=bank_bytes)

    def __str__(self) -> str:
        return f"{self.banks}x{self.bank_bytes}"


@dataclass(frozen=True)
class PlannerConfig:
    """
    Hardware parameters consulted while planning conversions.

    Attributes:
        bank: Shared memory bank geometry.
        shuffle_bits: Payload width of one warp shuffle.
        max_vector_bits: Widest vectorised shared memory access.
        swizzle_thread_sets: Use every thread bit when choosing bank vectors,
            instead of only the threads that share one transaction.
    """

    bank: BankConfig = field(default_factory=BankConfig)
    shuffle_bits: int = DEFAULT_SHUFFLE_BITS
    max_vector_bits: int = DEFAULT_MAX_VECTOR_BITS
    swizzle_thread_sets: bool = False

    def __post_init__(self) -> None:
        if self.shuffle_bits < MIN_SHUFFLE_BITS:
            raise LayoutSpecError(f"shuffle_bits must be >= {MIN_SHUFFLE_BITS}")
        if self.max_vector_bits < MIN_VECTOR_BITS:
            raise LayoutSpecError(f"max_vector_bits must be >= {MIN_VECTOR_BITS}")
        log2_exact(self.shuffle_bits, "shuffle_bits")
        log2_exact(self.max_vector_bits, "max_vector_bits")
