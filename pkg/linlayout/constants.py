"""Constants used throughout the linlayout package."""

from __future__ import annotations

# Matrix Limits
MAX_BITS = 64
"""Largest number of rows or columns of a bit matrix (layouts address at most 2^64 elements)."""

MIN_WEIGHT_SEARCH_BITS = 10
"""Null-space dimension up to which the min-weight solver enumerates all solutions."""

APPLY_MANY_MAX_BITS = 62
"""Largest input/output width accepted by the vectorised evaluator (int64 lanes)."""

# Dimension Labels
REG = "reg"
THREAD = "thread"
WARP = "warp"
HARDWARE_DIMS = (REG, THREAD, WARP)
"""Input labels of a distributed layout, lowest bits first."""

OFFSET = "offset"
VECT = "vect"
BANK = "bank"
IDX = "idx"
MEMORY_DIMS = frozenset({OFFSET, VECT, BANK, IDX})
"""Input labels accepted for memory layouts."""

DEFAULT_DIM_NAMES = ("i", "j", "k", "l", "m", "n")
"""Tensor dimension names by position; longer ranks fall back to d<pos>."""

# Shared Memory Bank Model
DEFAULT_BANKS = 32
DEFAULT_BANK_BYTES = 4
"""Default bank geometry: 32 banks of 4 bytes, one 128-byte wavefront."""

TOY_BANKS = 4
TOY_BANK_BYTES = 4
"""Four banks of four bytes, the geometry used to draw small conflict examples."""

# Vectorisation
DEFAULT_SHUFFLE_BITS = 32
"""Payload of one warp shuffle instruction in bits."""

DEFAULT_MAX_VECTOR_BITS = 128
"""Widest vectorised global or shared memory access in bits."""

DEFAULT_ELEM_BITS = 16
SUPPORTED_ELEM_BITS = (8, 16, 32, 64)

MMA_BITWIDTHS = (8, 16, 32)
"""Element widths with a defined mma register tile."""

# Serialization
PLAN_SCHEMA = "linlayout.plan/1"
REPORT_SCHEMA = "linlayout.report/1"
PROPAGATION_SCHEMA = "linlayout.propagation/1"

# Default CLI Arguments
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_LAYOUT_NAME = "layout"
MAX_REPORTED_MISMATCHES = 16
"""Number of mismatches printed by `check`; the JSON report keeps all of them."""

# Environment Variables
ENV_BANKS = "LINLAYOUT_BANKS"
ENV_SHUFFLE_BITS = "LINLAYOUT_SHUFFLE_BITS"
ENV_MAX_VECTOR_BITS = "LINLAYOUT_MAX_VECTOR_BITS"

# Minimum Values for Configuration Validation
MIN_BANKS = 1
MIN_BANK_BYTES = 1
MIN_SHUFFLE_BITS = 8
MIN_VECTOR_BITS = 8
