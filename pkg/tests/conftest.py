from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from linlayout.layout import DimLabel, LinearLayout, parse_layout  # noqa: E402

from strategies import hardware_layout  # noqa: E402

SAMPLES = ROOT / "samples"


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture
def layout_a() -> LinearLayout:
    """16x16 blocked layout with 2x2 registers, 4x8 threads and 2x1 warps."""
    return parse_layout((SAMPLES / "layout_a.txt").read_text(encoding="utf-8"))


@pytest.fixture
def shuffle_pair() -> tuple[LinearLayout, LinearLayout]:
    """Eight elements over four threads; element bits 0 and 2 trade places."""
    source = parse_layout((SAMPLES / "shuffle_source.txt").read_text(encoding="utf-8"))
    target = parse_layout((SAMPLES / "shuffle_target.txt").read_text(encoding="utf-8"))
    return source, target


@pytest.fixture
def broadcast_pair() -> tuple[LinearLayout, LinearLayout]:
    """Eight elements over eight threads; thread bit 2 duplicates in both, bits 0 and 1 swap."""
    dims = (DimLabel("i", 1), DimLabel("j", 2))
    return hardware_layout(dims, [1], [2, 4, 0], []), hardware_layout(dims, [1], [4, 2, 0], [])
