"""Tests for labelled linear layouts."""

from __future__ import annotations

import pytest
from hypothesis import given

from linlayout.constructors import BlockedSpec, blocked, identity_tile, unswizzled
from linlayout.errors import (
    LabelMismatchError,
    LayoutError,
    LayoutParseError,
    NotSurjectiveError,
)
from linlayout.layout import (
    DimLabel,
    LinearLayout,
    dims,
    format_layout,
    format_matrix,
    ll_apply,
    ll_broadcast_mask,
    ll_compose,
    ll_contiguous_log2,
    ll_empty,
    ll_hardware,
    ll_is_distributed,
    ll_is_injective,
    ll_is_invertible,
    ll_is_memory,
    ll_is_surjective,
    ll_left_divide,
    ll_merge_out,
    ll_product,
    ll_relabel,
    ll_reorder_in,
    ll_reorder_out,
    ll_reshape_out,
    ll_right_inverse,
    ll_slice,
    ll_vector_bits,
    parse_layout,
    parse_layouts,
    vector_instruction,
)

from strategies import distributed_layouts

# (i, j) -> (reg, thread, warp) for the top-left corner of layout A.
LAYOUT_A_ROWS = [
    ((0, 0), (0, 0, 0)),
    ((0, 1), (1, 0, 0)),
    ((0, 2), (0, 1, 0)),
    ((0, 3), (1, 1, 0)),
    ((1, 0), (2, 0, 0)),
    ((1, 1), (3, 0, 0)),
    ((2, 2), (0, 9, 0)),
    ((2, 3), (1, 9, 0)),
    ((3, 2), (2, 9, 0)),
    ((3, 3), (3, 9, 0)),
    ((8, 0), (0, 0, 1)),
    ((15, 15), (3, 31, 1)),
]


def _with_zero_reg(layout: LinearLayout) -> LinearLayout:
    reg = layout.in_columns("reg") + (0,)
    rest = layout.in_columns("thread") + layout.in_columns("warp")
    in_dims = (DimLabel("reg", len(reg)),) + layout.in_dims[1:]
    return LinearLayout.from_columns(in_dims, layout.out_dims, reg + rest)


class TestDimLabel:
    """Tests for DimLabel."""

    def test_size(self):
        assert DimLabel("reg", 3).size == 8
        assert str(DimLabel("warp", 0)) == "warp:0"

    def test_invalid_name(self):
        with pytest.raises(LayoutError, match="invalid dimension name"):
            DimLabel("2x", 1)

    def test_negative_size(self):
        with pytest.raises(LayoutError, match="negative size"):
            DimLabel("reg", -1)

    def test_duplicate_names(self):
        with pytest.raises(LayoutError, match="duplicate input"):
            LinearLayout.from_columns(dims([("reg", 1), ("reg", 1)]), dims([("i", 2)]), [1, 2])

    def test_matrix_must_match_labels(self):
        with pytest.raises(LayoutError, match="does not match"):
            LinearLayout.from_columns(dims([("reg", 1)]), dims([("i", 2)]), [1, 2])


class TestApply:
    """Tests for ll_apply function."""

    @pytest.mark.parametrize("location, hardware", LAYOUT_A_ROWS)
    def test_layout_a_rows(self, layout_a, location, hardware):
        reg, thread, warp = hardware
        point = ll_apply(layout_a, {"reg": reg, "thread": thread, "warp": warp})
        assert (point["i"], point["j"]) == location

    def test_missing_coordinates_are_zero(self, layout_a):
        assert ll_apply(layout_a, {"reg": 2}) == {"i": 1, "j": 0}

    def test_out_of_range(self, layout_a):
        with pytest.raises(LayoutError, match="out of range"):
            ll_apply(layout_a, {"reg": 4})

    def test_unknown_label(self, layout_a):
        with pytest.raises(LayoutError, match="unknown input dimension"):
            ll_apply(layout_a, {"lane": 0})

    def test_flattened_index_is_row_major(self, layout_a):
        for hw in range(1 << layout_a.in_bits):
            point = ll_apply(layout_a, layout_a.split_in(hw))
            assert layout_a.matrix.apply(hw) == point["i"] * 16 + point["j"]

    @given(distributed_layouts())
    def test_broadcast_bits_do_not_move_the_point(self, layout):
        for label in layout.in_dims:
            mask = ll_broadcast_mask(layout, label.name)
            for k in range(label.size_log2):
                if mask >> k & 1:
                    assert ll_apply(layout, {label.name: 1 << k}) == ll_apply(layout, {})


class TestCompose:
    """Tests for ll_compose function."""

    def test_identity_on_the_left(self, layout_a):
        identity = LinearLayout.from_columns(
            layout_a.out_bit_order, layout_a.out_dims, [1 << k for k in range(layout_a.out_bits)]
        )
        assert ll_compose(identity, layout_a) == layout_a

    def test_right_inverse_composes_to_identity(self, layout_a):
        inverse = ll_right_inverse(layout_a)
        assert ll_compose(layout_a, inverse).matrix.columns() == tuple(1 << k for k in range(8))
        assert ll_compose(inverse, layout_a).matrix.columns() == tuple(1 << k for k in range(8))

    def test_label_mismatch(self, layout_a):
        with pytest.raises(LabelMismatchError, match="cannot compose"):
            ll_compose(layout_a, layout_a)


class TestProduct:
    """Tests for ll_product function."""

    def test_shared_labels_stack(self):
        layout = ll_product(identity_tile(1, "reg", "j"), identity_tile(1, "reg", "i"))
        assert layout.in_dims == (DimLabel("reg", 2),)
        assert layout.out_names == ("i", "j")
        assert ll_apply(layout, {"reg": 1}) == {"i": 0, "j": 1}
        assert ll_apply(layout, {"reg": 2}) == {"i": 1, "j": 0}

    def test_empty_is_the_unit(self, layout_a):
        assert ll_product(layout_a, ll_empty()) == layout_a
        assert ll_product(ll_empty(), layout_a) == layout_a

    def test_blocked_as_product_of_identities(self, layout_a):
        layout = ll_empty()
        for label, name, bits in [
            ("reg", "j", 1), ("reg", "i", 1),
            ("thread", "j", 3), ("thread", "i", 2),
            ("warp", "i", 1),
        ]:
            layout = ll_product(layout, identity_tile(bits, label, name))
        assert layout == layout_a

    def test_distributed_factors_stay_distributed(self, layout_a):
        extra = identity_tile(2, "warp", "k")
        assert ll_is_distributed(ll_product(layout_a, extra))


class TestRightInverse:
    """Tests for ll_right_inverse function."""

    def test_swaps_labels(self, layout_a):
        inverse = ll_right_inverse(layout_a)
        assert inverse.in_dims == layout_a.out_bit_order
        assert inverse.out_dims == tuple(reversed(layout_a.in_dims))

    def test_not_surjective(self):
        layout = LinearLayout.from_columns(dims([("reg", 1)]), dims([("i", 2)]), [1])
        with pytest.raises(NotSurjectiveError):
            ll_right_inverse(layout)


class TestSlice:
    """Tests for ll_slice function."""

    def test_drops_rows(self, layout_a):
        sliced = ll_slice(layout_a, "i")
        assert sliced.out_dims == (DimLabel("j", 4),)
        assert sliced.matrix.shape == (4, 8)
        assert sliced.matrix.bits.tolist() == layout_a.matrix.bits[:4].tolist()

    def test_zero_columns_mark_dropped_bits(self, layout_a):
        sliced = ll_slice(layout_a, "i")
        assert ll_broadcast_mask(sliced, "thread") == 0b11000
        assert ll_broadcast_mask(sliced, "warp") == 0b1

    def test_last_dimension(self):
        layout = identity_tile(2, "reg", "i")
        sliced = ll_slice(layout, "i")
        assert sliced.out_dims == ()
        assert sliced.matrix.shape == (0, 2)

    def test_unknown_dimension(self, layout_a):
        with pytest.raises(LayoutError, match="unknown output dimension"):
            ll_slice(layout_a, "k")

    def test_lost_rank(self):
        layout = LinearLayout.from_columns(dims([("reg", 1)]), dims([("i", 1), ("j", 1)]), [0b10])
        with pytest.raises(NotSurjectiveError, match="non-surjective"):
            ll_slice(layout, "i")


class TestReorder:
    """Tests for the relabel, reorder and reshape functions."""

    def test_reorder_out_transposes(self, layout_a):
        transposed = ll_reorder_out(layout_a, ("j", "i"))
        point = ll_apply(transposed, {"reg": 1, "thread": 9})
        assert point == {"j": 3, "i": 2}
        assert transposed.out_names == ("j", "i")

    def test_reorder_in(self, layout_a):
        reordered = ll_reorder_in(layout_a, ("warp", "reg", "thread"))
        assert reordered.in_columns("reg") == layout_a.in_columns("reg")
        assert ll_hardware(reordered) == layout_a

    def test_reorder_needs_every_name(self, layout_a):
        with pytest.raises(LabelMismatchError):
            ll_reorder_in(layout_a, ("reg", "thread"))

    def test_relabel_keeps_matrix(self, layout_a):
        renamed = ll_relabel(layout_a, {"thread": "lane"}, {"i": "m", "j": "n"})
        assert renamed.in_names == ("reg", "lane", "warp")
        assert renamed.out_names == ("m", "n")
        assert renamed.matrix == layout_a.matrix
        assert ll_apply(renamed, {"lane": 9}) == {"m": 2, "n": 2}

    def test_hardware_pads_missing_labels(self):
        layout = ll_hardware(identity_tile(2, "thread", "i"))
        assert layout.in_dims == (DimLabel("reg", 0), DimLabel("thread", 2), DimLabel("warp", 0))

    def test_hardware_rejects_memory_labels(self):
        with pytest.raises(LabelMismatchError):
            ll_hardware(identity_tile(2, "offset", "i"))

    def test_merge_out(self, layout_a):
        merged = ll_merge_out(layout_a)
        assert merged.out_dims == (DimLabel("offset", 8),)
        assert merged.matrix == layout_a.matrix

    def test_reshape_checks_bits(self, layout_a):
        with pytest.raises(LayoutError, match="cannot reshape"):
            ll_reshape_out(layout_a, (DimLabel("i", 7),))


class TestLeftDivide:
    """Tests for ll_left_divide function."""

    def test_divides_register_tile(self, layout_a):
        quotient = ll_left_divide(layout_a, identity_tile(1, "reg", "j"))
        assert quotient.in_size("reg") == 1
        assert quotient.out_shape == (16, 8)

    def test_not_block_diagonal(self, layout_a):
        with pytest.raises(LayoutError):
            ll_left_divide(layout_a, identity_tile(1, "reg", "i"))


class TestPredicates:
    """Tests for the layout predicates."""

    def test_layout_a(self, layout_a):
        assert ll_is_distributed(layout_a)
        assert ll_is_surjective(layout_a)
        assert ll_is_injective(layout_a)
        assert ll_is_invertible(layout_a)
        assert not ll_is_memory(layout_a)

    def test_repeated_column_is_not_distributed(self):
        layout = LinearLayout.from_columns(dims([("reg", 1), ("thread", 2)]), dims([("i", 2)]), [1, 1, 2])
        assert not ll_is_distributed(layout)

    def test_weight_two_column_is_not_distributed(self):
        layout = LinearLayout.from_columns(dims([("reg", 2)]), dims([("i", 2)]), [3, 1])
        assert not ll_is_distributed(layout)

    def test_broadcast_is_distributed(self, layout_a):
        assert ll_is_distributed(_with_zero_reg(layout_a))
        assert not ll_is_injective(_with_zero_reg(layout_a))

    def test_memory_layouts(self):
        assert ll_is_memory(unswizzled((2, 3), (1, 0)))
        rank_deficient = LinearLayout.from_columns(dims([("offset", 2)]), dims([("i", 2)]), [1, 1])
        assert not ll_is_memory(rank_deficient)


class TestBroadcastMask:
    """Tests for ll_broadcast_mask function."""

    def test_no_zero_columns(self, layout_a):
        assert ll_broadcast_mask(layout_a, "reg") == 0

    def test_appended_zero_register(self, layout_a):
        assert ll_broadcast_mask(_with_zero_reg(layout_a), "reg") == 0b100

    def test_fully_broadcast_warps(self):
        layout = LinearLayout.from_columns(dims([("thread", 2), ("warp", 2)]), dims([("i", 2)]), [1, 2, 0, 0])
        assert ll_broadcast_mask(layout, "warp") == 0b11

    def test_unknown_label(self, layout_a):
        with pytest.raises(LayoutError, match="unknown input dimension"):
            ll_broadcast_mask(layout_a, "lane")


class TestContiguity:
    """Tests for ll_contiguous_log2 and ll_vector_bits functions."""

    def test_layout_a(self, layout_a):
        assert ll_contiguous_log2(layout_a) == 1
        assert ll_vector_bits(layout_a, 16) == 32

    def test_column_major_single_element(self):
        spec = BlockedSpec.from_counts((32, 32), (1, 1), (32, 1), (1, 32), (0, 1))
        assert ll_contiguous_log2(blocked(spec)) == 0

    @pytest.mark.parametrize(
        "cols, size_per_thread",
        [(2, (8, 2)), (4, (4, 4)), (8, (2, 8)), (16, (1, 16))],
    )
    @pytest.mark.parametrize("elem_bits, elements", [(8, 16), (16, 8)])
    def test_wide_rows_reach_128_bits(self, cols, size_per_thread, elem_bits, elements):
        rows_per_thread = size_per_thread[0]
        warps = 512 // (rows_per_thread * 32)
        spec = BlockedSpec.from_counts((512, cols), size_per_thread, (32, 1), (warps, 1), (1, 0))
        layout = blocked(spec)
        assert ll_contiguous_log2(layout) == 4
        assert ll_vector_bits(layout, elem_bits) == 128
        assert ll_vector_bits(layout, elem_bits) // elem_bits == elements

    @pytest.mark.parametrize("elem_bits, expected", [(8, 32), (16, 64)])
    def test_single_column(self, elem_bits, expected):
        spec = BlockedSpec.from_counts((512, 1), (4, 1), (32, 1), (4, 1), (1, 0))
        assert ll_vector_bits(blocked(spec), elem_bits) == expected

    def test_instruction_names(self):
        assert vector_instruction(128) == "v4.b32"
        assert vector_instruction(64) == "v2.b32"
        assert vector_instruction(16) == "b16"


class TestTextForm:
    """Tests for format_layout, format_matrix and parse_layouts functions."""

    def test_format_layout_a(self, layout_a):
        assert format_layout(layout_a) == (
            "layout A in(reg:2,thread:5,warp:1) out(i:4,j:4)\n"
            "reg: (0,1) (1,0)\n"
            "thread: (0,2) (0,4) (0,8) (2,0) (4,0)\n"
            "warp: (8,0)\n"
        )

    def test_zero_columns_and_empty_labels(self):
        layout = LinearLayout.from_columns(dims([("reg", 1), ("warp", 0)]), dims([("i", 1)]), [0])
        text = format_layout(layout, "z")
        assert text == "layout z in(reg:1,warp:0) out(i:1)\nreg: 0\nwarp:\n"
        assert parse_layout(text) == layout

    def test_format_matrix_rows(self, layout_a):
        lines = format_matrix(layout_a).splitlines()
        assert len(lines) == 9
        assert lines[1].startswith("j0")
        assert lines[-1].startswith("i3")

    @given(distributed_layouts())
    def test_round_trip(self, layout):
        assert parse_layout(format_layout(layout, "L")) == layout

    def test_several_layouts_and_comments(self, layout_a):
        text = "# two layouts\n" + format_layout(layout_a, "A") + "\n" + format_layout(layout_a, "B")
        layouts = parse_layouts(text)
        assert [l.name for l in layouts] == ["A", "B"]

    def test_missing_label_line(self):
        with pytest.raises(LayoutParseError, match="missing lines for thread"):
            parse_layout("layout x in(reg:1,thread:1) out(i:2)\nreg: (1)\n")

    def test_wrong_image_count(self):
        with pytest.raises(LayoutParseError, match="line 2"):
            parse_layout("layout x in(reg:2) out(i:2)\nreg: (1)\n")

    def test_coordinate_out_of_range(self):
        with pytest.raises(LayoutParseError):
            parse_layout("layout x in(reg:1) out(i:1)\nreg: (2)\n")

    def test_text_before_header(self):
        with pytest.raises(LayoutParseError, match="expected a 'layout' header"):
            parse_layout("reg: (1)\n")

    def test_blocked_matches_sample(self, layout_a):
        spec = BlockedSpec.from_counts((16, 16), (2, 2), (4, 8), (2, 1), (1, 0))
        assert blocked(spec) == layout_a
