"""Tests for the file-backed workspace."""

from __future__ import annotations

import pytest

from linlayout.errors import LayoutError, LayoutParseError, PlanError
from linlayout.layout import format_layout
from linlayout.planner import plan_convert
from linlayout.storage import write_json
from linlayout.workspace import Workspace


class TestWorkspace:
    """Tests for Workspace class."""

    def test_from_files(self, samples_dir):
        workspace = Workspace.from_files(
            [samples_dir / "layout_a.txt", samples_dir / "shuffle_source.txt", samples_dir / "shuffle_target.txt"]
        )
        assert sorted(workspace.layouts) == ["A", "source", "target"]
        assert workspace.sources["A"] == samples_dir / "layout_a.txt"

    def test_duplicate_name(self, samples_dir):
        workspace = Workspace()
        workspace.load_layouts(samples_dir / "layout_a.txt")
        with pytest.raises(LayoutError, match="already defined"):
            workspace.load_layouts(samples_dir / "layout_a.txt")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# nothing here\n", encoding="utf-8")
        with pytest.raises(LayoutParseError, match="no layouts found"):
            Workspace().load_layouts(path)

    def test_parse_error_names_the_file(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("layout x in(reg:1) out(i:1)\nreg: (1) (1)\n", encoding="utf-8")
        with pytest.raises(LayoutParseError, match=r"bad\.txt: line 2"):
            Workspace().load_layouts(path)

    def test_single(self, tmp_path, layout_a):
        path = tmp_path / "two.txt"
        path.write_text(format_layout(layout_a, "A") + format_layout(layout_a, "B"), encoding="utf-8")
        with pytest.raises(LayoutParseError, match="expected one layout, found 2"):
            Workspace().single(path)

    def test_get(self, samples_dir, layout_a):
        workspace = Workspace.from_files([samples_dir / "layout_a.txt"])
        assert workspace.get("A") == layout_a
        with pytest.raises(LayoutError, match="unknown layout"):
            workspace.get("B")

    def test_load_plan(self, tmp_path, shuffle_pair):
        plan = plan_convert(*shuffle_pair)
        path = tmp_path / "plan.json"
        write_json(path, plan.to_dict())
        workspace = Workspace()
        assert workspace.load_plan(path) == plan
        assert path in workspace.plans

    def test_load_plan_rejects_other_documents(self, tmp_path):
        path = tmp_path / "report.json"
        write_json(path, {"schema": "linlayout.report/1"})
        with pytest.raises(PlanError):
            Workspace().load_plan(path)

    def test_load_graph(self, samples_dir):
        path = samples_dir / "scale_broadcast.graph"
        workspace = Workspace()
        graph = workspace.load_graph(path)
        assert workspace.graphs[path] is graph
        assert len(graph.nodes) == 6
