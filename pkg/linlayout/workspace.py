"""Named layouts, graphs and plans loaded from files for the command line."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from linlayout.errors import LayoutError, LayoutParseError
from linlayout.layout import LinearLayout, parse_layouts
from linlayout.planner import ConversionPlan
from linlayout.shapeops import OpGraph, parse_graph
from linlayout.storage import read_json

LOG = logging.getLogger(__name__)


def _read_text(path: Path) -> str:
    return path.read_text(encoding="utf-8")


@dataclass
class Workspace:
    """
    Layouts by name, plus the graphs and plans read alongside them.

    Attributes:
        layouts: Layouts by name; names are unique across every loaded file.
        sources: File each layout came from.
        graphs: Op graphs by file path.
        plans: Conversion plans by file path.
    """

    layouts: dict[str, LinearLayout] = field(default_factory=dict)
    sources: dict[str, Path] = field(default_factory=dict)
    graphs: dict[Path, OpGraph] = field(default_factory=dict)
    plans: dict[Path, ConversionPlan] = field(default_factory=dict)

    def add(self, layout: LinearLayout, source: Path) -> None:
        """
        Register one layout.

        Raises:
            LayoutError: If the name is already taken.
        """
        name = layout.name
        if name in self.layouts:
            raise LayoutError(
                f"layout {name!r} in {source} is already defined in {self.sources[name]}"
            )
        self.layouts[name] = layout
        self.sources[name] = source

    def load_layouts(self, path: Path) -> list[LinearLayout]:
        """
        Parse every layout of a file.

        Raises:
            LayoutParseError: With the file name and line number on malformed text.
            LayoutError: If a name repeats.
        """
        try:
            layouts = parse_layouts(_read_text(path))
        except LayoutParseError as exc:
            raise LayoutParseError(f"{path}: {exc}") from exc
        if not layouts:
            raise LayoutParseError(f"{path}: no layouts found")
        for layout in layouts:
            self.add(layout, path)
        LOG.debug("Loaded %d layouts from %s", len(layouts), path)
        return layouts

    def load_graph(self, path: Path) -> OpGraph:
        try:
            graph = parse_graph(_read_text(path))
        except LayoutParseError as exc:
            raise LayoutParseError(f"{path}: {exc}") from exc
        self.graphs[path] = graph
        return graph

    def load_plan(self, path: Path) -> ConversionPlan:
        """
        Read a plan document.

        Raises:
            PlanError: If the document is not a plan.
            ValueError: If the file is not JSON.
        """
        plan = ConversionPlan.from_dict(read_json(path))
        self.plans[path] = plan
        return plan

    def single(self, path: Path) -> LinearLayout:
        """
        Load a file holding exactly one layout.

        Raises:
            LayoutParseError: If the file holds zero or several layouts.
        """
        layouts = self.load_layouts(path)
        if len(layouts) != 1:
            raise LayoutParseError(f"{path}: expected one layout, found {len(layouts)}")
        return layouts[0]

    def get(self, name: str) -> LinearLayout:
        if name not in self.layouts:
            raise LayoutError(f"unknown layout {name!r}")
        return self.layouts[name]

    @classmethod
    def from_files(cls, paths: Iterable[Path]) -> Workspace:
        workspace = cls()
        for path in paths:
            workspace.load_layouts(path)
        return workspace
