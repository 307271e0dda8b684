"""Tests for JSON and JSONL writers."""

from __future__ import annotations

import json

import pytest

from linlayout.storage import JsonlWriter, read_json, write_json


class TestWriteJson:
    """Tests for write_json and read_json functions."""

    def test_round_trip_keeps_key_order(self, tmp_path):
        path = tmp_path / "nested" / "plan.json"
        write_json(path, {"schema": "x", "kind": "noop", "stats": {"rounds": 0}})
        data = read_json(path)
        assert list(data) == ["schema", "kind", "stats"]
        assert data["stats"] == {"rounds": 0}

    def test_read_rejects_non_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ValueError, match="expected a JSON object"):
            read_json(path)


class TestJsonlWriter:
    """Tests for JsonlWriter class."""

    def test_writes_one_record_per_line(self, tmp_path):
        path = tmp_path / "out" / "trace.jsonl"
        with JsonlWriter(path) as writer:
            writer.write({"round": 0, "src_lane": [1, 0]})
            writer.write({"round": 1, "src_lane": [0, 1]})
            assert writer.count == 2
        lines = path.read_text(encoding="utf-8").splitlines()
        assert [json.loads(line)["round"] for line in lines] == [0, 1]

    def test_truncates_existing_file(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        path.write_text('{"old": true}\n', encoding="utf-8")
        with JsonlWriter(path) as writer:
            writer.write({"new": True})
        assert path.read_text(encoding="utf-8") == '{"new": true}\n'

    def test_path_property(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        writer = JsonlWriter(path)
        writer.close()
        assert writer.path == path
