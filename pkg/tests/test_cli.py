"""Tests for CLI argument parsing and the subcommands."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from linlayout.cli import parse_args, planner_config
from linlayout.commands import main
from linlayout.config import BankConfig


class TestParseArgs:
    """Tests for parse_args function."""

    def test_parse_convert_defaults(self, samples_dir):
        source = samples_dir / "shuffle_source.txt"
        target = samples_dir / "shuffle_target.txt"
        args = parse_args(["convert", str(source), str(target)])
        assert args.command == "convert"
        assert args.source == source
        assert args.elem_bits == 16
        assert args.banks == BankConfig(32, 4)
        assert args.shuffle_bits == 32
        assert args.max_vector_bits == 128
        assert args.swizzle_thread_sets is False
        assert args.emit is None

    def test_parse_banks_from_environment(self, monkeypatch, samples_dir):
        monkeypatch.setenv("LINLAYOUT_BANKS", "4x4")
        path = str(samples_dir / "layout_a.txt")
        args = parse_args(["convert", path, path])
        assert planner_config(args).bank == BankConfig(4, 4)

    def test_flag_overrides_environment(self, monkeypatch, samples_dir):
        monkeypatch.setenv("LINLAYOUT_SHUFFLE_BITS", "64")
        path = str(samples_dir / "layout_a.txt")
        assert parse_args(["convert", path, path]).shuffle_bits == 64
        assert parse_args(["convert", path, path, "--shuffle-bits", "16"]).shuffle_bits == 16

    def test_parse_bad_bank_geometry(self, samples_dir):
        path = str(samples_dir / "layout_a.txt")
        with pytest.raises(SystemExit) as excinfo:
            parse_args(["convert", path, path, "--banks", "3x4"])
        assert excinfo.value.code == 2

    def test_parse_missing_file(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            parse_args(["props", str(tmp_path / "missing.txt")])
        assert excinfo.value.code == 2

    def test_parse_unsupported_elem_bits(self, samples_dir):
        with pytest.raises(SystemExit):
            parse_args(["props", str(samples_dir / "layout_a.txt"), "--elem-bits", "12"])

    def test_parse_build_blocked(self):
        args = parse_args(
            ["build", "blocked", "--shape", "16,16", "--reg", "2,2", "--threads", "4,8",
             "--warps", "2,1", "--order", "1,0", "--names", "m,k"]
        )
        assert args.layout_kind == "blocked"
        assert args.shape == (16, 16)
        assert args.names == ("m", "k")

    def test_parse_propagate_layouts(self, samples_dir):
        args = parse_args(
            ["propagate", str(samples_dir / "scale_broadcast.graph"), "--layouts", str(samples_dir / "mma_lhs.txt")]
        )
        assert args.layouts == [samples_dir / "mma_lhs.txt"]
        assert args.no_rematerialize is False


class TestBuild:
    """Tests for the build subcommand."""

    def test_blocked_matches_sample(self, capsys, samples_dir):
        code = main(
            ["build", "blocked", "--shape", "16,16", "--reg", "2,2", "--threads", "4,8",
             "--warps", "2,1", "--order", "1,0", "--name", "A", "--no-matrix"]
        )
        assert code == 0
        out = capsys.readouterr().out
        sample = (samples_dir / "layout_a.txt").read_text(encoding="utf-8")
        assert out == "".join(line + "\n" for line in sample.splitlines() if not line.startswith("#"))

    def test_mma_sample(self, capsys, samples_dir):
        assert main(["build", "mma", "--operand", "lhs", "--name", "mma_lhs", "--no-matrix"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "layout mma_lhs in(reg:3,thread:5,warp:0) out(i:4,j:4)"

    def test_swizzle_with_matrix(self, capsys):
        assert main(["build", "swizzle", "--m", "1", "--n", "2", "--vec", "2", "--max-phase", "2"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("layout mma_swizzle in(offset:3) out(i:1,j:2)\noffset: (0,1) (0,2) (1,2)\n")
        assert "| offset" in out

    def test_invalid_spec_fails(self, capsys):
        code = main(
            ["build", "blocked", "--shape", "16,16", "--reg", "2,2", "--threads", "4,8",
             "--warps", "1,1", "--order", "1,0"]
        )
        assert code == 1


class TestProps:
    """Tests for the props subcommand."""

    def test_layout_a(self, capsys, samples_dir):
        assert main(["props", str(samples_dir / "layout_a.txt")]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert "name=A" in lines
        assert "shape=16x16" in lines
        assert "distributed=yes" in lines
        assert "injective=yes" in lines
        assert "contiguous=2" in lines
        assert "vector_bits=32" in lines
        assert "instruction=b32" in lines


class TestConvertAndCheck:
    """Tests for the convert and check subcommands."""

    def _convert(self, samples_dir: Path, plan: Path) -> int:
        return main(
            ["convert", str(samples_dir / "shuffle_source.txt"), str(samples_dir / "shuffle_target.txt"),
             "--emit", str(plan)]
        )

    def test_shuffle_plan_checks(self, capsys, tmp_path, samples_dir):
        plan = tmp_path / "plan.json"
        assert self._convert(samples_dir, plan) == 0
        out = capsys.readouterr().out.splitlines()
        assert "kind=warp_shuffle" in out
        assert "rounds=2" in out
        assert "G=101" in out

        report = tmp_path / "report.json"
        assert main(["check", str(plan), "--report", str(report), "--trace", str(tmp_path / "trace.jsonl")]) == 0
        assert "correct=yes" in capsys.readouterr().out.splitlines()
        assert json.loads(report.read_text(encoding="utf-8"))["correct"] is True
        assert len((tmp_path / "trace.jsonl").read_text(encoding="utf-8").splitlines()) == 2

    def test_corrupted_plan_fails(self, capsys, tmp_path, samples_dir):
        plan = tmp_path / "plan.json"
        assert self._convert(samples_dir, plan) == 0
        document = json.loads(plan.read_text(encoding="utf-8"))
        rounds = document["shuffle"]["rounds"]
        rounds[0]["src_lane"], rounds[1]["src_lane"] = rounds[1]["src_lane"], rounds[0]["src_lane"]
        plan.write_text(json.dumps(document), encoding="utf-8")
        capsys.readouterr()

        assert main(["check", str(plan)]) == 1
        out = capsys.readouterr().out.splitlines()
        assert "correct=no" in out
        assert any(line.startswith("mismatches=") for line in out)

    def test_shared_memory_plan(self, capsys, tmp_path, samples_dir):
        target = tmp_path / "target.txt"
        assert main(
            ["build", "blocked", "--shape", "16,16", "--reg", "2,2", "--threads", "8,4",
             "--warps", "1,2", "--order", "1,0", "--name", "B", "--no-matrix"]
        ) == 0
        target.write_text(capsys.readouterr().out, encoding="utf-8")
        plan = tmp_path / "plan.json"
        assert main(["convert", str(samples_dir / "layout_a.txt"), str(target), "--emit", str(plan)]) == 0
        assert "kind=shared_memory" in capsys.readouterr().out.splitlines()
        assert main(["check", str(plan)]) == 0

    def test_mismatched_tensors_fail(self, capsys, samples_dir):
        code = main(["convert", str(samples_dir / "layout_a.txt"), str(samples_dir / "shuffle_target.txt")])
        assert code == 1

    def test_check_rejects_non_plan(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"schema": "something/1"}', encoding="utf-8")
        assert main(["check", str(path)]) == 1


class TestPropagate:
    """Tests for the propagate subcommand."""

    def test_scale_broadcast(self, capsys, tmp_path, samples_dir):
        emit = tmp_path / "propagation.json"
        code = main(
            ["propagate", str(samples_dir / "scale_broadcast.graph"),
             "--layouts", str(samples_dir / "mma_lhs.txt"), "--emit", str(emit)]
        )
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        assert out[-1] == "conversions=0"
        assert "%5 = mul -> mma_lhs" in out
        document = json.loads(emit.read_text(encoding="utf-8"))
        assert document["schema"] == "linlayout.propagation/1"
        assert document["conversions"] == []
