import json
import subprocess
import sys

import numpy as np
import pytest

from oracles import phantom_edge_config
from schurlab.cli import build_parser, emit_report, manifest, read_report, run
from schurlab.geom_core import PointConfig, regular_unit_simplex, save_config


def body(text):
    """Report lines without the manifest's timestamp."""
    lines = read_report(text)
    lines[0]["manifest"].pop("timestamp")
    return lines


@pytest.fixture
def simplex_file(tmp_path):
    path = tmp_path / "simplex.json"
    save_config(regular_unit_simplex(3, 4), path)
    return path


class TestRun:
    def test_audit_ok(self, simplex_file, tmp_path):
        out = tmp_path / "r.jsonl"
        assert run(["audit", "--input", str(simplex_file), "--report", str(out)]) == 0
        lines = read_report(out.read_text())
        assert lines[0]["manifest"]["subcommand"] == "audit"
        assert lines[1]["d_cliques"] == 4 and lines[1]["passed"]

    def test_cliques(self, simplex_file, capsys):
        assert run(["cliques", "--input", str(simplex_file), "--l", "2"]) == 0
        lines = read_report(capsys.readouterr().out)
        assert lines[1]["count"] == 6

    def test_violation_writes_witness(self, tmp_path):
        cfg = tmp_path / "phantom.json"
        save_config(phantom_edge_config(), cfg)
        wit = tmp_path / "w.json"
        rep = tmp_path / "r.jsonl"
        argv = ["audit", "--input", str(cfg), "--tol", "1e-6", "--witness", str(wit), "--report", str(rep)]
        assert run(argv) == 2
        replay = PointConfig.from_json(json.loads(wit.read_text()))
        assert np.array_equal(replay.points, phantom_edge_config().points)
        assert read_report(rep.read_text())[-1] == {"check": "witness", "path": str(wit)}
        # the same file passes at the default tolerance
        assert run(["audit", "--input", str(wit), "--report", str(rep)]) == 0

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"space": {"type": "euclidean", "dim": 2},\n "points": [[0, 0], [1, 0]\n')
        assert run(["audit", "--input", str(bad)]) == 1
        err = capsys.readouterr().err
        assert "line 3" in err and "column" in err

    def test_missing_file_and_bad_usage(self, tmp_path):
        assert run(["audit", "--input", str(tmp_path / "nope.json")]) == 1
        assert run(["frobnicate"]) == 1
        assert run([]) == 1

    def test_wrong_dimension(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text(json.dumps({"space": {"type": "euclidean", "dim": 3}, "points": [[0, 0], [1, 0]]}))
        assert run(["audit", "--input", str(p)]) == 1

    def test_lemrad(self, capsys):
        assert run(["lemmas", "--lemma", "lemrad", "--r", "1", "--k", "2"]) == 0
        lines = read_report(capsys.readouterr().out)
        assert lines[1]["r_omega"] == pytest.approx((2 / 3) ** 0.5, abs=1e-12)
        assert lines[2]["passed"]

    def test_lemrad_domain_error(self):
        assert run(["lemmas", "--lemma", "lemrad", "--r", "0.5"]) == 1

    @pytest.mark.parametrize("kind", ["red-blue", "simplex", "reuleaux-polygon", "rugby", "reuleaux-simplex"])
    def test_construct(self, kind, tmp_path, capsys):
        out = tmp_path / "c.json"
        assert run(["construct", kind, "--output", str(out)]) == 0
        line = read_report(capsys.readouterr().out)[1]
        assert PointConfig.from_json(json.loads(out.read_text())).to_json() == line["config"]

    def test_red_blue_margins(self, capsys):
        run(["construct", "red-blue", "--d", "5"])
        m = read_report(capsys.readouterr().out)[1]["margins"]
        assert m["max_red_blue_check"] < 1 and m["min_red_red"] == pytest.approx(1.0)

    def test_search(self, tmp_path, capsys):
        out = tmp_path / "best.json"
        assert run(["search", "--d", "2", "--n", "5", "--l", "2", "--budget", "4000", "--output", str(out)]) == 0
        line = read_report(capsys.readouterr().out)[1]
        assert line["count"] >= 5
        assert run(["cliques", "--input", str(out), "--l", "2"]) == 0
        assert read_report(capsys.readouterr().out)[1]["count"] == line["count"]

    def test_search_needs_size(self):
        assert run(["search", "--d", "2"]) == 1

    def test_hunt(self, capsys):
        assert run(["search", "--d", "3", "--hunt", "--budget", "1000"]) == 0
        assert read_report(capsys.readouterr().out)[1]["slack"] < 0


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["lemmas", "--lemma", "lemrelo", "--d", "3", "--trials", "2000"],
        ["search", "--d", "3", "--hunt", "--budget", "500", "--seed", "9"],
        ["construct", "red-blue", "--d", "4"],
    ])
    def test_bodies_identical(self, argv, capsys):
        run(argv)
        first = capsys.readouterr().out
        run(argv)
        second = capsys.readouterr().out
        assert first.splitlines()[1:] == second.splitlines()[1:]
        assert body(first) == body(second)


class TestReportIO:
    def test_manifest_only(self, tmp_path):
        args = build_parser().parse_args(["construct", "simplex"])
        path = tmp_path / "r.jsonl"
        emit_report([], path, manifest(args, ["construct", "simplex"]))
        lines = read_report(path.read_text())
        assert len(lines) == 1 and lines[0]["manifest"]["flags"]["kind"] == "simplex"

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "r.jsonl"
        rows = [{"a": np.float64(1.5), "b": np.arange(3)}, {"c": float("inf")}]
        emit_report(rows, path)
        assert read_report(path.read_text()) == [{"a": 1.5, "b": [0, 1, 2]}, {"c": None}]

    def test_unwritable_report(self, simplex_file, tmp_path):
        assert run(["audit", "--input", str(simplex_file), "--report", str(tmp_path / "no" / "r.jsonl")]) == 1


def test_subprocess_entry_point(simplex_file):
    proc = subprocess.run([sys.executable, "-m", "schurlab.cli", "audit", "--input", str(simplex_file)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    lines = read_report(proc.stdout)
    assert "manifest" in lines[0] and lines[1]["check"] == "audit"
