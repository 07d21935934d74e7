import io
import json

import pytest

from qbd import cli
from qbd.formula import AffineEquation, clause
from qbd.oracle import extract_strategy
from qbd.qdimacs import parse_qdimacs, write_qdimacs
from helpers import RUNNING_EXAMPLE_TEXT

FALSE_TEXT = "c class 2cnf\np cnf 1 1\na 1 0\n1 0\n"

AFF_TEXT = """c class aff
p cnf 5 3
e 1 0
a 2 0
e 3 4 5 0
x 1 3 0
x 2 5 0
c backdoor-begin
4 5 0
"""

RELATIONS_TEXT = "impl 2 : 00, 01, 11\n"

GRAPH_TEXT = "parts a b | c\na c\n"


@pytest.fixture
def example(tmp_path):
    p = tmp_path / "example.qdimacs"
    p.write_text(RUNNING_EXAMPLE_TEXT)
    return str(p)


def lines_of(capsys):
    return capsys.readouterr().out.splitlines()


class TestSolve:
    def test_true_instance(self, example, capsys):
        assert cli.run(["solve", example]) == 10
        out = lines_of(capsys)
        assert out[0] == "s TRUE"
        assert "c algorithm 2cnf" in out
        assert "c n 5" in out
        assert "c k 3" in out

    def test_false_instance(self, tmp_path, capsys):
        p = tmp_path / "f.qdimacs"
        p.write_text(FALSE_TEXT)
        assert cli.run(["solve", str(p)]) == 20
        assert lines_of(capsys)[0] == "s FALSE"

    def test_forced_brute(self, example, capsys):
        assert cli.run(["solve", example, "--algorithm", "brute"]) == 10
        assert "c algorithm brute" in lines_of(capsys)

    def test_forced_engine_class_mismatch(self, example, capsys):
        assert cli.run(["solve", example, "--algorithm", "aff"]) == 1
        assert "declares 2cnf" in capsys.readouterr().err

    def test_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(RUNNING_EXAMPLE_TEXT))
        assert cli.run(["solve", "-"]) == 10
        assert lines_of(capsys)[0] == "s TRUE"

    def test_emit_strategy(self, example, tmp_path, capsys):
        target = tmp_path / "tree.txt"
        assert cli.run(["solve", example, "--emit-strategy", str(target)]) == 10
        expected = extract_strategy(parse_qdimacs(RUNNING_EXAMPLE_TEXT))
        assert target.read_text() == expected.to_text() + "\n"

    def test_emit_strategy_respects_the_leaf_cap(self, tmp_path, capsys):
        body = ["c class 2cnf", "p cnf 17 0", "a " + " ".join(map(str, range(1, 18))) + " 0"]
        p = tmp_path / "wide.qdimacs"
        p.write_text("\n".join(body) + "\n")
        target = tmp_path / "tree.txt"
        assert cli.run(["solve", str(p), "--emit-strategy", str(target)]) == 10
        assert not target.exists()
        assert "strategy not written" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert cli.run(["solve", str(tmp_path / "nope")]) == 1
        assert capsys.readouterr().err.startswith("qbd:")

    def test_brute_cap_flag_beats_env(self, tmp_path, capsys, monkeypatch):
        p = tmp_path / "wide.qdimacs"
        p.write_text("p cnf 3 2\ne 1 2 3 0\n1 -2 3 0\n-1 2 -3 0\n")
        monkeypatch.setenv("QBD_BRUTE_CAP", "2")
        assert cli.run(["solve", str(p), "--brute-cap", "24"]) == 10
        assert "c algorithm brute" in lines_of(capsys)


class TestDetect:
    def test_declared_class(self, example, capsys):
        assert cli.run(["detect", example]) == 0
        assert lines_of(capsys) == ["k=3: x3 x4 x5"]

    def test_flag_overrides(self, example, capsys):
        assert cli.run(["detect", example, "--class", "aff"]) == 0
        assert lines_of(capsys) == ["k=5: x1 x2 x3 x4 x5"]

    def test_empty_cover(self, tmp_path, capsys):
        p = tmp_path / "easy.qdimacs"
        p.write_text("c class 2cnf\np cnf 2 1\ne 1 2 0\n1 -2 0\n")
        assert cli.run(["detect", str(p)]) == 0
        assert lines_of(capsys) == ["k=0:"]

    def test_no_class_anywhere(self, tmp_path, capsys):
        p = tmp_path / "bare.qdimacs"
        p.write_text("p cnf 1 1\ne 1 0\n1 0\n")
        assert cli.run(["detect", str(p)]) == 1
        assert "declares no class" in capsys.readouterr().err


class TestKernelize:
    def test_reduces_the_parity_part(self, tmp_path, capsys):
        p = tmp_path / "aff.qdimacs"
        p.write_text(AFF_TEXT)
        assert cli.run(["kernelize", str(p)]) == 0
        reduced = parse_qdimacs(capsys.readouterr().out)
        assert reduced.prefix.to_string() == "a2 e4 e5"
        assert reduced.matrix.tractable == (AffineEquation(frozenset({2, 5}), 1),)
        assert reduced.matrix.backdoor == (clause(4, 5),)
        assert reduced.base_class.tag == "aff"

    def test_out_file(self, tmp_path):
        p = tmp_path / "aff.qdimacs"
        p.write_text(AFF_TEXT)
        out = tmp_path / "kernel.qdimacs"
        assert cli.run(["kernelize", str(p), "--out", str(out)]) == 0
        assert parse_qdimacs(out.read_text()).prefix.to_string() == "a2 e4 e5"

    def test_false_parity_part(self, tmp_path, capsys):
        p = tmp_path / "bad.qdimacs"
        p.write_text("c class aff\np cnf 1 2\na 1 0\nx 1 0\nx -1 0\n")
        assert cli.run(["kernelize", str(p)]) == 20
        assert "no kernel" in capsys.readouterr().err


class TestClassify:
    def test_fpt_language(self, tmp_path, capsys):
        p = tmp_path / "rels.txt"
        p.write_text(RELATIONS_TEXT)
        assert cli.run(["classify", str(p)]) == 0
        assert lines_of(capsys) == ["fpt because=maj"]

    def test_open_case_prints_d(self, tmp_path, capsys):
        p = tmp_path / "rels.txt"
        p.write_text("or3 3 : 001, 010, 011, 100, 101, 110, 111\nimpl 2 : 00, 01, 11\n")
        assert cli.run(["classify", str(p)]) == 0
        assert lines_of(capsys) == ["open-dihsb+ d=3 because=t4"]

    def test_hard_language_has_no_because(self, tmp_path, capsys):
        p = tmp_path / "rels.txt"
        p.write_text("oneinthree 3 : 100, 010, 001\n")
        assert cli.run(["classify", str(p)]) == 0
        assert lines_of(capsys) == ["para-pspace-hard"]


class TestGenerate:
    def test_random_is_deterministic(self, tmp_path, capsys):
        args = ["generate", "random", "--n", "6", "--k", "2", "--seed", "5"]
        assert cli.run(args) == 0
        first = capsys.readouterr().out
        assert cli.run(args) == 0
        assert capsys.readouterr().out == first
        f = parse_qdimacs(first)
        assert len(f.prefix) == 6
        assert f.base_class.tag == "2cnf"

    def test_mis_horn(self, tmp_path, capsys):
        g = tmp_path / "graph.txt"
        g.write_text(GRAPH_TEXT)
        out = tmp_path / "mis.qdimacs"
        assert cli.run(["generate", "mis-horn", "--graph", str(g), "--out", str(out)]) == 0
        f = parse_qdimacs(out.read_text())
        assert f.base_class.tag == "horn"
        assert f.matrix.backdoor == (clause(4, 5),)

    def test_mis_ihsb(self, tmp_path, capsys):
        g = tmp_path / "graph.txt"
        g.write_text(GRAPH_TEXT)
        assert cli.run(["generate", "mis-ihsb", "--graph", str(g)]) == 0
        f = parse_qdimacs(capsys.readouterr().out)
        assert f.base_class.tag == "ihsb-"
        assert len(f.matrix.backdoor_variables()) == 4


class TestTransform:
    def test_dualize_twice_is_identity(self, example, tmp_path, capsys):
        once = tmp_path / "once.qdimacs"
        assert cli.run(["transform", example, "--dualize", "--out", str(once)]) == 0
        assert cli.run(["transform", str(once), "--dualize"]) == 0
        twice = capsys.readouterr().out
        assert twice == write_qdimacs(parse_qdimacs(RUNNING_EXAMPLE_TEXT))

    def test_to_3horn(self, tmp_path, capsys):
        p = tmp_path / "horn.qdimacs"
        p.write_text("c class horn\np cnf 4 1\ne 1 2 3 4 0\n1 -2 -3 -4 0\n")
        assert cli.run(["transform", str(p), "--to-3horn"]) == 0
        f = parse_qdimacs(capsys.readouterr().out)
        assert f.base_class.tag == "3horn"
        assert all(len(c) <= 3 for c in f.matrix.tractable)

    def test_modes_are_exclusive(self, example):
        with pytest.raises(SystemExit) as ei:
            cli.run(["transform", example, "--dualize", "--to-3horn"])
        assert ei.value.code == 2


class TestBench:
    def test_run_and_verify(self, tmp_path, capsys):
        log = tmp_path / "log.jsonl"
        assert cli.run(["bench", "--suite", "2cnf:5:6:2", "--out", str(log)]) == 0
        assert f"bench: 5 instances, 10 records -> {log}" in capsys.readouterr().out
        rows = [json.loads(l) for l in log.read_text().splitlines()]
        assert len(rows) == 10
        assert {r["algorithm"] for r in rows} >= {"brute"}
        assert all(r["n"] == 6 for r in rows)
        assert cli.run(["bench", "--verify", str(log)]) == 0
        out = capsys.readouterr().out
        assert "instances 5  records 10" in out
        assert "agree 5  disagree 0" in out
        assert "leaf-budget over 0" in out

    def test_append_safe(self, tmp_path, capsys):
        log = tmp_path / "log.jsonl"
        cli.run(["bench", "--suite", "aff:3:5:2", "--out", str(log)])
        cli.run(["bench", "--suite", "posneg:3:5:2", "--out", str(log)])
        assert len(log.read_text().splitlines()) == 12

    def test_threads(self, tmp_path, capsys, monkeypatch):
        log = tmp_path / "log.jsonl"
        assert cli.run(["bench", "--suite", "2cnf:4:5:2", "--out", str(log), "--threads", "3"]) == 0
        assert len(log.read_text().splitlines()) == 8
        monkeypatch.setenv("QBD_THREADS", "2")
        assert cli.run(["bench", "--suite", "2cnf:4:5:2", "--out", str(log)]) == 0
        assert len(log.read_text().splitlines()) == 16

    def test_verify_flags_bad_records(self, tmp_path, capsys):
        log = tmp_path / "bad.jsonl"
        base = {
            "instance": "z", "seed": 1, "algorithm": "2cnf", "value": True,
            "k": 1, "n": 3, "branch_nodes": 0, "leaves": 1, "wall_time": 0.0,
        }
        liar = dict(base, algorithm="brute", value=False, leaves=5)
        log.write_text(json.dumps(base) + "\n" + json.dumps(liar) + "\n")
        assert cli.run(["bench", "--verify", str(log)]) == 1
        out = capsys.readouterr().out
        assert "over-budget: z (brute)" in out
        assert "disagree: z" in out

    def test_verify_empty_log(self, tmp_path, capsys):
        log = tmp_path / "empty.jsonl"
        log.write_text("")
        assert cli.run(["bench", "--verify", str(log)]) == 0
        assert "instances 0  records 0" in capsys.readouterr().out

    def test_usage_errors(self, tmp_path, capsys):
        log = tmp_path / "log.jsonl"
        assert cli.run(["bench", "--out", str(log)]) == 1
        assert cli.run(["bench", "--verify", str(log), "--suite", "2cnf:1:3:1"]) == 1
        assert cli.run(["bench", "--suite", "2cnf:0:3:1", "--out", str(log)]) == 1
        assert cli.run(["bench", "--suite", "nonsense", "--out", str(log)]) == 1
        assert cli.run(["bench", "--suite", "2cnf:a:b:c", "--out", str(log)]) == 1


class TestEntry:
    def test_unknown_subcommand_is_usage(self):
        with pytest.raises(SystemExit) as ei:
            cli.run(["frobnicate"])
        assert ei.value.code == 2

    def test_main_exits_with_the_run_code(self, example):
        with pytest.raises(SystemExit) as ei:
            cli.main(["detect", example])
        assert ei.value.code == 0
