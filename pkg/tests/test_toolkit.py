"""File format, equivalence oracle, corpus files and the command line."""
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from s2c import io
from s2c.cli import main
from s2c.context import Context
from s2c.corpus import CORPUS, random_functional_machines
from s2c.machine import eval_machine, has_errors, is_trimmed, validate
from s2c.oracle import oracle_equiv

ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = ROOT / "corpus"

C = Context


# ----------------------------------------------------------- file format

@pytest.mark.parametrize("name", sorted(CORPUS))
def test_round_trip(name):
    m = CORPUS[name]()
    assert io.loads(io.dumps(m)) == m


def test_round_trip_random():
    for m in random_functional_machines(seed=5, count=20):
        assert io.loads(io.dumps(m)) == m


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_shipped_corpus_files_match(name):
    assert io.load(CORPUS_DIR / f"{name}.json") == CORPUS[name]()


def _doc(**changes):
    doc = io.to_document(CORPUS["t_mirror"]())
    doc.update(changes)
    return doc


def test_transition_to_undeclared_state_is_rejected():
    doc = _doc(transitions=[{"from": "q", "input": "a", "left": "a", "right": "", "to": "zz"}])
    text = json.dumps(doc, indent=2)
    with pytest.raises(io.MachineFormatError) as info:
        io.loads(text)
    assert info.value.path == "$.transitions[0].to"
    # reported at the line where the offending transition object opens
    lines = text.splitlines()
    opener = max(i for i, line in enumerate(lines) if line == "    {")
    assert lines[opener + 5].strip() == '"to": "zz"'
    assert info.value.line == opener + 1


def test_unknown_fields_are_rejected():
    with pytest.raises(io.MachineFormatError) as info:
        io.loads(json.dumps(_doc(comment="hi")))
    assert "comment" in info.value.message
    doc = _doc()
    doc["init"][0]["weight"] = 1
    with pytest.raises(io.MachineFormatError) as info:
        io.loads(json.dumps(doc))
    assert info.value.path == "$.init[0]"


def test_other_schema_errors():
    bad = [
        _doc(format_version="2"),
        _doc(input_alphabet=["ab"]),
        _doc(states=["q", "q"]),
        _doc(final=[{"state": "q", "left": "z", "right": ""}]),
        _doc(transitions=[{"from": "q", "input": "z", "left": "", "right": "", "to": "q"}]),
        _doc(init=[{"state": "q", "left": ""}]),
    ]
    for doc in bad:
        with pytest.raises(io.MachineFormatError):
            io.loads(json.dumps(doc))
    with pytest.raises(io.MachineFormatError) as info:
        io.loads('{\n  "format_version": "1",\n  oops\n}')
    assert info.value.line == 3


def test_transcribed_d1_document():
    text = """{
      "format_version": "1",
      "input_alphabet": ["a", "b", "c"],
      "output_alphabet": ["a", "b"],
      "states": ["q0", "q1", "q2", "q3"],
      "init": [{"state": "q0", "left": "", "right": ""}],
      "final": [{"state": "q2", "left": "", "right": ""},
                {"state": "q3", "left": "", "right": ""}],
      "transitions": [
        {"from": "q0", "input": "a", "left": "", "right": "", "to": "q1"},
        {"from": "q1", "input": "a", "left": "", "right": "aa", "to": "q1"},
        {"from": "q1", "input": "b", "left": "aa", "right": "aa", "to": "q2"},
        {"from": "q1", "input": "c", "left": "ba", "right": "ab", "to": "q3"}
      ]
    }"""
    m = io.loads(text)
    assert eval_machine(m, "ab") == {"aaaa"}
    assert m == CORPUS["d1"]()


# ---------------------------------------------------------------- oracle

def test_oracle_equiv_examples():
    assert oracle_equiv(CORPUS["t1"](), CORPUS["d1"](), 10).equivalent
    assert oracle_equiv(CORPUS["t2"](), CORPUS["d2"](), 10).equivalent
    v = oracle_equiv(CORPUS["t1"](), CORPUS["t2"](), 3)
    assert not v.equivalent and v.word in ("b", "ab")


# ---------------------------------------------------------------- corpus

def test_corpus_machines_validate_and_are_trimmed():
    for name, make in CORPUS.items():
        m = make()
        assert not has_errors(validate(m)) and is_trimmed(m), name


# ------------------------------------------------------------------- CLI

def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_decide(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "decide", CORPUS_DIR / "t1.json",
                           "--report", tmp_path / "r.json")
    assert code == 0 and json.loads(out)["sequentializable"] is True
    assert json.loads((tmp_path / "r.json").read_text()) == json.loads(out)
    code, out, _ = run_cli(capsys, "decide", CORPUS_DIR / "diverging.json")
    assert code == 1 and json.loads(out)["counterexample"]["shape"] in (1, 3)


def test_cli_dist(capsys):
    assert run_cli(capsys, "dist", "f", "aaaa", "baab")[:2] == (0, "4\n")
    assert run_cli(capsys, "dist", "p", "ab", "ac")[:2] == (0, "2\n")
    assert run_cli(capsys, "dist", "p", "", "abc")[:2] == (0, "3\n")


def test_cli_determinize(capsys, tmp_path):
    out_file = tmp_path / "d.json"
    code, out, _ = run_cli(capsys, "determinize", CORPUS_DIR / "diverging.json", "-o", out_file)
    assert code == 1 and json.loads(out)["error"] == "ctp-violation"
    assert not out_file.exists()
    code, out, _ = run_cli(capsys, "determinize", CORPUS_DIR / "t1.json", "-o", out_file)
    assert code == 0 and io.load(out_file).is_sequential
    code, out, _ = run_cli(capsys, "equiv", CORPUS_DIR / "t1.json", out_file, "--max-len", 7)
    assert code == 0 and json.loads(out)["equivalent"]
    code, out, _ = run_cli(capsys, "determinize", CORPUS_DIR / "t1.json", "-o", out_file,
                           "--cap", 2)
    assert code == 1 and json.loads(out)["error"] == "inconclusive-cap"


def test_cli_eval_validate_trim_functional(capsys, tmp_path):
    assert run_cli(capsys, "eval", CORPUS_DIR / "t1.json", "aab")[:2] == (0, "aaaaaa\n")
    code, out, _ = run_cli(capsys, "eval", CORPUS_DIR / "t1.json", "")
    assert code == 1 and json.loads(out)["defined"] is False
    assert run_cli(capsys, "eval", CORPUS_DIR / "t1.json", "zz")[0] == 2
    assert run_cli(capsys, "validate", CORPUS_DIR / "t2.json")[0] == 0
    assert run_cli(capsys, "trim", CORPUS_DIR / "t2.json", "-o", tmp_path / "t.json")[0] == 0
    assert io.load(tmp_path / "t.json") == CORPUS["t2"]()
    code, out, _ = run_cli(capsys, "functional", CORPUS_DIR / "t1.json", "--max-len", 5)
    assert code == 0 and json.loads(out)["functional"]
    code, out, _ = run_cli(capsys, "functional", CORPUS_DIR / "strongly_aligned.json")
    assert code == 0


def test_cli_not_functional(capsys, tmp_path):
    doc = io.to_document(CORPUS["t_mirror"]())
    doc["states"].append("r")
    doc["init"].append({"state": "r", "left": "", "right": "b"})
    doc["final"].append({"state": "r", "left": "", "right": ""})
    path = tmp_path / "nf.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "functional", path, "--max-len", 2)
    assert code == 1 and json.loads(out)["word"] == ""
    code, out, _ = run_cli(capsys, "decide", path)
    assert code == 1 and json.loads(out)["error"] == "not-functional"


def test_cli_lasso(capsys):
    code, out, _ = run_cli(capsys, "lasso", CORPUS_DIR / "t1.json", "--k", 2, "--stem", "a",
                           "--loop", "a", "--classify")
    report = json.loads(out)
    assert code == 0 and len(report["lassos"]) == 1
    cls = report["lassos"][0]["classification"]
    assert cls["kind"] == "commuting" and cls["x"] == "a" and cls["pow"] == 2
    code, out, _ = run_cli(capsys, "lasso", CORPUS_DIR / "t1.json", "--k", 1, "--stem", "b",
                           "--loop", "a")
    assert code == 1 and json.loads(out)["lassos"] == []
    assert run_cli(capsys, "lasso", CORPUS_DIR / "t1.json", "--k", 1, "--stem", "",
                   "--loop", "")[0] == 2


def test_cli_bounded_predicates(capsys):
    assert run_cli(capsys, "clip", CORPUS_DIR / "t1.json", "--K", 6, "--max-len", 5)[0] == 0
    assert run_cli(capsys, "clip", CORPUS_DIR / "diverging.json", "--K", 2)[0] == 1
    assert run_cli(capsys, "ctp", CORPUS_DIR / "diverging.json", "--L", 4)[0] == 1


def test_cli_usage_errors(capsys, tmp_path):
    assert run_cli(capsys, "nonsense")[0] == 2
    assert run_cli(capsys, "decide", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version": "1"}')
    code, _, err = run_cli(capsys, "validate", bad)
    assert code == 2 and "missing field" in err
    assert run_cli(capsys, "equiv", CORPUS_DIR / "t1.json", CORPUS_DIR / "t2.json")[0] == 2


def test_cli_corpus_export(capsys):
    code, out, _ = run_cli(capsys, "corpus")
    assert code == 0 and out.split() == list(CORPUS)
    code, out, _ = run_cli(capsys, "corpus", "t2")
    assert code == 0 and io.loads(out) == CORPUS["t2"]()
    assert run_cli(capsys, "corpus", "nope")[0] == 2


def test_cli_output_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "s2c.cli", "decide", str(CORPUS_DIR / "diverging.json")]
    env = dict(os.environ, PYTHONHASHSEED="random")
    first = subprocess.run(cmd, capture_output=True, env=env)
    second = subprocess.run(cmd, capture_output=True, env=env)
    assert first.returncode == second.returncode == 1
    assert first.stdout == second.stdout and first.stdout
