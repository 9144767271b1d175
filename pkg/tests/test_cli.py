import csv
import io
import json
import subprocess
import sys

import pytest

from countdet.cli import main
from countdet.library import running_example
from countdet.serialize import ca_to_dict, dumps

WORDS = ["", "a", "ab", "aa", "ba", "abb", "bab", "aab", "bbbab"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_determinise_running_example(capsys):
    code, out, _ = run(capsys, "determinise", "--method", "monadic", ".*a.{1}")
    assert code == 0
    d = json.loads(out)
    assert (len(d["states"]), len(d["transitions"]), len(d["params"])) == (3, 9, 2)


def test_compile_then_determinise_from_file(capsys, tmp_path):
    path = tmp_path / "ca.json"
    assert run(capsys, "compile", ".*a.{2}", "-o", str(path))[0] == 0
    code, out, _ = run(capsys, "determinise", "--ca", str(path), "--method", "general")
    assert code == 0 and json.loads(out)["method"] == "general"


@pytest.mark.parametrize("method", ["dfa", "dfa-min", "general", "general-reach", "monadic"])
def test_match_agrees_with_oracle(capsys, tmp_path, method):
    words = tmp_path / "words.txt"
    words.write_text("\n".join(WORDS) + "\n")
    _, expected, _ = run(capsys, "match", "--oracle", ".*a.{1}", "--input", str(words))
    code, got, _ = run(capsys, "match", "--method", method, ".*a.{1}", "--input", str(words))
    assert code == 0 and got == expected
    assert expected.split() == ["accept" if len(w) >= 2 and w[-2] == "a" else "reject" for w in WORDS]


def test_stats_csv(capsys):
    code, out, _ = run(capsys, "stats", ".*a.{3}", "--methods", "dfa-min,monadic")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [(r["method"], r["states"], r["outcome"]) for r in rows] == [("dfa-min", "16", "ok"),
                                                                        ("monadic", "5", "ok")]


def test_bench_rows(capsys, tmp_path):
    rules = tmp_path / "rules.txt"
    rules.write_text("# comment\n.*a.{2}\na{0,2}b\n\n")
    out = tmp_path / "out.csv"
    code, _, _ = run(capsys, "bench", str(rules), "--methods", "dfa,monadic", "--repeat", "2", "-o", str(out))
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and len(rows) == 4
    assert {r["runs"] for r in rows} == {"2"}


def test_dot(capsys):
    code, out, _ = run(capsys, "dot", "--method", "monadic", ".*a.{1}")
    assert code == 0 and "{q0↦1, q1↦2}" in out
    code, out, _ = run(capsys, "dot", ".*a.{1}")
    assert code == 0 and "doublecircle" in out


def test_trace_goes_to_stderr(capsys):
    code, out, err = run(capsys, "determinise", "--method", "general", "--trace", ".*a.{1}")
    assert code == 0 and "\npop {q0}\n" in err and out.startswith("{")


def test_exit_syntax(capsys):
    assert run(capsys, "compile", "(ab){2}")[0] == 2
    assert run(capsys, "compile", "a(b")[0] == 2


def test_exit_not_monadic(capsys, tmp_path):
    data = ca_to_dict(running_example(2))
    data["transitions"].append({"src": "r", "symClass": "[b]", "guard": ["c<=1"],
                                "assign": {"c": "c+1"}, "dst": "r"})
    path = tmp_path / "ca.json"
    path.write_text(json.dumps(data))
    assert run(capsys, "determinise", "--ca", str(path), "--method", "monadic")[0] == 3
    assert run(capsys, "determinise", "--ca", str(path), "--method", "general")[0] == 0


def test_exit_budget(capsys):
    code, _, err = run(capsys, "determinise", "--method", "general-basic", "--k-budget", "5", ".*a.{1}")
    assert code == 4 and "Diverged" in err
    assert run(capsys, "determinise", "--method", "dfa", "--state-budget", "10", ".*a.{6}")[0] == 4


def test_exit_bad_file(capsys, tmp_path):
    path = tmp_path / "x.json"
    path.write_text(dumps(running_example(1))[:-5])
    assert run(capsys, "determinise", "--ca", str(path))[0] == 2
    assert run(capsys, "determinise", "--ca", str(tmp_path / "missing.json"))[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "countdet", "match", "--method", "monadic", ".*a.{1}"],
                          input="ab\nbb\n", capture_output=True, text=True, check=True)
    assert proc.stdout.split() == ["accept", "reject"]
