import json
import os
import shutil
import subprocess
import sys

import pytest

from tresyn.cli import main
from tresyn.syntax import format_tre, parse_tre, read_words
from tresyn.synth import synthesize, verify_consistent


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.splitlines(), out.err


@pytest.fixture
def files(tmp_path):
    def make(name, *lines):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    return make


def test_synth_found(capsys, files):
    pos, neg = files("p", "a@1.5"), files("n", "a@2.5")
    code, out, _ = run(capsys, "synth", "--pos", pos, "--neg", neg)
    assert code == 0 and len(out) == 1
    tre = parse_tre(out[0])
    assert format_tre(tre) == out[0]
    assert verify_consistent(tre, read_words(pos), read_words(neg))


def test_synth_matches_library(capsys, files):
    pos = files("p", "a@1 b@2", "a@1 b@2.5")
    neg = files("n", "a@1 b@5", "b@1")
    _, out, _ = run(capsys, "synth", "--pos", pos, "--neg", neg)
    assert out[0] == format_tre(synthesize(read_words(pos), read_words(neg)).tre)


def test_synth_no_tre(capsys, files):
    pos = files("p", "a@1.5 a@2.6 a@1.5")
    neg = files("n", "a@1.2 a@2.6 a@1.5", "a@1.5 a@2.6 a@1.2")
    code, out, _ = run(capsys, "synth", "--pos", pos, "--neg", neg)
    assert code == 1 and out == ["no_tre_exists", "a@1.5 a@2.6 a@1.5"]


def test_synth_length_capped(capsys, files):
    pos, neg = files("p", "a@1", "a@1 a@1"), files("n", "b@1")
    code, out, _ = run(capsys, "synth", "--pos", pos, "--neg", neg, "--max-len", "1", "--json")
    assert code == 3 and out[0] == "length_capped"
    assert json.loads("\n".join(out[1:]))["outcome"] == "length_capped"


def test_synth_json(capsys, files):
    pos, neg = files("p", "a@1.5"), files("n", "a@2.5")
    code, out, _ = run(capsys, "synth", "--pos", pos, "--neg", neg, "--json", "--strategy", "trivial")
    report = json.loads("\n".join(out[1:]))
    assert code == 0 and report["tre"] == out[0]


def test_check(capsys):
    assert run(capsys, "check", "--tre", "a[3,7]", "--word", "a@5")[:2] == (0, ["accept"])
    assert run(capsys, "check", "--tre", "a[0,0]", "--word", "a@1")[:2] == (1, ["reject"])


def test_check_verbose_lists_both_derivations(capsys):
    code, out, _ = run(capsys, "check", "--tre", "(a | a b) b*[4,4]", "--word", "a@1.5 b@2 b@3", "--verbose")
    assert out[0] == "reject" and code == 1
    assert len(out) == 3
    assert all(line.endswith("violates 3") for line in out[1:])


def test_check_parse_error(capsys):
    code, _, err = run(capsys, "check", "--tre", "a[", "--word", "a@1")
    assert code == 2 and "error" in err


def test_decide(capsys, files):
    neg = files("n", "a@1.2 a@2.6 a@1.5", "a@1.5 a@2.6 a@1.2")
    assert run(capsys, "decide", "--pos", files("p", "a@1.5 a@2.6 a@1.5"), "--neg", neg)[:2] == (
        1, ["unsolvable", "a@1.5 a@2.6 a@1.5"])
    assert run(capsys, "decide", "--pos", files("q", "a@1.5"), "--neg", files("m", "a@2.5"))[:2] == (0, ["solvable"])


def test_naive(capsys, files):
    pos, neg = files("p", "a@1.5 b@2", "b@1"), files("n", "a@1.5 b@3")
    code, out, _ = run(capsys, "naive", "--pos", pos, "--neg", neg)
    assert code == 0
    assert verify_consistent(parse_tre(out[0]), read_words(pos), read_words(neg))


def test_missing_file(capsys):
    code, _, err = run(capsys, "decide", "--pos", "/nonexistent/file")
    assert code == 2 and "cannot read" in err


def test_bad_flag(capsys):
    assert run(capsys, "synth", "--pos")[0] == 2


def test_sample(capsys, tmp_path):
    prefix = str(tmp_path / "d")
    code, out, _ = run(capsys, "sample", "--tre", "a[3,7]", "-n", "5", "--neg", "5", "--seed", "1",
                       "--max-len", "2", "--out", prefix)
    assert code == 0 and len(out) == 3
    assert len(read_words(prefix + ".pos")) == 5
    manifest = json.loads(open(prefix + ".json").read())
    assert manifest["target"] == "(a[3,7])" and manifest["seed"] == 1


def test_sample_failure(capsys, tmp_path):
    code, _, err = run(capsys, "sample", "--tre", "(a[0,1) b[0,1))[2,3)", "-n", "2", "--attempts", "20",
                       "--out", str(tmp_path / "x"))
    assert code == 3 and "sampling failed" in err


@pytest.mark.skipif(shutil.which("z3") is None, reason="no z3 binary on PATH")
def test_external_solver_flag(capsys, files):
    pos, neg = files("p", "a@1.5"), files("n", "a@2.5")
    code, out, _ = run(capsys, "synth", "--pos", pos, "--neg", neg, "--solver", "smtlib:z3 -in")
    assert code == 0 and verify_consistent(parse_tre(out[0]), read_words(pos), read_words(neg))


def test_module_entry_point(files):
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "tresyn", "check", "--tre", "a b", "--word", "a@1 b@1"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0 and proc.stdout.strip() == "accept"
