import json
import shlex
import subprocess
import sys
from pathlib import Path

import pytest

from qfi import errors
from qfi.cli import capture

GOLDEN = Path(__file__).parent / "golden"


def corpus():
    out = []
    for line in (GOLDEN / "corpus.txt").read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            name, rest = line.split(None, 1)
            out.append((name, shlex.split(rest)))
    return out


def render_case(argv):
    code, out, err = capture(argv)
    return f"$ qfi {shlex.join(argv)}\n--- exit {code}\n--- stdout\n{out}--- stderr\n{err}"


CASES = corpus()


def test_corpus_covers_every_command():
    commands = {"invariants", "uclasses", "witt", "inpower", "arason", "jmin", "motive", "sq", "restrict",
                "region", "selftest"}
    used = {a for _, argv in CASES for a in argv if a in commands}
    assert used == commands
    assert len(CASES) >= 20


@pytest.mark.parametrize("name,argv", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv):
    assert render_case(argv) == (GOLDEN / f"{name}.txt").read_text()


def test_repeated_runs_are_identical():
    argv = ["--gens", "a,b,c,d", "--json", "uclasses", "pf(a,b) (x) <1,c,d>"]
    assert capture(argv) == capture(argv)


def test_json_document_shape():
    code, out, _ = capture(["--gens", "a,b", "invariants", "pf(a,b)", "--json"])
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["command"] == "invariants"
    assert doc["result"]["e"] == {"n": 2, "value": "{a,b}"}
    assert list(doc) == sorted(doc)


@pytest.mark.parametrize("argv,code,err", [
    (["--gens", "a", "invariants", "<a,"], 2, "E_PARSE_SYNTAX"),
    (["--gens", "a", "invariants", "<b>"], 2, "E_UNKNOWN_GENERATOR"),
    (["--gens", "a,b,c", "uclasses", "<a,b,c>"], 1, "E_UNSUPPORTED_SHAPE"),
    (["--gens", "a,b", "arason", "--n", "2", "<a,b>"], 1, "E_PRECONDITION"),
    (["--gens", "a,x", "witt", "<a>"], 1, "E_GENERATORS"),
    (["region", "--n", "1", "--a", "1", "--b", "2"], 1, "E_PRECONDITION"),
    (["witt", "<a>"], 1, "E_PRECONDITION"),
])
def test_error_exit_codes(argv, code, err):
    got, out, _ = capture(argv + ["--json"])
    assert got == code
    doc = json.loads(out)
    assert not doc["ok"] and doc["error"]["code"] == err
    got, out, stderr = capture(argv)
    assert got == code and not out and err in stderr


def test_usage_error_is_parse_exit():
    code, _, _ = capture(["frobnicate"])
    assert code == 2


def test_error_codes_are_distinct():
    classes = [c for c in vars(errors).values() if isinstance(c, type) and issubclass(c, errors.QfiError)]
    leaf = [c for c in classes if c not in (errors.QfiError,)]
    codes = [c.code for c in leaf]
    assert len(codes) == len(set(codes))
    assert {c.exit_code for c in classes} == {1, 2, 3}


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qfi", "--gens", "a,b", "invariants", "<a,b>"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "e: e_1 = {a} + {b}" in proc.stdout
