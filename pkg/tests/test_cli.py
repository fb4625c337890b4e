import json
import subprocess
import sys

import pytest

from plusspace.cli import main
from plusspace.eisenstein import QExpansion


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_field_json(capsys):
    code, out, _ = run(capsys, "field", "--field", "40")
    doc = json.loads(out)
    assert code == 0 and doc["D"] == 10 and doc["discriminant"] == 40


def test_eisenstein_table(capsys):
    code, out, _ = run(capsys, "eisenstein", "--field", "40", "--kappa", "2", "--chi", "0",
                       "--trace-bound", "14", "--scale", "60", "--format", "table")
    assert code == 0
    rows = {line.split()[0]: line.split()[-1] for line in out.strip().splitlines()[2:]}
    assert rows["0"] == "1577" and rows["7+2√10"] == "744" and rows["6"] == "8640"


def test_cohen(capsys):
    code, out, _ = run(capsys, "cohen", "--r", "2", "--n-max", "5")
    doc = json.loads(out)
    assert code == 0
    assert doc["coefficients"] == ["1/120", "-1/12", 0, 0, "-7/12", "-2/5"]


def test_json_round_trip(capsys, tmp_path):
    path = tmp_path / "g.json"
    code, _, _ = run(capsys, "eisenstein", "--field", "40", "--kappa", "2", "--chi", "1",
                     "--trace-bound", "10", "--output", str(path))
    assert code == 0
    text = path.read_text(encoding="utf-8")
    doc = json.loads(text)
    again = json.dumps(QExpansion.from_json(doc).to_json(), ensure_ascii=False, indent=2)
    assert json.loads(again) == doc


def test_deterministic(capsys):
    argv = ("eisenstein", "--field", "10", "--kappa", "3", "--chi", "1", "--trace-bound", "8")
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    argv = ("classgroup", "--field", "79", "--format", "table")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_deterministic_across_processes():
    cmd = [sys.executable, "-m", "plusspace.cli", "eisenstein", "--field", "40", "--kappa", "2",
           "--trace-bound", "6", "--scale", "60"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and b"1577" in a


def test_lvalue(capsys):
    code, out, _ = run(capsys, "lvalue", "--field", "40", "--kappa", "4")
    assert code == 0 and "1577/60" in out


def test_hecke(capsys):
    code, out, _ = run(capsys, "hecke", "--field", "40", "--kappa", "2", "--alpha", "3,-2",
                       "--trace-bound", "8", "--format", "table")
    assert code == 0 and "29792" in out


def test_local(capsys):
    code, out, _ = run(capsys, "local", "--p", "2", "--check", "hilbert", "--a", "-1", "--b", "-1")
    assert code == 0 and "-1" in out


@pytest.mark.parametrize("argv", [
    ("field", "--field", "-5"),
    ("field", "--field", "1"),
    ("eisenstein", "--field", "40", "--kappa", "2", "--chi", "7", "--trace-bound", "4"),
    ("eisenstein", "--field", "40", "--kappa", "2", "--trace-bound", "0"),
    ("eisenstein", "--field", "40", "--kappa", "2", "--trace-bound", "4", "--format", "xml"),
    ("hecke", "--field", "40", "--kappa", "2", "--alpha", "three", "--trace-bound", "4"),
    ("cohen", "--r", "2"),
    ("cohen", "--r", "1", "--n-max", "4"),
    ("nonsense",),
])
def test_bad_arguments_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.strip()


@pytest.mark.parametrize("argv", [
    ("eisenstein", "--field", "0", "--kappa", "1", "--trace-bound", "4"),
    ("lvalue", "--field", "40", "--kappa", "1"),
    ("hecke", "--field", "40", "--kappa", "2", "--alpha", "3,0", "--trace-bound", "4"),
])
def test_computation_errors_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3
    assert len(err.strip().splitlines()) == 1


def test_weight_three_halves_over_Q_message(capsys):
    _, _, err = run(capsys, "eisenstein", "--field", "0", "--kappa", "1", "--trace-bound", "4")
    assert "does not work" in err
