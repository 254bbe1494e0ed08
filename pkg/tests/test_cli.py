import json
import subprocess
import sys

import pytest

from eulerstirling.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dist_text(capsys):
    code, out, _ = run(capsys, "dist", "--n", "3", "--stats", "des")
    assert code == 0
    assert out.splitlines()[1:] == ["0 : 1", "1 : 4", "2 : 1"]


def test_dist_csv_with_sets(capsys):
    code, out, _ = run(capsys, "dist", "--n", "3", "--stats", "asc,Rmin",
                       "--domain", "invseq", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "asc,Rmin,count"
    assert "1,0;1,2" in lines
    assert sum(int(l.rsplit(",", 1)[1]) for l in lines[1:]) == 6


def test_dist_json(capsys):
    code, out, _ = run(capsys, "dist", "--n", "4", "--stats", "des,ides", "--format", "json")
    body = json.loads(out)
    assert code == 0 and body["domain"] == "permutations"
    assert sum(r["count"] for r in body["rows"]) == 24


@pytest.mark.parametrize("argv", [
    ["verify", "--id", "bogus"],
    ["dist", "--n", "0", "--stats", "des"],
    ["dist", "--n", "3", "--stats", "zero"],
    ["dist", "--n", "11", "--stats", "des"],
    ["conjecture", "--n-max", "99"],
    ["verify", "--id", "gg1", "--tcap", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_raised_bound_needs_force(capsys):
    code, _, err = run(capsys, "dist", "--n", "11", "--stats", "des", "--bound", "12")
    assert code == 2 and "--force" in err


def test_verify_json_is_byte_identical(capsys):
    argv = ["verify", "--id", "adr1", "--tcap", "5", "--ucap", "3", "--points", "2",
            "--seed", "42", "--format", "json"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    body = json.loads(out1)
    assert body["status"] == "pass" and body["seed"] == 42
    assert all("elapsed_ms" not in c for c in body["checks"])
    assert {c["id"] for c in body["checks"]} >= {"adr1:rhs=lhs", "adr1:v=1=gg1"}


def test_verify_text_and_output_file(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, out, _ = run(capsys, "verify", "--id", "tf43", "--rcap", "5", "--j", "1",
                       "--points", "1", "-o", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert "PASS" in text and "j=1" in text and "all checks passed" in text


def test_conjecture_small(capsys):
    code, out, _ = run(capsys, "conjecture", "--n-max", "1")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "conjecture", "--n-max", "6", "--format", "json")
    body = json.loads(out)
    assert code == 0 and body["status"] == "pass"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eulerstirling", "dist", "--n", "2",
                           "--stats", "lmax"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1:] == ["1 : 1", "2 : 1"]
