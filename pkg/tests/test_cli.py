import csv
import io
import json
import subprocess
import sys

import pytest

from permgen.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_estimate_csv(capsys):
    code, out, _ = run(capsys, "estimate", "--n", "100", "--x", "1", "--xp", "1", "--samples", "300",
                       "--seed", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["event", "n", "samples", "estimate", "ci_low", "ci_high", "limit", "seed"]
    assert rows[0]["event"] == "transitive"
    assert float(rows[0]["limit"]) == pytest.approx(0.367879, abs=1e-6)
    assert float(rows[0]["ci_low"]) <= float(rows[0]["estimate"]) <= float(rows[0]["ci_high"])


def test_estimate_json_with_types(capsys):
    code, out, _ = run(capsys, "estimate", "--n", "12", "--type", "1^2 10^1", "--type2", "12^1",
                       "--event", "alternating", "--samples", "100", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["event"] == "alternating"
    assert payload["samples"] == 100
    assert payload["limit"] is None


def test_estimate_classify_rows(capsys):
    code, out, _ = run(capsys, "estimate", "--n", "20", "--type", "20^1", "--type2", "1^2 2^9",
                       "--event", "classify", "--samples", "200")
    assert code == 0
    events = [r["event"] for r in csv.DictReader(io.StringIO(out))]
    assert events[0] == "classify"
    assert "classify:symmetric" in events


def test_estimate_deterministic(capsys):
    args = ("estimate", "--n", "60", "--x", "1", "--y", "0.3", "--xp", "0.5", "--samples", "200", "--seed", "8")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args, "--threads", "2")
    assert first == second


def test_exact(capsys):
    code, out, _ = run(capsys, "exact", "--n", "4", "--type", "2^2", "--type2", "2^2", "--kmax", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("k,expected_count")
    assert lines[2].startswith("2,2/3")
    assert "exact_transitive=0.666667" in lines[-1]


def test_exact_json(capsys):
    code, out, _ = run(capsys, "exact", "--n", "6", "--type", "1^2 2^2", "--type2", "1^2 2^2", "--kmax", "3",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert [r["k"] for r in payload["rows"]] == [1, 2, 3]


def test_limit(capsys):
    code, out, _ = run(capsys, "limit", "--x", "2", "--y", "0", "--xp", "1", "--yp", "1")
    assert code == 0
    assert "probability 0.018316" in out
    assert "expected_N 4.000000" in out


def test_limit_edge(capsys):
    code, out, _ = run(capsys, "limit", "--x", "inf", "--xp", "1")
    assert code == 0
    assert "probability 0.000000" in out and "expected_N inf" in out


def test_constants(capsys):
    code, out, _ = run(capsys, "constants")
    assert code == 0
    values = dict(line.rsplit(" ", 1) for line in out.splitlines())
    assert values["generation_constant"] == "0.688904"
    assert values["P(G=A_n)"] == "0.172226"
    assert values["P(G=S_n)"] == "0.516678"
    assert values["b^2"] == "1.644934"
    assert values["a"] == "0.144338"


def test_partition(capsys):
    assert run(capsys, "partition", "--n", "100")[1].strip() == "190569292"
    assert run(capsys, "partition", "--n", "100", "--count")[1].strip() == "190569292"
    code, out, _ = run(capsys, "partition", "--n", "30", "--sample", "3", "--seed", "1")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "partition", "--n", "10000", "--tail", "1", "0")
    assert out.splitlines()[0] == "limit 0.277329"


def test_random_class(capsys):
    code, out, _ = run(capsys, "random-class", "--n", "8", "--samples", "200", "--seed", "2")
    assert code == 0
    events = [r["event"] for r in csv.DictReader(io.StringIO(out))]
    assert events == ["transitive", "contains_alternating", "alternating", "symmetric"]


@pytest.mark.parametrize("argv", [
    ("estimate", "--n", "100", "--x", "11"),
    ("estimate", "--n", "10", "--type", "1^3", "--type2", "10^1"),
    ("limit", "--x", "0", "--xp", "inf"),
    ("estimate", "--n", "2", "--type", "2^1", "--type2", "2^1", "--event", "classify"),
])
def test_exit_infeasible(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


@pytest.mark.parametrize("argv", [
    ("exact", "--n", "40", "--type", "1^6 2^2 3^10", "--type2", "1^4 2^18", "--kmax", "10"),
])
def test_exit_capacity(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3
    assert "cap" in err


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "permgen.cli", "limit", "--x", "1", "--xp", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "probability 0.367879"
