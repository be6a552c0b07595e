"""Command-line front end: outputs, exit codes, determinism, strict job files."""

import json
import subprocess
import sys

import pytest

from bispectral.cli import JobSpec, main
from bispectral.errors import InvalidParameter
from bispectral.examples import example_conditions


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pair_airy_one_point_latex(capsys):
    code, out, _ = run(capsys, "pair", "--example", "9.9", "--a", "1", "--lambda", "0", "--format", "latex")
    assert code == 0
    assert r"P &= \partial_x^{2} + \frac{-1}{x - 1}\partial_x + \frac{-x^{2} + x + 1}{x - 1}" in out


def test_pair_json_with_orders(capsys):
    code, out, _ = run(capsys, "pair", "--example", "9.3")
    data = json.loads(out)
    assert code == 0
    assert data["schema"] == "bispectral-pair/1"
    assert data["spectral"]["orders"] == [4, 6, 8, 10]
    assert data["spectral"]["minimal"]["order"] == 4


def test_pair_identity_from_spec_file(capsys, tmp_path):
    spec = tmp_path / "empty.json"
    spec.write_text(json.dumps(example_conditions("empty").to_json()))
    code, out, _ = run(capsys, "pair", "--spec", str(spec), "--format", "text")
    assert code == 0
    assert out.startswith("P = (1)\nQ = d^2\ng = 1\nf = z^2\n")


def test_rank_only(capsys):
    code, out, _ = run(capsys, "verify", "--example", "9.3", "--rank-only")
    assert code == 0
    assert json.loads(out) == {"schema": "rank/1", "orders": [4, 6, 8, 10], "rank": 2}


def test_involute_b_reports_law(capsys):
    code, out, _ = run(capsys, "involute", "b", "--example", "9.8", "--nu", "1/3", "--a", "2", "--lambda", "1")
    laws = json.loads(out)["laws"]
    assert code == 0
    assert laws["mu^N"] == "35/36" and laws["holds"] is True and laws["b"] == "-2/3"


def test_involute_b_airy_rank_three(capsys):
    code, out, _ = run(capsys, "involute", "b", "--example", "9.10", "--a", "2", "--alpha2", "3", "--lambda", "1")
    laws = json.loads(out)["laws"]
    assert code == 0 and laws["holds"] is True
    assert laws["rhs"] == "-13/8"


def test_involute_a_twice(capsys, tmp_path):
    first = tmp_path / "a1.json"
    second = tmp_path / "a2.json"
    assert run(capsys, "involute", "a", "--example", "9.3", "--out", str(first))[0] == 0
    assert run(capsys, "involute", "a", "--example", "9.3", "--out", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()
    back = tmp_path / "back.json"
    assert run(capsys, "involute", "a", "--plane", str(first), "--out", str(back))[0] == 0
    obj = json.loads(back.read_text())
    assert obj["origin"] == "a"


def test_pair_output_deterministic_and_round_trips(capsys, tmp_path):
    a, b = tmp_path / "p1.json", tmp_path / "p2.json"
    run(capsys, "pair", "--example", "9.5", "--out", str(a))
    run(capsys, "pair", "--example", "9.5", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "verify", "--pair", str(a))
    assert code == 0 and json.loads(out)["passed"] is True


def test_corrupted_fixture_fails_verification(capsys, tmp_path):
    good = tmp_path / "p.json"
    run(capsys, "pair", "--example", "9.5", "--out", str(good))
    data = json.loads(good.read_text())
    lead = data["Lambda"]["coeffs"][0][0]
    lead[0] = str(int(lead[0].split("/")[0]) + 1) + ("/" + lead[0].split("/")[1] if "/" in lead[0] else "")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, err = run(capsys, "verify", "--pair", str(bad))
    assert code == 3
    assert json.loads(err)["error"] == "IdentityFailed"
    assert json.loads(out)["passed"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["pair", "--example", "9.9", "--nu", "1"],
        ["pair", "--example", "nope"],
        ["pair", "--example", "9.3", "--a", "x/y"],
        ["pair"],
        ["pair", "--spec", "/does/not/exist.json"],
        ["involute", "a", "--pair", "/does/not/exist.json"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in json.loads(err)


def test_pipeline_failure_exit_2(capsys, tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"family": "bessel", "N": 2, "beta": ["0", "1"],
                                "conditions": [{"support": "zero", "terms": [{"i": 1, "b": "1"}, {"i": 2, "b": "1"}]}]}))
    code, _, err = run(capsys, "pair", "--spec", str(spec))
    assert code == 2 and json.loads(err)["error"] == "NotZNHomogeneous"


def test_job_file(capsys, tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "spectral", "example": "9.3", "format": "text"}))
    code, out, _ = run(capsys, "spectral", "--job", str(job))
    assert code == 0 and out.startswith("orders [4, 6, 8, 10] rank 2")
    job.write_text(json.dumps({"command": "spectral", "example": "9.3", "verbose": True}))
    code, _, err = run(capsys, "spectral", "--job", str(job))
    assert code == 2 and "verbose" in err


def test_jobspec_validation():
    with pytest.raises(InvalidParameter):
        JobSpec.from_json({"command": "pair"})
    with pytest.raises(InvalidParameter):
        JobSpec.from_json({"command": "pair", "example": "9.3", "format": "xml"})
    with pytest.raises(InvalidParameter):
        JobSpec.from_json({"command": "involute", "example": "9.3"})
    job = JobSpec.from_json({"command": "pair", "example": "9.3", "K": 9})
    assert job.K == 9 and job.max_order == 10


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bispectral", "verify", "--example", "n1", "--rank-only",
                           "--format", "text"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "rank = 1\n"
