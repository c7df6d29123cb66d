import csv
import io
import json
import math
import subprocess
import sys

import pytest

from cesaro_bell import cli

from oracles import cesaro_real_double


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bell_triangle(capsys):
    code, out, _ = run(capsys, "bell", "--n", "5", "--method", "triangle")
    assert code == 0 and out.strip() == "52"


@pytest.mark.parametrize("method", ["triangle", "stirling-sum", "inclusion-exclusion", "dobinski"])
def test_bell_methods_agree(capsys, method):
    code, out, _ = run(capsys, "bell", "--n", "12", "--method", method, "--format", "json")
    assert code == 0
    assert json.loads(out)["results"][0]["value"] == "4213597"


def test_bell_cesaro_json(capsys):
    code, out, _ = run(capsys, "bell", "--n", "3", "--method", "cesaro", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["command"] == "bell"
    res = doc["results"][0]
    assert res["rounded"] == "5" and res["certified"] is True
    assert isinstance(res["estimate"], str)


def test_bell_cesaro_human_fields(capsys):
    code, out, _ = run(capsys, "bell", "--n", "6", "--method", "cesaro")
    assert code == 0
    assert out.splitlines()[0] == "203"
    for field in ("estimate", "certified: true", "nodes_used", "working_bits"):
        assert field in out


def test_bell_cesaro_n0_rejected(capsys):
    code, _, err = run(capsys, "bell", "--n", "0", "--method", "cesaro")
    assert code == 1 and "n >= 1" in err


def test_bell_uncertified_exit(capsys, monkeypatch):
    from cesaro_bell import formulas

    real = formulas.bell_cesaro

    def fake(*args, **kwargs):
        est = real(*args, **kwargs)
        return formulas.CesaroEstimate(est.estimate, est.rounded, False, est.quadrature)

    monkeypatch.setattr(cli.formulas, "bell_cesaro", fake)
    code, _, _ = run(capsys, "bell", "--n", "3", "--method", "cesaro")
    assert code == 2


def test_unknown_method_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["bell", "--n", "3", "--method", "magic"])
    assert info.value.code == 1


def test_bell_csv(capsys):
    code, out, _ = run(capsys, "bell", "--n", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["value"] == "15"


def test_verify_all_pass(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "6", "--jobs", "1")
    assert code == 0 and "0 failed" in out


def test_verify_only_filter(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "6", "--only", "orthogonality", "--format", "json", "--jobs", "1")
    doc = json.loads(out)
    assert code == 0
    assert {r["identity"] for r in doc["results"]} == {"orthogonality"}
    assert len(doc["results"]) == 49


def test_verify_unknown_filter(capsys):
    code, _, err = run(capsys, "verify", "--only", "no-such-identity")
    assert code == 1 and "unknown identity" in err


def test_verify_failure_exit_3(capsys, monkeypatch):
    from cesaro_bell import verify

    def broken(n, k):
        return verify.VerificationReport("incl-excl", (n, k), "1", "2", "1", "0", False)

    monkeypatch.setitem(verify._CHECKS, "incl-excl", broken)
    code, _, _ = run(capsys, "verify", "--max-n", "2", "--only", "incl-excl", "--jobs", "1")
    assert code == 3


def test_verify_json_round_trip(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "3", "--format", "json", "--jobs", "1")
    doc = json.loads(out)
    again = json.dumps(doc, indent=2) + "\n"
    assert again == out
    first = doc["results"][0]
    assert set(first) >= {"identity", "parameters", "lhs", "rhs", "abs_residual", "tolerance", "pass",
                          "working_bits", "nodes_used"}
    assert all(isinstance(first[k], str) for k in ("lhs", "rhs", "abs_residual", "tolerance"))


def test_verify_csv_header(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "2", "--only", "typo", "--format", "csv", "--jobs", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2 and rows[0]["identity"] == "typo"


def test_dump_cesaro(capsys, tmp_path):
    path = tmp_path / "c.csv"
    code, _, _ = run(capsys, "dump", "--kind", "cesaro", "--n", "3", "--samples", "4", "--out", str(path))
    raw = path.read_bytes()
    assert code == 0 and b"\r" not in raw
    rows = list(csv.DictReader(io.StringIO(raw.decode("utf-8"))))
    assert len(rows) == 5 and float(rows[0]["value"]) == 0.0
    assert raw.startswith(b"theta,value\n")


def test_dump_sines_bounded(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "dump", "--kind", "sines", "--m", "2", "--n", "2", "--samples", "100", "--out", str(path))
    rows = list(csv.DictReader(path.open()))
    assert code == 0 and len(rows) == 101
    assert all(-1 <= float(r["value"]) <= 1 for r in rows)


def test_dump_matches_real_form_oracle(capsys):
    code, out, _ = run(capsys, "dump", "--kind", "cesaro", "--n", "1", "--samples", "16")
    rows = list(csv.DictReader(io.StringIO(out)))
    for i, row in enumerate(rows):
        t = math.pi * i / 16
        assert float(row["value"]) == pytest.approx(cesaro_real_double(1, t), abs=1e-14)


def test_dump_theta_is_k_pi_over_s(capsys):
    import mpmath

    code, out, _ = run(capsys, "dump", "--kind", "power", "--j", "2", "--n", "3", "--samples", "7")
    rows = list(csv.DictReader(io.StringIO(out)))
    with mpmath.workdps(40):
        for i, row in enumerate(rows):
            expected = mpmath.nstr(mpmath.pi * i / 7, 17, strip_zeros=False)
            assert mpmath.mpf(row["theta"]) == mpmath.mpf(expected)


@pytest.mark.parametrize(
    "argv",
    [
        ["dump", "--kind", "power", "--n", "3"],
        ["dump", "--kind", "sines", "--n", "3", "--j", "1", "--m", "2"],
        ["dump", "--kind", "cesaro", "--n", "3", "--k", "2"],
        ["dump", "--kind", "cesaro", "--n", "3", "--out", "/nonexistent/dir/x.csv"],
    ],
)
def test_dump_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cesaro_bell", "bell", "--n", "6"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "203"
