from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from snfmom.cli import VerificationReport, run, run_cases


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_hankel_catalan_example():
    code, text = call("verify", "hankel", "--family", "catalan_star", "--n", "3")
    assert code == 0
    assert "claimed:   1, 1, q, q^3" in text
    code, js = call("verify", "hankel", "--family", "catalan_star", "--n", "3", "--format", "json")
    rep = json.loads(js)[0]
    assert rep["match"] is True
    assert rep["claimed"] == ["1", "1", "q", "q^3"]


def test_oracle_paths_example():
    code, text = call("oracle", "moment", "--family", "catalan_star", "--n", "6", "--method", "paths")
    assert code == 0 and text.strip() == "q^3 + q^2 + 2*q + 1"
    for method in ("recurrence", "closed"):
        assert call("oracle", "moment", "--family", "catalan_star", "--n", "6",
                    "--method", method)[1].strip() == "q^3 + q^2 + 2*q + 1"


def test_hankel_n0():
    code, js = call("verify", "hankel", "--family", "catalan_star", "--n", "0", "--format", "json")
    assert code == 0 and json.loads(js)[0]["claimed"] == ["1"]


def test_usage_errors_exit_1():
    assert call("verify", "hankel", "--n", "x")[0] == 1
    assert call("verify", "hankel", "--family", "motzkin", "--n", "3", "--shift", "even")[0] == 1
    assert call("verify", "young", "--shape", "2,1", "--anchor", "5,5")[0] == 1
    assert call("verify", "lattice", "--lattice", "boolean:3")[0] == 1
    assert call("bogus")[0] == 1


def test_budget_exit_3():
    code, _ = call("verify", "young", "--shape", "3,2,1", "--specialize", "q",
                   "--minor-gcd", "--max-minors", "3")
    assert code == 3
    code, _ = call("probe", "conjecture", "--which", "Jq", "--n", "3", "--max-minors", "5")
    assert code == 3
    code, _ = call("oracle", "moment", "--family", "charlier_ksz", "--n", "5",
                   "--method", "closed", "--max-enum", "4")
    assert code == 3


def test_mismatch_exit_2(monkeypatch):
    from snfmom import families
    monkeypatch.setattr(families, "corollary_diagonal", lambda name, n: [0] * (n + 1))
    code, js = call("verify", "hankel", "--family", "motzkin", "--n", "2", "--format", "json")
    assert code == 2
    assert json.loads(js)[0]["match"] is False


@pytest.mark.parametrize("argv", [
    ("verify", "hankel", "--symbolic", "--n", "2"),
    ("verify", "hankel", "--symbolic", "--n", "2", "--shift", "odd"),
    ("verify", "hankel", "--family", "motzkin", "--n", "3", "--shift", "1"),
    ("verify", "toeplitz", "--n", "4"),
    ("verify", "toeplitz", "--symbolic", "--n", "2"),
    ("verify", "lattice", "--lattice", "partitions:3"),
    ("verify", "lattice", "--lattice", "noncrossing:3"),
    ("verify", "lattice", "--lattice", "lickorish:3"),
    ("verify", "young", "--shape", "3,2,1"),
    ("verify", "young", "--shape", "2,1", "--anchor", "3,2"),
    ("verify", "young", "--random", "4"),
    ("verify", "vandermonde", "--variant", "a", "--n", "3"),
    ("verify", "vandermonde", "--variant", "b", "--n", "3"),
    ("probe", "conjecture", "--which", "lickorish", "--n", "2"),
    ("list", "families"),
])
def test_commands_pass(argv):
    assert call(*argv)[0] == 0


def test_json_round_trip_and_exit_codes():
    _, js = call("verify", "hankel", "--family", "all", "--n", "3", "--format", "json")
    data = json.loads(js)
    reports = [VerificationReport.from_dict(d) for d in data]
    assert [r.to_dict() for r in reports] == data
    ids = [r.case_id for r in reports]
    assert ids == sorted(ids)
    assert all(r.exit_code == 0 for r in reports)


def test_deterministic_seeded_campaign():
    a = json.loads(call("verify", "young", "--random", "5", "--seed", "9", "--format", "json")[1])
    b = json.loads(call("verify", "young", "--random", "5", "--seed", "9", "--format", "json")[1])
    strip = lambda rs: [{k: v for k, v in r.items() if k != "runtime_ms"} for r in rs]
    assert strip(a) == strip(b)


def test_parallel_ordering(monkeypatch):
    monkeypatch.setenv("SNFMOM_THREADS", "3")
    cases = [("hankel", {"family": f, "n": 2, "shift": "0"})
             for f in ("motzkin", "catalan_star", "hermite_pm")]
    reports = run_cases(cases)
    assert [r.case_id for r in reports] == sorted(r.case_id for r in reports)
    assert all(r.match for r in reports)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "snfmom.cli", "list", "families"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "catalan_star" in proc.stdout.split()


def test_family_all_even_shift_skips_nonzero_b0():
    code, js = call("verify", "hankel", "--family", "all", "--n", "2", "--shift", "even",
                    "--format", "json")
    assert code == 0
    assert [r["case_id"].split(":")[1] for r in json.loads(js)] == ["catalan_star", "hermite_pm"]
