import csv
import inspect
import io
import json
import subprocess
import sys

import pytest

import hspkit.battery as battery
import hspkit.solvers as solvers
from hspkit.bench import (
    CSV_COLUMNS,
    SuiteConfig,
    parse_family,
    records_to_csv,
    records_to_json,
    run_one,
    run_suite,
    summarize,
)
from hspkit.cli import main
from hspkit.group import parse_signature


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_solve_identify_cyclic(capsys):
    code, out, _ = run_cli(capsys, "solve", "--group", "2^3", "--gens", "(2)", "--algo", "identify-cyclic")
    assert code == 0
    (row,) = rows(out)
    assert row["result"] == "{(0),(2),(4),(6)}"
    assert row["queries_distinct"] == "3"
    assert row["pass"] == "true"
    assert list(row) == list(CSV_COLUMNS)


def test_solve_identify_abelian_json(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--group", "2,2", "--gens", "(1,1)", "--algo", "identify-abelian", "--format", "json"
    )
    assert code == 0
    (row,) = json.loads(out)
    assert row["result"] == "{(0,0),(1,1)}"
    assert row["queries_distinct"] == 4
    assert list(row) == list(CSV_COLUMNS)


def test_solve_decide_trivial(capsys):
    code, out, _ = run_cli(capsys, "solve", "--group", "2,2", "--gens", "", "--algo", "decide-abelian")
    assert code == 0
    assert rows(out)[0]["result"] == "Trivial"
    assert rows(out)[0]["lower_bound"] == "n/a"


def test_solve_from_instance_file(tmp_path, capsys):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"sig": "2^2,3", "generators": ["(2,0)"]}))
    out_path = tmp_path / "rec.csv"
    code, out, _ = run_cli(
        capsys, "solve", "--instance-file", str(path), "--algo", "brute-force", "--out", str(out_path)
    )
    assert code == 0 and out == ""
    (row,) = rows(out_path.read_text())
    assert row["result"] == "{(0,0),(2,0)}"
    assert row["queries_distinct"] == "12"


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--group", "4^2", "--algo", "decide-abelian"],
        ["solve", "--group", "2,2", "--algo", "decide-cyclic"],
        ["solve", "--group", "2,2", "--gens", "(1)", "--algo", "decide-abelian"],
        ["solve", "--algo", "decide-abelian"],
        ["bench", "--group", "2^9"],
        ["bench", "--family", "2:5"],
        ["solve", "--instance-file", "/nonexistent/x.json", "--algo", "decide-abelian"],
    ],
)
def test_cli_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert err.startswith("hspkit: error:")


def test_solve_failing_audit_exits_1(capsys):
    code, out, _ = run_cli(
        capsys, "solve", "--group", "2,2,2", "--algo", "identify-abelian", "--identify-scale", "0.01"
    )
    assert code == 1
    assert rows(out)[0]["pass"] == "false"


def test_cap_flag_and_crosscheck_skip(capsys):
    code, out, _ = run_cli(capsys, "--cap", "4", "solve", "--group", "2,2", "--algo", "decide-abelian")
    assert code == 0
    code, _, err = run_cli(capsys, "--cap", "4", "solve", "--group", "2^3", "--algo", "identify-abelian")
    assert code == 2 and "cap" in err


def test_run_one_carries_crosscheck_for_identification():
    rec = run_one(parse_signature("2^2,3"), [(2, 0)], "identify-abelian")
    assert rec.crosscheck is True and rec.passed
    assert rec.queries_raw >= rec.queries_distinct


def test_bench_is_deterministic():
    config = dict(signatures=["2^2,3", "3,3"], mode="random-subgroups", count=4, seed=11)
    a = records_to_csv(run_suite(SuiteConfig(**config)), include_ms=False)
    b = records_to_csv(run_suite(SuiteConfig(**config)), include_ms=False)
    assert a == b
    c = records_to_csv(run_suite(SuiteConfig(**config), jobs=2), include_ms=False)
    assert a == c
    assert "ms" not in a.splitlines()[0].split(",")


def test_json_and_csv_agree():
    records = run_suite(SuiteConfig(signatures=["2,2"], algorithms=["identify-abelian", "brute-force"]))
    as_json = json.loads(records_to_json(records))
    as_csv = rows(records_to_csv(records))
    assert [list(r) for r in as_json] == [list(CSV_COLUMNS)] * len(records)
    assert [r["result"] for r in as_json] == [r["result"] for r in as_csv]
    assert len(records) == 2 * 5


def test_config_errors():
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(signatures=["2,2"], algorithms=[]))
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(signatures=[]))
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(signatures=["2,2"], mode="some"))
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(signatures=["2^9"]))
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(signatures=["2^9"], mode="random-subgroups", count=0))


def test_parse_family():
    assert parse_family("2:2-4") == ["2,2", "2,2,2", "2,2,2,2"]
    for bad in ["2", "2:4", "2:5-3", "2:0-2"]:
        with pytest.raises(ValueError):
            parse_family(bad)


def test_family_scaling_exponent():
    records = run_suite(
        SuiteConfig(signatures=parse_family("2:4-10"), mode="trivial-only", algorithms=["identify-abelian"])
    )
    lines = []
    assert summarize(records, write=lines.append)
    (fit,) = [l for l in lines if "scaling exponent" in l]
    assert 0.45 <= float(fit.rsplit(" ", 1)[1]) <= 0.6


def test_small_group_decision_agreement():
    records = run_suite(SuiteConfig(signatures=["2^2,3"], algorithms=["decide-abelian"]))
    assert len(records) == 6
    assert all(r.crosscheck for r in records)
    assert all(r.passed for r in records)


def test_summary_flags_lower_bound_violation():
    records = run_suite(SuiteConfig(signatures=["2,2,2,2"], algorithms=["identify-abelian"]))
    lines = []
    assert summarize(records, write=lines.append)
    for r in records:
        if r.orderH == 4:
            r.queries_distinct = 1
    assert not summarize(records, write=lambda s: None)


def test_verify_passes(capsys):
    code, out, _ = run_cli(capsys, "verify")
    assert code == 0
    assert len(out.splitlines()) == 5
    assert all(line.startswith("[PASS]") and " 0 failed" in line for line in out.splitlines())


def test_verify_reports_skips_under_a_low_cap(capsys):
    code, out, _ = run_cli(capsys, "--cap", "16", "verify")
    assert code == 0
    for line in out.splitlines():
        skipped = int(line.split(", ")[2].split()[0])
        assert skipped > 0, line


def test_findpair_battery_catches_inverted_pivot(monkeypatch):
    src = inspect.getsource(solvers.find_pair)
    good = "pivot = max(m for m in range(l) if suffix[m] >= s)"
    assert good in src
    broken_src = src.replace(good, "pivot = max((m for m in range(l) if suffix[m] < s), default=l - 1)")
    namespace = dict(vars(solvers))
    exec(broken_src, namespace)
    monkeypatch.setattr(battery, "find_pair", namespace["find_pair"])
    res = battery.findpair_battery(max_size=200)
    assert not res.ok
    assert res.first_failure.startswith("(sig=") and "v=" in res.first_failure and "r=" in res.first_failure


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hspkit", "solve", "--group", "3^2", "--gens", "(3)", "--algo", "decide-cyclic"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert rows(proc.stdout)[0]["result"] == "NonTrivial"
