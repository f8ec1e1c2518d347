"""End-to-end tests of the command-line interface (in-process)."""

from __future__ import annotations

import csv
import json

import pytest

from covermech.cli import CSV_COLUMNS, main

HEADER = ",".join(CSV_COLUMNS)


def run_cli(*argv):
    return main(list(argv))


def test_csv_columns_are_pinned():
    assert CSV_COLUMNS == (
        "instance_id",
        "seed",
        "mechanism",
        "cost",
        "opt",
        "ratio",
        "total_payment",
        "nu",
        "frugality_ratio",
        "part_count",
        "wall_time",
    )


def test_gen_gadget_random_and_ufl(tmp_path, capsys):
    gadget = tmp_path / "gadget.json"
    assert run_cli("gen", "--gadget", "3", "--out", str(gadget)) == 0
    out = capsys.readouterr().out
    assert "wrote" in out and "n=6" in out
    data = json.loads(gadget.read_text())
    assert data["graph"]["n"] == 6
    assert len(data["graph"]["edges"]) == 6  # (u_i, v_j) for i != j, n = 3
    assert len(data["agents"]) == 3

    rnd = tmp_path / "rand.json"
    assert run_cli("gen", "--random", "n=8", "p=0.4", "r=2", "seed=3", "--out", str(rnd)) == 0
    blob = json.loads(rnd.read_text())
    assert blob["graph"]["n"] == 8

    ufl = tmp_path / "ufl.json"
    assert (
        run_cli("gen", "--ufl", "facilities=3", "clients=4", "seed=1", "--out", str(ufl)) == 0
    )
    ub = json.loads(ufl.read_text())
    assert len(ub["facilities"]) == 3 and ub["clients"] == 4


def test_gen_requires_a_source(tmp_path):
    with pytest.raises(SystemExit):
        run_cli("gen", "--out", str(tmp_path / "x.json"))


def test_run_writes_sorted_byte_identical_csv(tmp_path):
    inst = tmp_path / "i.json"
    assert run_cli("gen", "--random", "n=9", "p=0.35", "r=2", "seed=5", "--out", str(inst)) == 0
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = (
        "run",
        "--mechanism",
        "ax",
        "--instances",
        str(inst),
        "--seeds",
        "0-2",
        "--out",
    )
    assert run_cli(*args, str(out1)) == 0
    assert run_cli(*args, str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().splitlines()
    assert lines[0] == HEADER
    rows = list(csv.DictReader(out1.read_text().splitlines()))
    assert len(rows) == 3
    assert rows == sorted(rows, key=lambda r: (r["instance_id"], int(r["seed"])))
    for row in rows:
        assert row["mechanism"] == "ax"
        assert float(row["ratio"]) >= 1.0 - 1e-9
        assert row["wall_time"] == ""  # timings are opt-in


def test_run_blanks_opt_when_exact_oracle_is_capped(tmp_path):
    inst = tmp_path / "big.json"
    assert run_cli("gen", "--random", "n=30", "p=0.15", "r=2", "seed=4", "--out", str(inst)) == 0
    out = tmp_path / "big.csv"
    assert (
        run_cli("run", "--mechanism", "bx", "--instances", str(inst), "--out", str(out)) == 0
    )
    row = next(csv.DictReader(out.read_text().splitlines()))
    assert row["opt"] == "" and row["ratio"] == ""
    assert row["nu"] == ""  # benchmark needs the capped exact cover too
    assert float(row["cost"]) >= 0.0


def test_run_timings_and_json_mirror(tmp_path):
    inst = tmp_path / "i.json"
    assert run_cli("gen", "--random", "n=7", "p=0.4", "r=2", "seed=6", "--out", str(inst)) == 0
    out = tmp_path / "t.csv"
    mirror = tmp_path / "t.json"
    assert (
        run_cli(
            "run",
            "--mechanism",
            "perron",
            "--instances",
            str(inst),
            "--out",
            str(out),
            "--json",
            str(mirror),
            "--timings",
        )
        == 0
    )
    row = next(csv.DictReader(out.read_text().splitlines()))
    assert float(row["wall_time"]) >= 0.0
    blob = json.loads(mirror.read_text())
    assert isinstance(blob, list) and len(blob) == 1
    assert blob[0]["mechanism"] == "perron"
    assert blob[0]["lambda_max"] > 0.0


def test_run_ufl_outputs_distribution(tmp_path):
    inst = tmp_path / "u.json"
    assert (
        run_cli("gen", "--ufl", "facilities=3", "clients=3", "seed=2", "--out", str(inst)) == 0
    )
    out = tmp_path / "u-run.json"
    assert run_cli("run-ufl", "--instance", str(inst), "--seed", "1", "--out", str(out)) == 0
    blob = json.loads(out.read_text())
    weights = [o["weight"] for o in blob["distribution"]]
    assert sum(weights) == pytest.approx(1.0, abs=1e-8)
    assert blob["realization"]["open_facilities"]
    fv = blob["fractional_value"]
    assert blob["expected_cost"] <= 2.0 * fv + 1e-6 * max(1.0, fv)

    out2 = tmp_path / "u-enum.json"
    assert (
        run_cli(
            "run-ufl",
            "--instance",
            str(inst),
            "--fallback-enum",
            "--out",
            str(out2),
        )
        == 0
    )
    blob2 = json.loads(out2.read_text())
    assert sum(o["weight"] for o in blob2["distribution"]) == pytest.approx(1.0, abs=1e-8)


def test_verify_threshold_mechanism_passes(tmp_path):
    report = tmp_path / "v.json"
    assert (
        run_cli(
            "verify",
            "--target",
            "ax",
            "--checks",
            "wmon,truthful,ir,approx,frugality",
            "--probes",
            "120",
            "--out",
            str(report),
        )
        == 0
    )
    blob = json.loads(report.read_text())
    assert blob["ok"] is True
    assert blob["checks"]["wmon"]["witnesses"] == []


def test_verify_baseline_fixture_modes(tmp_path):
    report = tmp_path / "f.json"
    assert (
        run_cli(
            "verify",
            "--target",
            "lp-rounding",
            "--checks",
            "wmon",
            "--probes",
            "4000",
            "--seed",
            "5",
            "--fixtures",
            "--out",
            str(report),
        )
        == 0
    )
    blob = json.loads(report.read_text())
    assert blob["ok"] is True
    assert blob["checks"]["wmon"]["witness_count"] > 0

    # Without --fixtures the same violation makes verification fail.
    assert (
        run_cli(
            "verify",
            "--target",
            "lp-rounding",
            "--checks",
            "wmon",
            "--probes",
            "4000",
            "--seed",
            "5",
        )
        == 1
    )


def test_verify_ufl_target(tmp_path):
    report = tmp_path / "vu.json"
    assert (
        run_cli(
            "verify",
            "--target",
            "ufl",
            "--checks",
            "truthful,ir,approx",
            "--probes",
            "200",
            "--out",
            str(report),
        )
        == 0
    )
    blob = json.loads(report.read_text())
    assert blob["ok"] is True


def test_frugality_command(tmp_path, capsys):
    inst = tmp_path / "g.json"
    assert run_cli("gen", "--gadget", "3", "--out", str(inst)) == 0
    capsys.readouterr()
    assert run_cli("frugality", "--instance", str(inst), "--mechanism", "ax") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["nu"] > 0.0
    assert payload["ratio"] >= 0.0
    assert payload["cover"]


def test_report_aggregates_csvs(tmp_path, capsys):
    inst = tmp_path / "i.json"
    assert run_cli("gen", "--random", "n=8", "p=0.4", "r=2", "seed=9", "--out", str(inst)) == 0
    out = tmp_path / "r.csv"
    assert (
        run_cli(
            "run",
            "--mechanism",
            "minor",
            "--instances",
            str(inst),
            "--seeds",
            "0,1",
            "--out",
            str(out),
        )
        == 0
    )
    capsys.readouterr()
    assert run_cli("report", "--inputs", str(out)) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["rows"] == 2
    assert blob["mechanisms"]["minor"]["rows"] == 2
    assert blob["mechanisms"]["minor"]["mean_ratio"] >= 1.0 - 1e-9


def test_bad_usage_exits_nonzero(tmp_path):
    with pytest.raises(SystemExit) as err:
        run_cli("run", "--out", str(tmp_path / "x.csv"))  # missing --mechanism
    assert err.value.code == 2
    with pytest.raises(SystemExit):
        run_cli("verify", "--target", "ax", "--checks", "nonsense")


def test_thread_env_does_not_change_output(tmp_path, monkeypatch):
    inst = tmp_path / "i.json"
    assert run_cli("gen", "--random", "n=9", "p=0.35", "r=2", "seed=11", "--out", str(inst)) == 0
    args = (
        "run",
        "--mechanism",
        "rdim",
        "--instances",
        str(inst),
        "--seeds",
        "0-3",
        "--out",
    )
    one = tmp_path / "one.csv"
    monkeypatch.setenv("COVERMECH_THREADS", "1")
    assert run_cli(*args, str(one)) == 0
    four = tmp_path / "four.csv"
    monkeypatch.setenv("COVERMECH_THREADS", "4")
    assert run_cli(*args, str(four)) == 0
    assert one.read_bytes() == four.read_bytes()
