import csv
import io
import json
import subprocess
import sys

import pytest

from udisc import cli


def run(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


BASE = ["--na", "1", "--nb", "1", "--nc", "1", "-d", "2", "--eta1", "0.5"]


def test_psp_orthogonal_json(capsys):
    code, out, _ = run(["psp", *BASE, "--s", "0"], capsys)
    assert code == cli.EXIT_OK
    rec = json.loads(out)
    assert rec["total"] == pytest.approx(1 / 3, abs=1e-11)
    assert [b["k"] for b in rec["per_block"]] == [0, 0, 1, 1]
    assert rec["blocks"][0]["overlap_O"] == 0.5
    assert rec["blocks"][0]["regime"] == "interior"
    assert list(rec) == [
        "command", "config", "priors", "overlap", "coeff_a", "coeff_b", "coeff_c", "blocks", "per_block", "total",
    ]


def test_psp_identical_states(capsys):
    code, out, _ = run(["psp", *BASE, "--s", "1"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["total"] == 0.0
    assert rec["coeff_a"] is None


def test_psp_swap_notice(capsys):
    code, out, err = run(["psp", "--na", "2", "--nb", "1", "--nc", "3", "--eta1", "0.3", "--s", "0.4"], capsys)
    assert code == 0
    assert "swapped" in err
    rec = json.loads(out)
    assert rec["config"]["swapped"] is True
    assert (rec["config"]["n_A"], rec["config"]["n_C"]) == (3, 2)


def test_psp_csv(capsys):
    code, out, _ = run(["psp", *BASE, "--beta", "1.0", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == list(cli.SWEEP_COLUMNS)
    assert len(rows) == 2
    assert "\r" not in out


@pytest.mark.parametrize(
    "argv",
    [
        ["psp", *BASE],  # missing overlap
        ["psp", *BASE, "--s", "0.1", "--beta", "0.2"],
        ["psp", *BASE, "--s", "1.5"],
        ["psp", "--na", "0", "--nb", "1", "--nc", "1", "--s", "0.2"],
        ["psp", *BASE, "--s", "0.2", "--precision", "0"],
        ["sweep", *BASE, "--s-grid", "0:2:5"],
        ["sweep", *BASE, "--s-grid", "0:1"],
        ["limits", "--na", "3", "--nb", "1", "--nc", "1", "--s", "0.5"],
        ["verify", "--na", "1", "--nb", "1", "--nc", "1", "-d", "3"],
        ["bogus"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == cli.EXIT_USAGE


@pytest.mark.parametrize("cmd", [["psp", "--s", "0.3"], ["limits", "--s", "0.3"], ["asp", "--samples", "10"]])
def test_degenerate_prior_exit(cmd, capsys):
    argv = [cmd[0], "--na", "1", "--nb", "1", "--nc", "1", "--eta1", "0", *cmd[1:]]
    code, _, err = run(argv, capsys)
    assert code == cli.EXIT_DEGENERATE
    assert "degenerate" in err


def test_verify_resource_exit(capsys, monkeypatch):
    code, _, _ = run(["verify", "--na", "5", "--nb", "5", "--nc", "5"], capsys)
    assert code == cli.EXIT_RESOURCE
    code, _, _ = run(["verify", *BASE, "--max-copies", "2"], capsys)
    assert code == cli.EXIT_RESOURCE
    monkeypatch.setenv("UDISC_MAX_DIM", "4")
    code, _, _ = run(["verify", *BASE], capsys)
    assert code == cli.EXIT_RESOURCE


def test_verify_failure_exit(capsys, monkeypatch):
    from udisc import oracle

    real = oracle.verify_config

    def broken(*a, **kw):
        res = real(*a, **kw)
        res[0].residual = 1.0
        return res

    monkeypatch.setattr(oracle, "verify_config", broken)
    code, out, _ = run(["verify", *BASE, "--samples", "3"], capsys)
    assert code == cli.EXIT_VERIFY
    assert json.loads(out)["passed"] is False


def test_verify_single_copies(capsys):
    code, out, _ = run(["verify", *BASE, "--samples", "5"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["passed"] is True
    assert all(c["residual"] <= c["tolerance"] for c in rec["checks"])
    names = {c["name"] for c in rec["checks"]}
    assert {"povm_positivity", "unambiguity", "jordan_dual_path", "psp_equivalence", "q_scan_optimality", "born_frequencies"} <= names


def test_verify_unequal_programs_heading(capsys):
    code, out, _ = run(["verify", "--na", "3", "--nb", "1", "--nc", "1", "--samples", "3", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    heads = {r["check"]: r["heading"] for r in rows}
    assert heads["psp_equivalence"] == "reconstruction-dependent"
    assert heads["povm_positivity"] == "core"
    assert all(r["status"] == "pass" for r in rows)


def test_sweep_rows_and_endpoints(capsys):
    argv = ["sweep", "--na", "2", "--nb", "1", "--nc", "2", "--s-grid", "0:1:11", "--eta-grid", "0.2,0.5,0.8", "--format", "csv"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11 * 3
    # s-major ordering
    assert [float(r["eta1"]) for r in rows[:3]] == [0.2, 0.5, 0.8]
    assert float(rows[0]["s"]) == 0.0 and float(rows[-1]["s"]) == 1.0
    for i in range(3):
        first, last = rows[i], rows[-3 + i]
        assert float(last["total"]) == 0.0
        column = [float(r["total"]) for r in rows[i::3]]
        assert float(first["total"]) == max(column)
        assert all(x >= y for x, y in zip(column, column[1:]))


def test_sweep_beta_grid_json(capsys):
    code, out, _ = run(["sweep", *BASE, "--beta-grid", "0,1.5707963267948966,3.141592653589793"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["columns"] == list(cli.SWEEP_COLUMNS)
    assert len(rec["rows"]) == 3


def test_sweep_oversize_grid(capsys):
    code, _, _ = run(["sweep", *BASE, "--s-grid", "0:1:2000", "--eta-grid", "0.1:0.9:600"], capsys)
    assert code == cli.EXIT_RESOURCE


def test_limits_output(capsys):
    code, out, _ = run(["limits", "--na", "2", "--nb", "8", "--nc", "2", "--s", "0.6"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["data_limit"] == pytest.approx(1 - 0.36**2, abs=1e-11)
    assert 0 < rec["psp"] < rec["data_limit"]


def test_asp_output(capsys):
    code, out, _ = run(["asp", *BASE, "--samples", "2000", "--seed", "4"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert 0 < rec["mean"] < 1 and rec["stderr"] > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["psp", *BASE, "--s", "0.37"],
        ["sweep", *BASE, "--s-grid", "0:1:7", "--eta-grid", "0.3,0.6"],
        ["limits", *BASE, "--beta", "2.0"],
        ["asp", *BASE, "--samples", "500", "--seed", "11"],
        ["verify", *BASE, "--samples", "3", "--seed", "2"],
    ],
)
def test_output_byte_identical_and_round_trips(argv, capsys):
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second
    obj = json.loads(first)
    assert cli.dump_json(obj) == first


def test_precision_controls_digits(capsys):
    _, out, _ = run(["psp", *BASE, "--s", "0.37", "--precision", "4"], capsys)
    total = json.loads(out)["total"]
    assert total == float(f"{total:.4g}")


def test_parse_grid():
    assert cli.parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert cli.parse_grid("0.1, 0.2") == [0.1, 0.2]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "udisc", "psp", *BASE, "--s", "0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "psp"
