import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "lacdisc.cli"]


def run_cli(*args, check=True):
    proc = subprocess.run([*CLI, *args], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"cli failed ({proc.returncode}): {proc.stderr}")
    return proc


def test_generate_decimal_and_bits(tmp_path):
    out = run_cli("generate", "--d", "2", "--n", "3", "--h-precision", "8",
                  "--seed", "11").stdout
    lines = out.strip().splitlines()
    assert lines[0] == "n,x1,x2"
    assert len(lines) == 4
    bits = run_cli("generate", "--d", "1", "--n", "2", "--h-precision", "6",
                   "--seed", "11", "--format", "bits").stdout
    cell = bits.strip().splitlines()[1].split(",")[1]
    assert len(cell) == 6 and set(cell) <= {"0", "1"}


def test_generate_round_trip_through_disc(tmp_path):
    csv_path = tmp_path / "points.csv"
    run_cli("generate", "--d", "2", "--n", "32", "--h-precision", "12",
            "--seed", "4", "--out", str(csv_path))
    from_file = json.loads(run_cli("disc", "--input", str(csv_path),
                                   "--method", "exact").stdout)
    direct = json.loads(run_cli("disc", "--d", "2", "--n", "32",
                                "--h-precision", "12", "--seed", "4",
                                "--method", "exact").stdout)
    assert from_file["dstar_exact"] == direct["dstar_exact"]


def test_disc_bracket_method():
    payload = json.loads(run_cli("disc", "--d", "2", "--n", "256",
                                 "--h-precision", "16", "--seed", "1",
                                 "--method", "brackets", "--delta", "1/32").stdout)
    assert payload["method"] == "brackets"
    assert payload["lower"] <= payload["upper"]
    assert payload["upper"] - payload["lower"] <= 1 / 32 + 1e-12


def test_cover_snap_output():
    payload = json.loads(run_cli("cover", "--d", "2", "--h", "3", "--snap",
                                 "--probe", "2000").stdout)
    assert payload["all_probes_covered"] is True
    assert payload["corner_denominator"] == 2 ** (3 + 2 + 1)
    assert payload["max_probe_weight_float"] <= 1 / 8


def test_bound_variants():
    stated = json.loads(run_cli("bound", "--d", "2", "--n", "65536",
                                "--eps", "0.1").stdout)
    assert stated["bound"] == pytest.approx(0.52513, abs=1e-5)
    assert stated["vacuous"] is False
    hnww = json.loads(run_cli("bound", "--d", "2", "--n", "8",
                              "--variant", "hnww", "--c-abs", "1.0").stdout)
    assert hnww["bound"] == pytest.approx(0.5)


def test_audit_exit_code():
    proc = run_cli("audit")
    assert "overall: PASS" in proc.stdout
    assert proc.returncode == 0


def test_indep_subcommand():
    payload = json.loads(run_cli("indep", "--d", "1", "--h", "0", "--n", "1",
                                 "--n-prime", "3", "--box", "0:1/4").stdout)
    assert payload["independent"] is True
    assert payload["factorization_gap"] == "0"
    dependent = json.loads(run_cli("indep", "--d", "1", "--h", "0", "--n", "1",
                                   "--n-prime", "2", "--box", "0:1/4").stdout)
    assert dependent["factorization_gap"] == "1/16"


def test_verify_csv_determinism_across_workers(tmp_path):
    args = ("verify", "--d", "2", "--n", "256", "--trials", "4",
            "--h-precision", "16", "--eps", "0.5", "--method", "exact",
            "--seed", "13")
    one = tmp_path / "w1.csv"
    two = tmp_path / "w2.csv"
    run_cli(*args, "--workers", "1", "--out", str(one))
    run_cli(*args, "--workers", "2", "--out", str(two))
    assert one.read_bytes() == two.read_bytes()
    header = one.read_text().splitlines()[0]
    assert header == ("trial,seed,d,N,H,method,dstar_lower,dstar_upper,"
                      "bound_stated,bound_detailed,exceeded")


def test_verify_gate_passes_on_vacuous_regime():
    proc = run_cli("verify", "--d", "2", "--n", "256", "--trials", "3",
                   "--h-precision", "16", "--eps", "0.5", "--method", "exact",
                   "--gate")
    assert proc.returncode == 0


def test_verify_n_grid():
    out = run_cli("verify", "--d", "2", "--n-grid", "2^8..2^9", "--trials", "3",
                  "--h-precision", "16", "--eps", "0.5", "--method", "exact").stdout
    lines = out.strip().splitlines()
    assert lines[0].startswith("N,trials,median_normalized")
    assert len(lines) == 4  # header + 2 rows + drift flag


def test_usage_error_exit_code():
    proc = run_cli("disc", "--method", "exact", check=False)
    assert proc.returncode == 1
    missing = run_cli("bogus-command", check=False)
    assert missing.returncode == 1


def test_infeasible_exit_code():
    proc = run_cli("verify", "--d", "1", "--n", "64", "--trials", "1", check=False)
    assert proc.returncode == 2
