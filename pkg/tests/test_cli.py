import csv
import io
import json
import math

import pytest

from twolin.cli import main


def invoke(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_efficient_case(self, capsys):
        code, out, err = invoke(capsys, "analyze", "--chi", "2",
                                "--rho", "0.5", "--ell", "0.5")
        assert code == 0
        rec = json.loads(out)
        assert rec["verdict"] == "Efficient"
        assert rec["classifier"] == pytest.approx(math.exp(-2), abs=1e-12)
        assert rec["gamma0"] == pytest.approx(1.0, abs=1e-12)
        assert rec["a"] == pytest.approx(math.exp(-1) + math.exp(-2), abs=1e-12)
        assert "# config" in err

    def test_near_threshold_reports_boundary_scale(self, capsys):
        code, out, _ = invoke(capsys, "analyze", "--chi", "2.5569",
                              "--rho", "0.5", "--ell", "0.5")
        rec = json.loads(out)
        assert abs(rec["classifier"]) < 1e-3
        assert rec["verdict"] in ("Efficient", "Inefficient", "Boundary")

    def test_invalid_params_exit_2(self, capsys):
        code, _, err = invoke(capsys, "analyze", "--chi", "-1",
                              "--rho", "0.5", "--ell", "0.5")
        assert code == 2
        assert "error" in err

    def test_degenerate_exit_2(self, capsys):
        code, _, err = invoke(capsys, "analyze", "--chi", "2",
                              "--rho", "1.0", "--ell", "0.5")
        assert code == 2

    def test_potential_flag(self, capsys):
        code, out, _ = invoke(capsys, "analyze", "--chi", "2", "--rho", "0.5",
                              "--ell", "0.5", "--potential")
        rec = json.loads(out)
        assert rec["w1"] == pytest.approx(0.5, abs=1e-12)
        assert rec["kappa2"] == pytest.approx(0.5, abs=1e-12)

    def test_csv_json_roundtrip(self, capsys):
        _, out_j, _ = invoke(capsys, "analyze", "--chi", "1.7", "--rho", "0.4",
                             "--ell", "0.6")
        _, out_c, _ = invoke(capsys, "analyze", "--chi", "1.7", "--rho", "0.4",
                             "--ell", "0.6", "--format", "csv")
        rec_j = json.loads(out_j)
        rows = list(csv.DictReader(io.StringIO(out_c)))
        assert len(rows) == 1
        rec_c = rows[0]
        assert set(rec_c) == set(rec_j)
        for k, v in rec_j.items():
            if isinstance(v, float):
                assert float(rec_c[k]) == pytest.approx(v, rel=1e-15)
            else:
                assert rec_c[k] == str(v)

    def test_unknown_flag_exit_2(self, capsys):
        code, _, _ = invoke(capsys, "analyze", "--chi", "2", "--rho", "0.5",
                            "--ell", "0.5", "--frobnicate")
        assert code == 2


class TestDrift:
    def test_exact_json(self, capsys):
        code, out, _ = invoke(capsys, "drift", "--chi", "1", "--rho", "1",
                              "--ell", "0.5", "--n", "4", "--xl", "1",
                              "--xr", "0")
        assert code == 0
        rec = json.loads(out)
        assert rec["d_L"] == pytest.approx(3 / 16, abs=1e-13)
        assert rec["d_R"] == pytest.approx(-3 / 32, abs=1e-13)
        assert rec["method"] == "exact"

    def test_methods_agree(self, capsys):
        base = ["--chi", "1", "--rho", "0.5", "--ell", "0.5", "--n", "10",
                "--xl", "2", "--xr", "3"]
        _, out_e, _ = invoke(capsys, "drift", *base, "--method", "exact")
        _, out_b, _ = invoke(capsys, "drift", *base, "--method", "brute")
        e, b = json.loads(out_e), json.loads(out_b)
        assert e["d_L"] == pytest.approx(b["d_L"], abs=1e-12)
        assert e["d_R"] == pytest.approx(b["d_R"], abs=1e-12)

    def test_mc_deterministic_under_seed(self, capsys):
        base = ["drift", "--chi", "2", "--rho", "0.5", "--ell", "0.5",
                "--n", "50", "--xl", "5", "--xr", "5", "--method", "mc",
                "--samples", "5000", "--seed", "9"]
        _, out1, _ = invoke(capsys, *base)
        _, out2, _ = invoke(capsys, *base)
        assert out1 == out2
        rec = json.loads(out1)
        assert rec["ci_halfwidth_0"] > 0

    def test_state_out_of_bounds_exit_2(self, capsys):
        code, _, _ = invoke(capsys, "drift", "--chi", "1", "--rho", "0.5",
                            "--ell", "0.5", "--n", "10", "--xl", "6",
                            "--xr", "0")
        assert code == 2


class TestRun:
    def test_trajectory_csv(self, capsys):
        code, out, _ = invoke(capsys, "run", "--chi", "1", "--rho", "0.5",
                              "--ell", "0.5", "--n", "64", "--budget", "20000",
                              "--record-every", "10", "--seed", "4")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,x_L,x_R"
        first = lines[1].split(",")
        assert first[0] == "0"
        last = lines[-1].split(",")
        assert (last[1], last[2]) == ("0", "0")

    def test_deterministic(self, capsys):
        args = ("run", "--chi", "1.5", "--rho", "0.4", "--ell", "0.5", "--n",
                "100", "--budget", "30000", "--seed", "8")
        _, out1, _ = invoke(capsys, *args)
        _, out2, _ = invoke(capsys, *args)
        assert out1 == out2

    def test_y_stat_column(self, capsys):
        code, out, _ = invoke(capsys, "run", "--chi", "2", "--rho", "0.5",
                              "--ell", "0.5", "--n", "64", "--budget", "5000",
                              "--seed", "2", "--y-stat", "--record-every", "7")
        lines = out.strip().splitlines()
        assert lines[0] == "t,x_L,x_R,Y"
        t, xl, xr, y = lines[1].split(",")
        assert float(y) == pytest.approx(int(xl) - 1.0 * int(xr), abs=1e-9)

    def test_batch_summary_json(self, capsys):
        code, out, _ = invoke(capsys, "run", "--chi", "1", "--rho", "0.5",
                              "--ell", "0.5", "--n", "100", "--budget",
                              "50000", "--trials", "8", "--seed", "3")
        rec = json.loads(out)
        assert rec["trials"] == 8
        assert rec["successes"] == 8
        assert len(rec["wilson95"]) == 2

    def test_explicit_start(self, capsys):
        code, out, _ = invoke(capsys, "run", "--chi", "1", "--rho", "0.5",
                              "--ell", "0.5", "--n", "20", "--budget", "10",
                              "--start", "explicit", "--xl", "3", "--xr", "4",
                              "--seed", "1")
        lines = out.strip().splitlines()
        assert lines[1].split(",")[1:] == ["3", "4"]

    def test_explicit_start_missing_args(self, capsys):
        code, _, err = invoke(capsys, "run", "--chi", "1", "--rho", "0.5",
                              "--ell", "0.5", "--n", "20", "--budget", "10",
                              "--start", "explicit")
        assert code == 2


class TestScan:
    def test_csv_and_summary(self, capsys, tmp_path):
        summary_path = tmp_path / "summary.json"
        code, out, _ = invoke(capsys, "scan", "--chi-grid", "1.0,4.0",
                              "--n-list", "100", "--trials", "5",
                              "--budget-mult", "20", "--seed", "6",
                              "--summary-out", str(summary_path))
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "chi,rho,ell,n,trial,seed,hit,generations"
        assert len(lines) == 1 + 10
        summ = json.loads(summary_path.read_text())
        assert len(summ["points"]) == 2

    def test_reproducible_byte_identical(self, capsys):
        args = ("scan", "--chi-grid", "1.0,2.0", "--n-list", "100",
                "--trials", "4", "--budget-mult", "15", "--seed", "77")
        _, out1, _ = invoke(capsys, *args)
        _, out2, _ = invoke(capsys, *args)
        assert out1 == out2

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(
            "# sweep settings\n"
            "chi_grid = 1.0,3.0\n"
            "n_list = 100\n"
            "trials = 4\n"
            "budget_mult = 15\n"
            "seed = 5\n"
        )
        code, out, _ = invoke(capsys, "scan", "--config", str(cfg))
        assert code == 0
        assert len(out.strip().splitlines()) == 1 + 8

    def test_cli_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("chi_grid = 1.0\nn_list = 100\ntrials = 4\nseed = 5\n")
        _, out, _ = invoke(capsys, "scan", "--config", str(cfg),
                           "--trials", "2")
        assert len(out.strip().splitlines()) == 1 + 2

    def test_bad_config_key_exit_2(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("nope = 1\n")
        code, _, err = invoke(capsys, "scan", "--config", str(cfg))
        assert code == 2

    def test_missing_grid_exit_2(self, capsys):
        code, _, _ = invoke(capsys, "scan", "--n-list", "100")
        assert code == 2

    def test_out_file(self, capsys, tmp_path):
        out_path = tmp_path / "rows.csv"
        code, out, _ = invoke(capsys, "scan", "--chi-grid", "1.0",
                              "--n-list", "100", "--trials", "3",
                              "--budget-mult", "15", "--out", str(out_path))
        assert code == 0
        assert out == ""
        assert out_path.read_text().startswith("chi,rho,ell,n,")


class TestVerify:
    def test_oracle_suite_passes(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--suite", "oracle")
        assert code == 0
        assert "PASS" in out
        assert "FAIL" not in out

    def test_injected_fault_detected(self, capsys):
        code, out, err = invoke(capsys, "verify", "--suite", "oracle",
                                "--inject-fault")
        assert code == 1
        assert "FAIL" in out
        assert "fault injection" in err

    def test_domination_suite(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--suite", "domination")
        assert code == 0
        assert "implication-n20" in out

    def test_potential_suite(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--suite", "potential")
        assert code == 0


def test_all_commands_echo_config(capsys):
    _, _, err = invoke(capsys, "analyze", "--chi", "1", "--rho", "0.5",
                       "--ell", "0.5")
    cfg = json.loads(err.split("# config ", 1)[1].splitlines()[0])
    assert cfg["chi"] == 1.0
    assert cfg["seed"] == 0
