"""Command-line interface: subcommands, exit codes, emitted artifacts."""

import json

import pytest

from distilled_sensing import cli

BASE = [
    "--p", "256", "--num-nonzero", "4", "--snr", "16", "--trials", "3",
    "--master-seed", "1", "--workers", "1",
]


def _run_simulate(out_path, extra=()):
    return cli.main(["simulate", *BASE, *extra, "--out", str(out_path)])


class TestSimulate:
    def test_writes_csv_and_sidecar(self, tmp_path):
        out = tmp_path / "sim.csv"
        assert _run_simulate(out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,snr,trial,threshold,fdp,ndp,detected"
        assert len(lines) == 1 + 3 * 2  # trials x methods
        meta = json.loads((tmp_path / "sim.csv.meta.json").read_text())
        assert meta["command"] == "simulate"
        assert meta["config"]["p"] == 256
        assert meta["rows"] == 6

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert _run_simulate(a) == 0
        assert _run_simulate(b) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["simulate", *BASE, "--out", str(a)]) == 0
        argv = ["simulate", *BASE, "--out", str(b)]
        argv[argv.index("--workers") + 1] = "2"
        assert cli.main(argv) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable_output_fails_with_runtime_code(self, tmp_path):
        rc = _run_simulate(tmp_path / "no" / "such" / "dir.csv")
        assert rc == 1


class TestConfigFile:
    def test_flags_override_file(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps({"p": 256, "num_nonzero": 4, "snr": 16.0, "trials": 2})
        )
        out = tmp_path / "sim.csv"
        rc = cli.main([
            "simulate", "--config", str(cfg_path), "--trials", "3",
            "--master-seed", "1", "--workers", "1", "--out", str(out),
        ])
        assert rc == 0
        meta = json.loads((tmp_path / "sim.csv.meta.json").read_text())
        assert meta["config"]["trials"] == 3  # flag wins over file
        assert len(out.read_text().splitlines()) == 1 + 3 * 2

    def test_malformed_json_is_a_usage_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        rc = cli.main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o.csv")])
        assert rc == 2

    def test_missing_file_is_a_usage_error(self, tmp_path):
        rc = cli.main([
            "simulate", "--config", str(tmp_path / "nope.json"),
            "--out", str(tmp_path / "o.csv"),
        ])
        assert rc == 2

    def test_unknown_key_is_a_usage_error(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"p": 256, "num_nonzero": 4, "snr": 1.0, "bogus": 1}))
        rc = cli.main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "o.csv")])
        assert rc == 2


class TestUsageErrors:
    def test_invalid_dimension(self, tmp_path):
        rc = cli.main([
            "simulate", "--p", "1", "--num-nonzero", "0", "--snr", "1",
            "--out", str(tmp_path / "o.csv"),
        ])
        assert rc == 2

    def test_conflicting_sparsity_flags(self, tmp_path):
        rc = cli.main([
            "simulate", "--p", "256", "--beta", "0.5", "--num-nonzero", "4",
            "--snr", "1", "--out", str(tmp_path / "o.csv"),
        ])
        assert rc == 2

    def test_missing_out_flag(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["simulate", "--p", "256", "--num-nonzero", "4", "--snr", "1"])
        assert exc.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2


class TestSweep:
    def test_explicit_grid_row_count(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = cli.main([
            "sweep", *BASE, "--threshold-grid", "0.5,2,8", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,snr,trial,threshold,fdp,ndp,detected"
        assert len(lines) == 1 + 3 * 2 * 3  # trials x methods x grid

    def test_default_grid_row_count(self, tmp_path):
        out = tmp_path / "sweep.csv"
        argv = ["sweep", *BASE, "--out", str(out)]
        argv[argv.index("--trials") + 1] = "2"
        assert cli.main(argv) == 0
        assert len(out.read_text().splitlines()) == 1 + 2 * 2 * 200


class TestCalibrate:
    ARGS = [
        "--p", "1024", "--num-nonzero", "32", "--snr", "25", "--trials", "20",
        "--master-seed", "2", "--pilot-trials", "40", "--workers", "1",
    ]

    def test_writes_row_per_method(self, tmp_path):
        out = tmp_path / "cal.csv"
        rc = cli.main(["calibrate", *self.ARGS, "--target-fdr", "0.1", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,p,snr,calibrated_tau,fdr,ndr"
        assert len(lines) == 3
        meta = json.loads((tmp_path / "cal.csv.meta.json").read_text())
        assert set(meta["calibrations"]) == {"ds", "nonadaptive"}
        assert meta["target_fdr"] == 0.1

    def test_unreachable_target_warns_but_succeeds(self, tmp_path, capsys):
        out = tmp_path / "cal.csv"
        rc = cli.main([
            "calibrate", *self.ARGS, "--method", "ds", "--target-fdr", "0.9",
            "--out", str(out),
        ])
        assert rc == 0
        assert "unreachable" in capsys.readouterr().err
        meta = json.loads((tmp_path / "cal.csv.meta.json").read_text())
        assert meta["calibrations"]["ds"]["flagged"] is True


class TestSnrSweep:
    def test_rows_per_method_and_snr(self, tmp_path):
        out = tmp_path / "snr.csv"
        rc = cli.main([
            "snr-sweep", "--p", "1024", "--num-nonzero", "32", "--snr", "1",
            "--snr-list", "25,9",
            "--trials", "15", "--master-seed", "3", "--pilot-trials", "30",
            "--workers", "1", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,p,snr,calibrated_tau,fdr,ndr"
        assert len(lines) == 1 + 2 * 2
        assert [ln.split(",")[0] for ln in lines[1:]] == [
            "ds", "ds", "nonadaptive", "nonadaptive"
        ]


class TestPhaseTransition:
    def test_writes_row_per_exponent(self, tmp_path):
        out = tmp_path / "phase.csv"
        rc = cli.main([
            "phase-transition", "--p", "1024", "--beta", "0.5", "--r-list", "0.25,1.2",
            "--trials", "10", "--master-seed", "4", "--workers", "1", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "r,median_fdp,median_ndp"
        assert len(lines) == 3

    def test_transition_point_is_a_usage_error(self, tmp_path):
        rc = cli.main([
            "phase-transition", "--p", "1024", "--beta", "0.5", "--r-list", "0.5",
            "--trials", "5", "--out", str(tmp_path / "o.csv"),
        ])
        assert rc == 2


class TestBoundary:
    def test_curve_rows(self, tmp_path):
        out = tmp_path / "boundary.csv"
        assert cli.main(["boundary", "--points", "100", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "beta,rho"
        assert len(lines) == 100  # header + 99 grid rows
        assert "0.5,0" in lines
        assert "0.75,0.25" in lines

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["boundary", "--out", str(a)])
        cli.main(["boundary", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_degenerate_grid_is_a_usage_error(self, tmp_path):
        assert cli.main(["boundary", "--points", "1", "--out", str(tmp_path / "o.csv")]) == 2


class TestValidateLemmas:
    def test_prints_a_line_per_check(self, tmp_path, capsys):
        out = tmp_path / "lemmas.csv"
        rc = cli.main(["validate-lemmas", "--master-seed", "0", "--out", str(out)])
        assert rc == 0
        printed = [ln for ln in capsys.readouterr().out.splitlines() if ln]
        assert len(printed) == 9
        assert all(ln.startswith("PASS ") for ln in printed)
        lines = out.read_text().splitlines()
        assert lines[0] == "lemma,params,bound,empirical,pass"
        assert len(lines) == 10

    def test_out_flag_is_optional(self, capsys):
        assert cli.main(["validate-lemmas", "--master-seed", "0"]) == 0
        capsys.readouterr()
