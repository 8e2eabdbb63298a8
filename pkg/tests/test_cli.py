import numpy as np
import pytest

from onebitcs.cli import main
from onebitcs.problem_io import MAGIC, load_problem


def run(*argv):
    return main([str(a) for a in argv])


class TestGenerate:
    def test_writes_container(self, tmp_path):
        out = tmp_path / "p.ob1t"
        code = run("generate", "--m", 20, "--n", 8, "--s", 2, "--seed", 5, "--out", out)
        assert code == 0
        assert out.read_bytes()[:4] == MAGIC
        problem = load_problem(out)
        assert problem.psi.shape == (20, 8)

    def test_same_config_bytes_identical(self, tmp_path):
        a, b = tmp_path / "a.ob1t", tmp_path / "b.ob1t"
        for out in (a, b):
            assert run("generate", "--m", 15, "--n", 6, "--s", 2, "--seed", 1, "--out", out) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_csv_export(self, tmp_path):
        out = tmp_path / "p.ob1t"
        csv_out = tmp_path / "p.csv"
        assert run("generate", "--m", 10, "--n", 4, "--s", 1, "--out", out, "--csv-out", csv_out) == 0
        assert csv_out.read_text().splitlines()[0].startswith("y,psi_0")

    def test_unwritable_path_is_io_error(self, tmp_path):
        code = run("generate", "--m", 10, "--n", 4, "--s", 1, "--out", tmp_path / "no" / "p.ob1t")
        assert code == 3


class TestDecode:
    def test_decode_ls_on_problem_file(self, tmp_path):
        problem_file = tmp_path / "p.ob1t"
        run("generate", "--m", 50, "--n", 5, "--s", 5, "--sigma", 0.1, "--out", problem_file)
        report_file = tmp_path / "report.csv"
        assert run("decode-ls", "--problem", problem_file, "--out", report_file) == 0
        header, row = report_file.read_text().splitlines()
        assert header.split(",")[:3] == ["err_raw", "err_descaled", "err_optscale"]
        assert header.split(",")[-1] == "gram_condition"
        assert len(row.split(",")) == len(header.split(","))

    def test_decode_l1_inline_generation(self, tmp_path):
        report_file = tmp_path / "report.csv"
        code = run(
            "decode-l1", "--m", 80, "--n", 160, "--s", 2, "--sigma", 0.05,
            "--seed", 3, "--out", report_file,
        )
        assert code == 0
        header = report_file.read_text().splitlines()[0].split(",")
        assert "ell_bar" in header and "lambda_hat" in header

    def test_decode_ls_underdetermined_is_usage_error(self):
        assert run("decode-ls", "--m", 5, "--n", 10, "--s", 2) == 2

    def test_missing_problem_file_is_io_error(self, tmp_path):
        assert run("decode-ls", "--problem", tmp_path / "absent.ob1t") == 3


def test_path_subcommand(tmp_path):
    out = tmp_path / "path.csv"
    code = run("path", "--m", 60, "--n", 120, "--s", 2, "--seed", 2, "--out", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,lambda,support_size,kkt_residual,converged,skipped"
    assert len(lines) > 2


class TestExperiment:
    def test_requires_out(self):
        assert run("experiment", "--m", 20, "--n", 10, "--s", 1, "--decoder", "ls") == 2

    def test_custom_runs_and_is_thread_invariant(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = [
            "experiment", "--m", 60, "--n", 20, "--s", 2, "--sigma", 0.1,
            "--decoder", "ls", "--reps", 3, "--seed", 7,
        ]
        assert run(*base, "--threads", 1, "--out", a) == 0
        assert run(*base, "--threads", 3, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_scenario_preset(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run(
            "experiment", "--scenario", "ls-noise-sweep", "--reps", 1, "--out", out
        )
        assert code == 0
        text = out.read_text()
        assert "ls-noise-sweep" in text
        assert text.count("\nagg,") == 11  # one aggregate row per sweep value

    def test_unknown_scenario_is_usage_error(self, tmp_path):
        assert run("experiment", "--scenario", "nope", "--out", tmp_path / "x.csv") == 2

    def test_large_scenario_gated(self, tmp_path):
        assert (
            run("experiment", "--scenario", "l1-large-baseline", "--out", tmp_path / "x.csv")
            == 2
        )

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("m = 40\nn = 12\ns = 2\ndecoder = ls\nreps = 2\nseed = 1\n")
        out = tmp_path / "cfg.csv"
        assert run("experiment", "--config", cfg, "--out", out) == 0
        assert out.exists()


class TestCheckTheory:
    def test_population_identity_passes(self, tmp_path):
        out = tmp_path / "checks.csv"
        code = run(
            "check-theory", "population-identity", "--mc-samples", 50000, "--out", out
        )
        assert code == 0
        assert out.read_text().splitlines()[1].startswith("population-identity,1,")

    def test_starved_sample_fails_with_exit_one(self):
        # 200 samples cannot hit the 0.05 tolerance; exit code must be 1
        assert run("check-theory", "population-identity", "--mc-samples", 200) == 1

    def test_unknown_check_rejected_by_argparse(self):
        with pytest.raises(SystemExit):
            run("check-theory", "bogus")
