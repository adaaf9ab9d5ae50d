import json
import math

import numpy as np
import pytest

from bipspec.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestMpEval:
    def test_five_symmetric_rows(self, capsys):
        code, out, _ = run(capsys, "mp-eval", "--alpha", "1", "--from", "-2",
                           "--to", "2", "--points", "5")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,density"
        assert len(lines) == 6
        dens = [float(line.split(",")[1]) for line in lines[1:]]
        assert dens == pytest.approx(dens[::-1])

    def test_density_value_at_one(self, capsys):
        code, out, _ = run(capsys, "mp-eval", "--alpha", "1", "--from", "1",
                           "--to", "2", "--points", "2")
        assert code == 0
        first = out.strip().splitlines()[1]
        assert float(first.split(",")[1]) == pytest.approx(math.sqrt(3) / (2 * math.pi))

    def test_alpha_below_one_is_argument_error(self, capsys):
        code, _, err = run(capsys, "mp-eval", "--alpha", "0.5", "--from", "0",
                           "--to", "1", "--points", "3")
        assert code == 2
        assert "aspect ratio" in err

    def test_bad_range_rejected(self, capsys):
        code, _, _ = run(capsys, "mp-eval", "--alpha", "1", "--from", "2",
                         "--to", "-2", "--points", "5")
        assert code == 2

    def test_cdf_column_monotone(self, capsys):
        code, out, _ = run(capsys, "mp-eval", "--alpha", "2", "--from", "-2",
                           "--to", "2", "--points", "9", "--cdf")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,density,cdf"
        cdfs = [float(line.split(",")[2]) for line in lines[1:]]
        assert cdfs == sorted(cdfs)


class TestSample:
    def test_er_p_zero_empty(self, capsys, tmp_path):
        out_path = tmp_path / "g.txt"
        code, out, _ = run(capsys, "sample", "--model", "er", "--m", "4", "--n", "5",
                           "--p", "0", "--seed", "1", "--out", str(out_path))
        assert code == 0
        assert out.strip() == "er 4 5 0 1"
        assert out_path.read_text() == "4 5\n"

    def test_regular_edge_count(self, capsys, tmp_path):
        for seed in (1, 2):
            out_path = tmp_path / f"r{seed}.txt"
            code, out, _ = run(capsys, "sample", "--model", "regular", "--m", "4",
                               "--n", "4", "--dl", "2", "--seed", str(seed),
                               "--out", str(out_path))
            assert code == 0
            assert out.strip() == f"regular 4 4 8 {seed}"

    def test_same_seed_byte_identical(self, capsys, tmp_path):
        paths = [tmp_path / "a.txt", tmp_path / "b.txt"]
        for p in paths:
            code, _, _ = run(capsys, "sample", "--model", "er", "--m", "10", "--n", "10",
                             "--p", "0.5", "--seed", "9", "--out", str(p))
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_missing_probability_is_argument_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "sample", "--model", "er", "--m", "4", "--n", "4",
                           "--seed", "1", "--out", str(tmp_path / "x.txt"))
        assert code == 2
        assert "--p" in err

    def test_infeasible_regular_spec_exit_three(self, capsys, tmp_path):
        code, _, err = run(capsys, "sample", "--model", "regular", "--m", "3", "--n", "2",
                           "--dl", "1", "--seed", "1", "--out", str(tmp_path / "x.txt"))
        assert code == 3
        assert "infeasible" in err

    def test_missing_seed_is_argument_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "sample", "--model", "er", "--m", "4", "--n", "4",
                           "--p", "0.5", "--out", str(tmp_path / "x.txt"))
        assert code == 2
        assert "--seed" in err


def write_k23(tmp_path):
    path = tmp_path / "k23.txt"
    path.write_text("3 2\n" + "".join(f"{i} {j}\n" for i in range(3) for j in range(2)))
    return path


class TestSpectrum:
    def test_k23_contains_pm_sqrt6(self, capsys, tmp_path):
        graph = write_k23(tmp_path)
        out_path = tmp_path / "spec.csv"
        code, _, _ = run(capsys, "spectrum", "--in", str(graph), "--normalize", "none",
                         "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        vals = np.array([float(line.split(",")[1]) for line in lines[1:]])
        assert len(vals) == 5
        assert vals[0] == pytest.approx(-math.sqrt(6), abs=1e-12)
        assert vals[-1] == pytest.approx(math.sqrt(6), abs=1e-12)
        assert np.count_nonzero(np.abs(vals) <= 1e-12) == 3

    def test_empty_graph_all_zeros(self, capsys, tmp_path):
        graph = tmp_path / "g.txt"
        graph.write_text("2 2\n")
        out_path = tmp_path / "spec.csv"
        code, _, _ = run(capsys, "spectrum", "--in", str(graph), "--out", str(out_path))
        assert code == 0
        vals = [float(line.split(",")[1]) for line in out_path.read_text().splitlines()[1:]]
        assert vals == [0.0, 0.0, 0.0, 0.0]

    def test_histogram_counts_sum_to_size(self, capsys, tmp_path):
        graph = write_k23(tmp_path)
        out_path = tmp_path / "spec.csv"
        hist_path = tmp_path / "h.csv"
        code, _, _ = run(capsys, "spectrum", "--in", str(graph), "--out", str(out_path),
                         "--hist", "4", "--hist-out", str(hist_path))
        assert code == 0
        rows = hist_path.read_text().splitlines()
        assert rows[0] == "bin_lo,bin_hi,count"
        assert sum(int(r.split(",")[2]) for r in rows[1:]) == 5

    def test_regular_normalization_inconsistent_file(self, capsys, tmp_path):
        graph = write_k23(tmp_path)  # K_{3,2} is (2,3)-regular, not (1, ...)
        code, _, err = run(capsys, "spectrum", "--in", str(graph), "--normalize",
                           "regular", "--dl", "1", "--out", str(tmp_path / "s.csv"))
        assert code == 3
        assert "not" in err

    def test_er_normalization_needs_p(self, capsys, tmp_path):
        graph = write_k23(tmp_path)
        code, _, _ = run(capsys, "spectrum", "--in", str(graph), "--normalize", "er",
                         "--out", str(tmp_path / "s.csv"))
        assert code == 2

    def test_malformed_file_exit_three(self, capsys, tmp_path):
        graph = tmp_path / "bad.txt"
        graph.write_text("2 2\n0 7\n")
        code, _, err = run(capsys, "spectrum", "--in", str(graph),
                           "--out", str(tmp_path / "s.csv"))
        assert code == 3
        assert "line 2" in err


class TestLocalLaw:
    def test_vacuous_delta_exits_zero(self, capsys, tmp_path):
        code, out, _ = run(capsys, "local-law", "--model", "er", "--m", "40", "--n", "40",
                           "--p", "0.5", "--delta", "1e6", "--trials", "2",
                           "--seed", "3", "--interval-length", "0.5",
                           "--out", str(tmp_path))
        assert code == 0
        assert "pass_rate=1" in out
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "summary.csv").exists()

    def test_interval_through_zero_exit_two(self, capsys, tmp_path):
        code, _, err = run(capsys, "local-law", "--model", "er", "--m", "40", "--n", "40",
                           "--p", "0.5", "--trials", "2", "--seed", "3",
                           "--interval", "-0.5,0.5", "--out", str(tmp_path))
        assert code == 2
        assert "avoid" in err

    def test_threshold_failure_exit_four(self, capsys, tmp_path):
        code, _, _ = run(capsys, "local-law", "--model", "er", "--m", "40", "--n", "40",
                         "--p", "0.5", "--delta", "1e-9", "--trials", "2",
                         "--seed", "3", "--interval-length", "0.5",
                         "--out", str(tmp_path))
        assert code == 4

    def test_rerun_byte_identical_report(self, capsys, tmp_path):
        blobs = []
        for sub in ("a", "b"):
            out_dir = tmp_path / sub
            code, _, _ = run(capsys, "local-law", "--model", "regular", "--m", "24",
                             "--n", "24", "--dl", "4", "--delta", "0.9", "--trials", "3",
                             "--seed", "5", "--interval-length", "0.6",
                             "--out", str(out_dir))
            assert code == 0
            blobs.append((out_dir / "report.json").read_bytes())
        assert blobs[0] == blobs[1]

    def test_summary_csv_round_trips(self, capsys, tmp_path):
        code, _, _ = run(capsys, "local-law", "--model", "er", "--m", "30", "--n", "30",
                         "--p", "0.5", "--delta", "0.9", "--trials", "2", "--seed", "4",
                         "--interval-length", "0.7", "--out", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        rows = (tmp_path / "summary.csv").read_text().splitlines()
        assert rows[0] == "trial,interval_lo,interval_hi,N_I,predicted,rel_dev,pass"
        row1 = rows[1].split(",")
        assert float(row1[4]) == report["intervals"][0]["predicted"]


class TestFactorCheck:
    def test_k22_factor_exists(self, capsys, tmp_path):
        graph = tmp_path / "k22.txt"
        graph.write_text("2 2\n0 0\n0 1\n1 0\n1 1\n")
        code, out, _ = run(capsys, "factor-check", "--in", str(graph),
                           "--fa", "2,2", "--fb", "2,2")
        assert code == 0
        assert out.strip() == "factor exists"

    def test_unbalanced_star_exit_three(self, capsys, tmp_path):
        graph = tmp_path / "star.txt"
        graph.write_text("1 3\n0 0\n0 1\n0 2\n")
        code, out, _ = run(capsys, "factor-check", "--in", str(graph),
                           "--fa", "1", "--fb", "1,1,1")
        assert code == 3
        assert "unbalanced" in out

    def test_json_payload(self, capsys, tmp_path):
        graph = tmp_path / "k22.txt"
        graph.write_text("2 2\n0 0\n0 1\n1 0\n1 1\n")
        code, out, _ = run(capsys, "factor-check", "--in", str(graph),
                           "--fa", "1,1", "--fb", "1,1", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["exists"] is True
        assert len(payload["factor_edges"]) == 2

    def test_demand_length_mismatch_exit_three(self, capsys, tmp_path):
        graph = tmp_path / "k22.txt"
        graph.write_text("2 2\n0 0\n1 1\n")
        code, _, err = run(capsys, "factor-check", "--in", str(graph),
                           "--fa", "1", "--fb", "1,1")
        assert code == 3
        assert "match" in err


class TestExperimentsCommands:
    def test_regularity_prob_toy_estimate(self, capsys):
        code, out, _ = run(capsys, "regularity-prob", "--m", "2", "--n", "2",
                           "--p", "0.5", "--trials", "4000", "--seed", "13")
        assert code == 0
        est = float(out.split("estimate=")[1].split()[0])
        assert abs(est - 0.125) < 0.03

    def test_regularity_prob_non_integer_degree_exit_three(self, capsys):
        code, _, err = run(capsys, "regularity-prob", "--m", "4", "--n", "4",
                           "--p", "0.3", "--trials", "10", "--seed", "1")
        assert code == 3
        assert "not integers" in err

    def test_factor_freq_complete_graph(self, capsys):
        code, out, _ = run(capsys, "factor-freq", "--m", "4", "--n", "4", "--p", "1",
                           "--delta-param", "0.5", "--trials", "5", "--seed", "1")
        assert code == 0
        assert "frequency=1" in out

    def test_concentration_table(self, capsys):
        code, out, _ = run(capsys, "concentration", "--m", "16", "--n", "16",
                           "--p", "0.5", "--window", "0.4,1.0", "--t-grid", "0.5,1",
                           "--trials", "8", "--seed", "2")
        assert code == 0
        assert out.splitlines()[0] == "T,tail,fitted_c"

    def test_rate_sweep_table_and_json(self, capsys, tmp_path):
        out_path = tmp_path / "sweep.json"
        code, out, _ = run(capsys, "rate-sweep", "--n-list", "8,12,16", "--alpha", "1",
                           "--p", "0.5", "--trials", "2", "--seed", "3",
                           "--out", str(out_path))
        assert code == 0
        assert out.splitlines()[0] == "n,mean_count,predicted,rel_dev"
        assert "gamma=" in out
        payload = json.loads(out_path.read_text())
        assert payload["kind"] == "convergence_rate_sweep"

    def test_threads_env_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("BIPSPEC_THREADS", "1")
        code, out, _ = run(capsys, "factor-freq", "--m", "4", "--n", "4", "--p", "1",
                           "--delta-param", "0.5", "--trials", "3", "--seed", "1")
        assert code == 0


class TestConfigFile:
    def test_config_defaults_and_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"m": 2, "n": 2, "p": 0.5, "trials": 4000, "seed": 13}))
        code, out, _ = run(capsys, "regularity-prob", "--config", str(cfg))
        assert code == 0
        baseline = out
        capsys.readouterr()
        # explicit flag overrides the config value
        code, out2, _ = run(capsys, "regularity-prob", "--config", str(cfg),
                            "--trials", "2000")
        assert code == 0
        assert "2000" in out2 and out2 != baseline

    def test_unknown_config_key_exit_two(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        code, _, err = run(capsys, "regularity-prob", "--config", str(cfg))
        assert code == 2
        assert "bogus" in err


class TestTopLevel:
    def test_no_command_prints_usage(self, capsys):
        code, _, err = run(capsys)
        assert code == 2
        assert "usage" in err

    def test_unknown_command_exit_two(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_version_flag(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0
        assert "bipspec" in out
