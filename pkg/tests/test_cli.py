import json

import pytest

from assortbench.cli import builtin_config, main


def run_cli(args):
    try:
        return main(args)
    except SystemExit as exc:
        return exc.code


class TestRun:
    def test_static_oracle_all_zero_regret(self, tmp_path, capsys):
        code = run_cli(
            ["run", "--policy", "static", "--n", "1", "--t", "10", "--out", str(tmp_path)]
        )
        assert code == 0
        csv_files = list(tmp_path.glob("episode_static_*.csv"))
        assert len(csv_files) == 1
        rows = csv_files[0].read_text().strip().splitlines()[1:]
        assert len(rows) == 10
        assert all(float(row.split(",")[3]) == 0.0 for row in rows)

    def test_run_adaptive(self, tmp_path):
        code = run_cli(
            [
                "run",
                "--policy",
                "adaptive-trisection",
                "--ci-scale",
                "0.1",
                "--n",
                "20",
                "--t",
                "50",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 0

    def test_unknown_policy_exits_one(self, tmp_path, capsys):
        assert run_cli(["run", "--policy", "bogus", "--out", str(tmp_path)]) == 1

    def test_unknown_subcommand_exits_one(self):
        assert run_cli(["frobnicate"]) == 1

    def test_ci_scale_on_wrong_policy_exits_one(self, tmp_path):
        code = run_cli(
            ["run", "--policy", "ucb", "--ci-scale", "0.1", "--n", "5", "--t", "10",
             "--out", str(tmp_path)]
        )
        assert code == 1


class TestBench:
    @pytest.fixture
    def tiny_config(self, tmp_path):
        cfg = {
            "master_seed": 11,
            "replications": 3,
            "cells": [
                {"policy": "grs", "n": 10, "t": 60, "params": {}},
                {"policy": "adaptive-trisection", "n": 10, "t": 60,
                 "params": {"ci_scale": 0.1}},
            ],
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_bench_writes_summaries(self, tmp_path, tiny_config):
        out = tmp_path / "out"
        assert run_cli(["bench", "--config", str(tiny_config), "--out", str(out)]) == 0
        payload = json.loads((out / "bench_summaries.json").read_text())
        assert len(payload) == 2
        for entry in payload.values():
            assert entry["replications"] == 3
            assert entry["max_regret"] >= entry["mean_regret"] >= 0.0
        assert (out / "bench_summaries.csv").exists()

    def test_parallel_determinism(self, tmp_path, tiny_config):
        outs = []
        for k, workers in enumerate(("1", "3")):
            out = tmp_path / f"out{k}"
            code = run_cli(
                ["bench", "--config", str(tiny_config), "--out", str(out),
                 "--parallel", workers]
            )
            assert code == 0
            outs.append((out / "bench_summaries.json").read_bytes())
        assert outs[0] == outs[1]

    def test_missing_config_exits_one(self, tmp_path):
        assert run_cli(["bench", "--config", str(tmp_path / "nope.json")]) == 1

    def test_builtin_table_config(self):
        cfg = builtin_config("table2")
        assert cfg["replications"] == 20
        pairs = {(c["n"], c["t"]) for c in cfg["cells"]}
        assert (100, 500) in pairs and (1000, 1000) in pairs
        adaptive = [c for c in cfg["cells"] if c["policy"] == "adaptive-trisection"]
        assert all(c["params"] == {"ci_scale": 0.1} for c in adaptive)


class TestScaling:
    def test_scaling_writes_table(self, tmp_path, capsys):
        code = run_cli(
            ["scaling", "--policy", "grs", "--n", "10", "--t", "50,100",
             "--reps", "2", "--out", str(tmp_path)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "fitted exponent" in out
        csv = (tmp_path / "scaling_grs_n10.csv").read_text().splitlines()
        assert csv[0] == "t,mean_regret"
        assert len(csv) == 3


class TestVerify:
    def test_verify_passes_on_small_suite(self, capsys):
        assert run_cli(["verify", "--instances", "30", "--seed", "3"]) == 0
        assert "all properties passed" in capsys.readouterr().out


class TestLowerBound:
    def test_diagnostics_run(self, tmp_path, capsys):
        code = run_cli(
            ["lower-bound", "--policy", "grs", "--n", "2", "--t", "64",
             "--reps", "2", "--out", str(tmp_path)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "KL(P0||P1)" in out
        assert "tester output 0" in out


class TestEnvOverride:
    def test_out_env_var(self, tmp_path, monkeypatch):
        target = tmp_path / "env_out"
        monkeypatch.setenv("ASSORT_BENCH_OUT", str(target))
        code = run_cli(["run", "--policy", "grs", "--n", "5", "--t", "20"])
        assert code == 0
        assert list(target.glob("episode_grs_*.csv"))
