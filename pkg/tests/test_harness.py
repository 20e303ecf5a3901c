"""Config validation, scenario runs, sweeps, probes, CLI exit codes."""
import json
import subprocess
import sys
from pathlib import Path

import pytest

from seqpred.harness import (
    EXIT_ASSERTION,
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_OK,
    VERIFY_SUITES,
    ConfigError,
    ExperimentConfig,
    _build_measure,
    probe_conjectures,
    run,
    sweep,
    verify,
)


class TestConfig:
    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="frob"):
            ExperimentConfig.from_dict({"scenario": "nodom", "frob": 1})

    def test_missing_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            ExperimentConfig.from_dict({"horizon": 10})

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match="unknown scenario"):
            ExperimentConfig.from_dict({"scenario": "does_not_exist"})

    def test_schema_version_checked(self):
        with pytest.raises(ConfigError, match="schema_version"):
            ExperimentConfig.from_dict({"scenario": "nodom", "schema_version": "99"})

    def test_empty_divergence_list_rejected(self):
        with pytest.raises(ConfigError, match="divergences"):
            ExperimentConfig.from_dict({"scenario": "nodom", "divergences": []})

    def test_unknown_divergence_kind_rejected(self):
        with pytest.raises(ConfigError, match="wasserstein"):
            ExperimentConfig.from_dict({"scenario": "nodom", "divergences": ["wasserstein"]})

    def test_bad_seed_and_horizon(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"scenario": "nodom", "seed": -1})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"scenario": "nodom", "horizon": 0})

    def test_round_trip(self):
        cfg = ExperimentConfig.from_dict({"scenario": "nodom", "horizon": 128, "seed": 5})
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


class TestMeasureDsl:
    def test_every_type_builds(self):
        specs = [
            {"type": "bernoulli", "probs": [0.5, 0.5]},
            {"type": "point_mass", "symbol": 1},
            {"type": "markov", "order": 1, "transition": [[0.9, 0.1], [0.2, 0.8]],
             "initial": [0.5, 0.5]},
            {"type": "laplace"},
            {"type": "markov_laplace", "order": 2},
            {"type": "memory_mixture", "k_max": 3},
            {"type": "mixture", "components": [{"type": "laplace"},
                                               {"type": "bernoulli", "probs": [0.3, 0.7]}],
             "weights": [0.5, 0.5]},
            {"type": "contaminate", "rho": {"type": "laplace"},
             "chi": {"type": "bernoulli", "probs": [2 / 3, 1 / 3]}},
            {"type": "schedule", "base": [0.5, 0.5], "spoiled": [1.0, 0.0], "rule": "pow2"},
        ]
        for spec in specs:
            m = _build_measure(spec, horizon=64)
            assert m.alphabet.size == 2

    def test_unknown_type(self):
        with pytest.raises(ConfigError, match="unknown measure type"):
            _build_measure({"type": "cauchy"}, 16)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            _build_measure({"type": "laplace", "smoothing": 2}, 16)

    def test_missing_key(self):
        with pytest.raises(ConfigError, match="missing required key"):
            _build_measure({"type": "bernoulli"}, 16)

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            _build_measure({"type": "bernoulli", "probs": [0.9, 0.9]}, 16)


class TestRun:
    def test_writes_report_and_series(self, tmp_path):
        cfg = ExperimentConfig.from_dict(
            {"scenario": "nodom", "horizon": 256, "divergences": ["kl"]}
        )
        report = run(cfg, out_dir=str(tmp_path))
        assert report.ok
        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["status"] == "COMPLETE"
        assert payload["config"]["scenario"] == "nodom"
        series = tmp_path / "series_kl.csv"
        assert series.exists()
        header = series.read_text().splitlines()[0]
        assert header == "n,per_step,running_average"

    def test_vacuous_run_with_zero_paths(self, tmp_path):
        cfg = ExperimentConfig.from_dict({"scenario": "nosumavad", "horizon": 1000, "paths": 0})
        report = run(cfg, out_dir=str(tmp_path))
        assert report.ok and report.series_files == [] and report.verdicts == []

    def test_budget_exceeded_marks_incomplete(self, tmp_path):
        cfg = ExperimentConfig.from_dict(
            {"scenario": "laplace_vs_bernoulli", "horizon": 30,
             "true_measure": {"type": "bernoulli_grid", "points": 3}}
        )
        report = run(cfg, out_dir=str(tmp_path))
        assert report.status == "INCOMPLETE"
        assert "budget_error" in report.summaries

    def test_reproducible_series_bytes(self, tmp_path):
        cfg = {"scenario": "nosumavad", "horizon": 1000, "paths": 20, "seed": 12,
               "divergences": ["abs"]}
        blobs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            report = run(ExperimentConfig.from_dict(cfg), out_dir=str(out))
            blobs.append([Path(f).read_bytes() for f in sorted(report.series_files)])
        assert blobs[0] == blobs[1]

    def test_nosumad_reports_expected_conditionals(self, tmp_path):
        cfg = ExperimentConfig.from_dict({"scenario": "nosumad", "horizon": 300})
        report = run(cfg, out_dir=str(tmp_path))
        assert report.ok
        conds = report.summaries["conditionals"]
        assert conds[0] == pytest.approx(0.56, abs=1e-12)
        assert conds[1] == pytest.approx(50 / 153, abs=1e-12)
        assert conds[2] == pytest.approx(70 / 771, abs=1e-12)


class TestSweep:
    def test_grid_cardinality(self, tmp_path):
        template = {"scenario": "nodom", "horizon": 128, "divergences": ["abs"]}
        grid = {"schedule.rule": ["pow2", "cubic"], "divergences": [["abs"], ["kl"]]}
        reports, agg = sweep(template, grid, out_dir=str(tmp_path))
        assert len(reports) == 4
        assert all(r.ok for r in reports)
        lines = agg.read_text().splitlines()
        assert len(lines) == 5  # header + one row per grid point

    def test_empty_grid_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="non-empty"):
            sweep({"scenario": "nodom"}, {}, out_dir=str(tmp_path))

    def test_nested_grid_path_reaches_predictor_spec(self, tmp_path):
        template = {
            "scenario": "stationary_memory", "horizon": 20, "paths": 10,
            "predictor": {"type": "memory_mixture", "k_max": 8},
        }
        reports, _ = sweep(template, {"predictor.k_max": [0, 2]}, out_dir=str(tmp_path))
        assert [r.config["predictor"]["k_max"] for r in reports] == [0, 2]

    def test_invalid_template_field_via_grid(self, tmp_path):
        template = {"scenario": "nodom", "horizon": 64}
        with pytest.raises(ConfigError, match="divergences"):
            sweep(template, {"divergences": [[]]}, out_dir=str(tmp_path))


class TestVerify:
    def test_unknown_suite(self):
        with pytest.raises(ConfigError, match="unknown verify suite"):
            verify("nope")

    def test_mixture_dominance_passes(self, tmp_path):
        status, report = verify("mixture_dominance", out_dir=str(tmp_path))
        assert status == EXIT_OK
        assert all(v["passed"] for v in report.verdicts)
        assert (tmp_path / "verify_mixture_dominance.json").exists()

    def test_exit_status_contract_on_failure(self, tmp_path, monkeypatch):
        def failing_suite(seed, budget):
            return [{"claim": "x", "passed": False, "value": 1, "tolerance": 0, "detail": ""}], {}, []

        monkeypatch.setitem(VERIFY_SUITES, "mixture_dominance", (failing_suite,))
        status, report = verify("mixture_dominance", out_dir=str(tmp_path))
        assert status == EXIT_ASSERTION
        assert not report.ok

    def test_verdicts_carry_claim_and_tolerance(self, tmp_path):
        _, report = verify("chain_rule", out_dir=str(tmp_path))
        for v in report.verdicts:
            assert v["claim"] and "tolerance" in v and "value" in v


class TestProbes:
    def test_zero_budget_is_empty(self, tmp_path):
        report = probe_conjectures(1, budget=0, seed=0, out_dir=str(tmp_path))
        assert report.summaries["outcome"] == "empty_probe"
        assert report.summaries["instances"] == 0

    def test_probe_one_runs_and_stays_honest(self, tmp_path):
        report = probe_conjectures(1, budget=4, seed=1, horizon=512, paths=4,
                                   out_dir=str(tmp_path))
        assert report.summaries["outcome"] in (
            "no_counterexample_found_within_budget", "candidates_found"
        )
        assert report.verdicts == []  # no pass/fail claims on conjectures
        text = report.to_json()
        assert "conjecture confirmed" not in text.lower()

    def test_probe_two_premise_checks(self, tmp_path):
        report = probe_conjectures(2, budget=3, seed=1, horizon=512, paths=4,
                                   out_dir=str(tmp_path))
        statuses = {"INAPPLICABLE", "NO_COUNTEREXAMPLE", "CANDIDATE"}
        rows = Path(report.series_files[0]).read_text().splitlines()[1:]
        assert rows and all(row.split(",")[1] in statuses for row in rows)

    def test_bad_conjecture_number(self):
        with pytest.raises(ConfigError):
            probe_conjectures(4, budget=1)


def _cli(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "seqpred.cli", *args],
        cwd=cwd, capture_output=True, text=True, timeout=300,
    )


class TestCli:
    def test_run_and_exit_codes(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenario": "nodom", "horizon": 128}))
        ok = _cli("run", str(cfg), "--out-dir", str(tmp_path / "o1"), cwd=tmp_path)
        assert ok.returncode == EXIT_OK

        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"scenario": "nodom", "bogus": True}))
        r = _cli("run", str(bad), "--out-dir", str(tmp_path / "o2"), cwd=tmp_path)
        assert r.returncode == EXIT_CONFIG
        assert "bogus" in r.stderr

        over = tmp_path / "over.json"
        over.write_text(json.dumps({
            "scenario": "laplace_vs_bernoulli", "horizon": 30,
            "true_measure": {"type": "bernoulli_grid", "points": 3},
        }))
        r = _cli("run", str(over), "--out-dir", str(tmp_path / "o3"), cwd=tmp_path)
        assert r.returncode == EXIT_BUDGET

    def test_verify_subcommand(self, tmp_path):
        r = _cli("verify", "mixture_dominance", "--out-dir", str(tmp_path), cwd=tmp_path)
        assert r.returncode == EXIT_OK
        assert "PASS" in r.stdout

    def test_flag_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenario": "nodom", "horizon": 4096}))
        r = _cli("run", str(cfg), "--horizon", "64", "--out-dir", str(tmp_path / "o"),
                 cwd=tmp_path)
        assert r.returncode == EXIT_OK
        payload = json.loads((tmp_path / "o" / "report.json").read_text())
        assert payload["config"]["horizon"] == 64

    def test_probe_subcommand(self, tmp_path):
        r = _cli("probe", "2", "2", "--horizon", "256", "--paths", "4",
                 "--out-dir", str(tmp_path), cwd=tmp_path)
        assert r.returncode == EXIT_OK

    def test_env_var_out_dir(self, tmp_path):
        import os

        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenario": "nodom", "horizon": 64}))
        env = dict(os.environ, SEQPRED_OUT_DIR=str(tmp_path / "envout"))
        r = subprocess.run(
            [sys.executable, "-m", "seqpred.cli", "run", str(cfg)],
            cwd=tmp_path, capture_output=True, text=True, env=env, timeout=120,
        )
        assert r.returncode == EXIT_OK
        assert (tmp_path / "envout" / "report.json").exists()
