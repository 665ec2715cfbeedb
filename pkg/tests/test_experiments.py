"""Experiment configs, the run pipeline and its file artifacts."""

import json
import os

import numpy as np
import pytest

from ipgopt import (ConfigError, OptimizerConfig, build_cost, experiment_config,
                    load_config, run_experiment, run_with_layer_growth)
from ipgopt.experiments import EXPERIMENT_DEFAULTS, ExperimentConfig


def tiny_config(kind="ghz", out_dir=None, **overrides):
    settings = dict(num_qubits=2, num_layers=1, iterations=3, n_runs=2,
                    base_seed=5, histogram_samples=20, output_dir=out_dir)
    settings.update(overrides)
    return experiment_config(kind, optimizers=["gd", "ipg"], **settings)


class TestConfigDefaults:
    # (qubits, layers, iterations, runs) straight from the benchmark setups
    @pytest.mark.parametrize("kind,expected", [
        ("ghz", (5, 3, 32, 3)),
        ("w", (4, 3, 64, 2)),
        ("qft-distance", (3, 5, 80, 4)),
        ("qft-frobenius", (3, 5, 64, 4)),
    ])
    def test_caption_tuples(self, kind, expected):
        config = experiment_config(kind)
        assert (config.num_qubits, config.num_layers, config.iterations,
                config.n_runs) == expected

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            experiment_config("bell")

    def test_unknown_override(self):
        with pytest.raises(ConfigError):
            experiment_config("ghz", depth=4)

    def test_duplicate_optimizer_labels(self):
        with pytest.raises(ConfigError):
            experiment_config("ghz", optimizers=["ipg", "ipg"])

    def test_gd_learning_rate_default(self):
        config = experiment_config("ghz")
        gd = next(o for o in config.optimizers if o.algorithm == "gd")
        assert gd.effective_learning_rate() == 0.09

    def test_config_dict_round_trip(self):
        config = tiny_config()
        rebuilt = ExperimentConfig.from_dict(config.to_dict())
        assert rebuilt == config


class TestBuildCost:
    def test_kinds(self):
        from ipgopt import (FrobeniusInfidelity, MatrixDistance, StateInfidelity)
        assert isinstance(build_cost(tiny_config("ghz")), StateInfidelity)
        assert isinstance(build_cost(tiny_config("w")), StateInfidelity)
        assert isinstance(build_cost(tiny_config("qft-distance")), MatrixDistance)
        assert isinstance(build_cost(tiny_config("qft-frobenius")), FrobeniusInfidelity)

    def test_ghz_sign_plumbed(self):
        cost = build_cost(tiny_config("ghz", ghz_sign=+1))
        assert cost.target[-1].real > 0


class TestRunExperiment:
    def test_histories_have_initial_entry(self):
        record = run_experiment(tiny_config())
        for outcome in record.outcomes.values():
            assert len(outcome.best.cost_history) == 4
            assert len(outcome.runs) == 2

    def test_histogram_only_for_unitary_targets(self):
        state_record = run_experiment(tiny_config("ghz"))
        assert all(o.fidelities is None for o in state_record.outcomes.values())
        qft_record = run_experiment(tiny_config("qft-frobenius"))
        for outcome in qft_record.outcomes.values():
            assert outcome.fidelities.shape == (20,)
            assert outcome.angle_gaps.shape == (20,)

    def test_shared_init_gives_common_first_cost(self):
        record = run_experiment(tiny_config())
        first = {o.best.cost_history[0] for o in record.outcomes.values()}
        starts = [tuple(r["seed"] for r in o.runs) for o in record.outcomes.values()]
        assert starts[0] == starts[1]

    def test_independent_init_uses_disjoint_seeds(self):
        record = run_experiment(tiny_config(shared_init=False))
        seed_sets = [set(r["seed"] for r in o.runs) for o in record.outcomes.values()]
        assert seed_sets[0].isdisjoint(seed_sets[1])

    def test_layer_growth(self):
        # threshold no tiny run can reach: layers grow to the cap
        record = run_with_layer_growth(tiny_config(), threshold=1e-30, max_layers=3)
        assert record.config.num_layers == 3


class TestOutputs:
    @pytest.fixture(scope="class")
    def run_dir(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("qft_run")
        record = run_experiment(tiny_config("qft-frobenius", out_dir=str(out)))
        return out, record

    def test_expected_files(self, run_dir):
        out, _ = run_dir
        names = {p.name for p in out.iterdir()}
        expected = {"record.json", "cost_curves.svg", "cost_curves.png",
                    "cost_curves_avg.png", "fidelity_histogram.png"}
        assert expected <= names
        for label in ("gd", "ipg"):
            assert f"history_{label}.csv" in names
            assert f"history_{label}_avg.csv" in names
            assert f"histogram_{label}.csv" in names
            assert f"circuit_{label}.qasm" in names

    def test_history_csv_shape(self, run_dir):
        out, record = run_dir
        lines = (out / "history_ipg.csv").read_text().splitlines()
        assert lines[0] == "iteration,cost"
        assert len(lines) == 1 + record.config.iterations + 1

    def test_histogram_rows(self, run_dir):
        out, record = run_dir
        lines = (out / "histogram_ipg.csv").read_text().splitlines()
        assert len(lines) == record.config.histogram_samples

    def test_json_structure(self, run_dir):
        out, record = run_dir
        data = json.loads((out / "record.json").read_text())
        assert data["version"] == record.version
        assert set(data["results"]) == {"gd", "ipg"}
        best = data["results"]["ipg"]["best"]
        assert len(best["final_params"]) == record.config.template.param_count
        assert "fidelity_summary" in data["results"]["ipg"]

    def test_svg_has_series(self, run_dir):
        out, _ = run_dir
        assert (out / "cost_curves.svg").read_text().count("<polyline") == 2


def _strip_wall_times(obj):
    if isinstance(obj, dict):
        return {k: _strip_wall_times(v) for k, v in obj.items() if k != "wall_time"}
    if isinstance(obj, list):
        return [_strip_wall_times(v) for v in obj]
    return obj


def test_reproducible_bytes(tmp_path):
    """Same config twice: identical CSVs; identical JSON minus wall times."""
    dirs = []
    for name in ("first", "second"):
        out = tmp_path / name
        run_experiment(tiny_config("qft-frobenius", out_dir=str(out)))
        dirs.append(out)
    a, b = dirs
    for path in sorted(a.iterdir()):
        if path.suffix == ".csv" or path.suffix in (".qasm", ".svg"):
            assert path.read_bytes() == (b / path.name).read_bytes(), path.name
    ja = _strip_wall_times(json.loads((a / "record.json").read_text()))
    jb = _strip_wall_times(json.loads((b / "record.json").read_text()))
    assert ja == jb


def test_load_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "kind": "ghz", "num_qubits": 2, "num_layers": 1, "iterations": 2,
        "n_runs": 1, "optimizers": [{"algorithm": "gd", "learning_rate": 0.05}],
    }))
    config = load_config(str(path), base_seed=9)
    assert config.kind == "ghz"
    assert config.base_seed == 9
    assert config.optimizers[0].learning_rate == 0.05


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    no_kind = tmp_path / "nokind.json"
    no_kind.write_text("{}")
    with pytest.raises(ConfigError):
        load_config(str(no_kind))


def test_optimizer_config_round_trip():
    config = OptimizerConfig("ipg", beta_margin=0.5, max_iterations=12)
    assert OptimizerConfig.from_dict(config.to_dict()) == config
