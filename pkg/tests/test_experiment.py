import dataclasses

import numpy as np
import pytest

from difflmp.cli import EXIT_CONFIG, EXIT_GENERATION, EXIT_OK, main
from difflmp.errors import ConfigError
from difflmp.experiment import (
    ExperimentConfig,
    build_network,
    format_p,
    parse_config,
    run_steady_sweep,
    run_transient_experiment,
    run_trial,
)
from difflmp.metrics import read_curve_csv, read_steady_csv


def small(**kw):
    base = dict(n_nodes=6, radius=0.7, n_iters=200, n_trials=3, alpha_list=[1.2], p_list=[1.2, 2.0])
    base.update(kw)
    return ExperimentConfig(**base)


def test_empty_file_gives_paper_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    cfg = parse_config(path)
    assert (cfg.n_nodes, cfg.radius, cfg.mu, cfg.n_trials, cfg.gsnr_db) == (20, 0.5, 0.005, 10, 20.0)
    assert cfg == ExperimentConfig()


def test_flags_override_file(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("mu: 0.005\nn_iters: 100\n")
    cfg = parse_config(path, {"mu": 0.01, "seed": None})
    assert cfg.mu == 0.01 and cfg.n_iters == 100 and cfg.seed == 0


def test_exponent_literal_in_yaml(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("mu: 5e-3\n")
    assert parse_config(path).mu == 0.005


def test_weight_rule_merges_per_matrix(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("weight_rule:\n  c: uniform\n")
    cfg = parse_config(path, {"weight_rule": {"a2": "metropolis"}})
    assert cfg.weight_rule == {"a1": "identity", "a2": "metropolis", "c": "uniform"}


@pytest.mark.parametrize(
    "overrides, key",
    [
        ({"p_list": [2.5]}, "p_list"),
        ({"p_list": []}, "p_list"),
        ({"alpha_list": [0.0]}, "alpha_list"),
        ({"n_iters": 1.5}, "n_iters"),
        ({"n_nodes": "many"}, "n_nodes"),
        ({"mu": -1.0}, "mu"),
        ({"bogus": 1}, "bogus"),
        ({"algorithm": "rls"}, "algorithm"),
        ({"weight_rule": {"a2": "laplacian"}}, "weight_rule"),
        ({"weight_rule": {"b": "uniform"}}, "weight_rule"),
        ({"window_fraction": 0.0}, "window_fraction"),
    ],
)
def test_validation_names_offending_key(overrides, key):
    with pytest.raises(ConfigError) as info:
        parse_config(None, overrides)
    assert key in info.value.fields
    assert key in str(info.value)


def test_non_mapping_file_rejected(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        parse_config(path)


def test_degenerate_run_has_length_one():
    cfg = small(n_trials=1, n_iters=1, p_list=[1.5])
    curves = run_transient_experiment(cfg)
    assert len(curves[1.5]) == 1
    assert curves[1.5].per_iteration_db.shape == (1,)


def test_transient_needs_single_alpha():
    with pytest.raises(ConfigError):
        run_transient_experiment(small(alpha_list=[1.0, 1.5]))


def test_transient_matches_manual_average():
    cfg = small()
    net = build_network(cfg)
    trials = [run_trial(cfg, net, 1.2, t) for t in range(cfg.n_trials)]
    curves = run_transient_experiment(cfg)
    manual = 10 * np.log10(sum(t[1] for t in trials) / 3)
    assert np.allclose(curves[2.0].per_iteration_db, manual, rtol=0, atol=1e-12)


def test_adding_trials_leaves_earlier_trials_unchanged():
    cfg3 = small(n_trials=3)
    cfg5 = small(n_trials=5)
    net = build_network(cfg3)
    assert np.array_equal(net.positions, build_network(cfg5).positions)
    assert np.array_equal(run_trial(cfg3, net, 1.2, 2), run_trial(cfg5, net, 1.2, 2))


def test_sweep_layout_and_alpha_ordering():
    rows = run_steady_sweep(small(alpha_list=[1.5, 1.0], p_list=[1.0, 2.0]))
    assert [(a, p) for a, p, _ in rows] == [(1.5, 1.0), (1.5, 2.0), (1.0, 1.0), (1.0, 2.0)]


def test_parallel_matches_serial():
    cfg = small()
    assert run_steady_sweep(cfg, jobs=1) == run_steady_sweep(cfg, jobs=3)


@pytest.mark.parametrize("algorithm", ["global", "noncooperative", "diffusion"])
def test_algorithms_converge_in_gaussian_noise(algorithm):
    cfg = small(algorithm=algorithm, alpha_list=[2.0], p_list=[2.0], n_iters=1500, mu=0.02)
    curve = run_transient_experiment(cfg)[2.0]
    assert curve.per_iteration_db[0] > -3.0
    assert curve.steady_state_db < -20.0


def test_global_has_single_estimate_msd():
    cfg = small(algorithm="global", n_trials=1, n_iters=1, p_list=[2.0])
    net = build_network(cfg)
    out = run_trial(cfg, net, 1.2, 0)
    assert out.shape == (1, 1)


def test_format_p():
    assert [format_p(p) for p in (1.0, 1.2, 2.0, 1.25)] == ["1", "1.2", "2", "1.25"]


# CLI surface


def _cli(tmp_path, *args):
    return main([*args, "--out-dir", str(tmp_path), "--name", "t"])


def test_cli_transient_files_round_trip(tmp_path):
    code = _cli(tmp_path, "transient", "--n-nodes", "5", "--radius", "0.8", "--n-iters", "50",
                "--n-trials", "2", "--alpha-list", "1.2", "--p-list", "1.2", "2.0")
    assert code == EXIT_OK
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["t_curve_p1.2.csv", "t_curve_p2.csv", "t_network.csv"]
    text = (tmp_path / "t_curve_p2.csv").read_text()
    assert text.startswith("# config: ")
    assert "# provenance: difflmp" in text

    cfg = ExperimentConfig(n_nodes=5, radius=0.8, n_iters=50, n_trials=2, p_list=[1.2, 2.0])
    curves = run_transient_experiment(cfg)
    assert np.array_equal(read_curve_csv(tmp_path / "t_curve_p2.csv"), curves[2.0].per_iteration_db)


def test_cli_steady_sweep(tmp_path):
    code = _cli(tmp_path, "steady-sweep", "--n-nodes", "5", "--radius", "0.8", "--n-iters", "40",
                "--n-trials", "2", "--alpha-list", "1.0", "1.5", "--p-list", "1.0", "2.0",
                "--weight-rule", "a2=metropolis", "--weight-rule", "c=uniform")
    assert code == EXIT_OK
    rows = read_steady_csv(tmp_path / "t_steady.csv")
    assert [(a, p) for a, p, _ in rows] == [(1.0, 1.0), (1.0, 2.0), (1.5, 1.0), (1.5, 2.0)]
    cfg = ExperimentConfig(
        n_nodes=5, radius=0.8, n_iters=40, n_trials=2, alpha_list=[1.0, 1.5], p_list=[1.0, 2.0],
        weight_rule={"a1": "identity", "a2": "metropolis", "c": "uniform"},
    )
    assert rows == [tuple(map(float, r)) for r in run_steady_sweep(cfg)]


def test_cli_gen_network(tmp_path):
    assert _cli(tmp_path, "gen-network", "--seed", "3") == EXIT_OK
    lines = (tmp_path / "t_network.csv").read_text().splitlines()
    assert sum(line.startswith("node,") for line in lines) == 20


def test_cli_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text("n_nodes: 4\nradius: 0.9\nn_iters: 10\nn_trials: 1\np_list: [1.5]\n")
    assert _cli(tmp_path, "transient", "--config", str(cfg_path)) == EXIT_OK
    assert (tmp_path / "t_curve_p1.5.csv").exists()


def test_cli_exit_codes(tmp_path, capsys):
    assert _cli(tmp_path, "transient", "--p-list", "2.5") == EXIT_CONFIG
    assert "p_list" in capsys.readouterr().err
    assert _cli(tmp_path, "transient", "--config", str(tmp_path / "missing.yaml")) == EXIT_CONFIG
    assert _cli(tmp_path, "gen-network", "--n-nodes", "60", "--radius", "0.01") == EXIT_GENERATION
    assert "1000 attempts" in capsys.readouterr().err


def test_config_dataclass_round_trips_through_dict():
    cfg = small()
    assert ExperimentConfig(**dataclasses.asdict(cfg)) == cfg
