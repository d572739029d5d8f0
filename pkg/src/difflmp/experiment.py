"""Monte Carlo experiments: transient learning curves and steady-state sweeps.

Randomness is derived from the master seed with fixed spawn keys:

* ``(0,)`` the network realization, shared by every trial;
* ``(1, trial, 0)`` the trial's ground-truth vector;
* ``(1, trial, 1, node)`` the node's input and noise stream.

Every power order p and every alpha in a run sees the same trial data, and
results never depend on how trials are scheduled across workers.
"""

import dataclasses
import json
import logging
import math
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from difflmp.data_gen import draw_ground_truth, generate_streams, stack_streams
from difflmp.diffusion_core import diffusion_update, global_update
from difflmp.errors import ConfigError
from difflmp.metrics import average_curves, msd_linear, write_curve_csv, write_steady_csv
from difflmp.stable_noise import StableParams
from difflmp.topology import WEIGHT_RULES, generate_rgg, make_weights, write_network_csv

__all__ = [
    "ALGORITHMS",
    "ExperimentConfig",
    "parse_config",
    "validate_config",
    "build_network",
    "run_trial",
    "run_transient_experiment",
    "run_steady_sweep",
    "write_transient_outputs",
    "write_steady_outputs",
    "format_p",
]

log = logging.getLogger(__name__)

ALGORITHMS = ("diffusion", "global", "noncooperative")


def _default_rules():
    return {"a1": "identity", "a2": "uniform", "c": "identity"}


@dataclass
class ExperimentConfig:
    n_nodes: int = 20
    radius: float = 0.5
    filter_len: int = 4
    n_iters: int = 5000
    n_trials: int = 10
    mu: float = 0.005
    gsnr_db: float = 20.0
    alpha_list: list = field(default_factory=lambda: [1.2])
    p_list: list = field(default_factory=lambda: [1.0, 1.2, 1.4, 1.6, 1.8, 2.0])
    weight_rule: dict = field(default_factory=_default_rules)
    algorithm: str = "diffusion"
    seed: int = 0
    window_fraction: float = 0.1

    def to_dict(self):
        return dataclasses.asdict(self)


_INT_FIELDS = ("n_nodes", "filter_len", "n_iters", "n_trials", "seed")
_FLOAT_FIELDS = ("radius", "mu", "gsnr_db", "window_fraction")
_LIST_FIELDS = ("alpha_list", "p_list")
FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ExperimentConfig))


def _as_float(value):
    if isinstance(value, bool):
        raise TypeError("boolean is not a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        # YAML 1.1 reads exponent literals such as 5e-3 as strings
        return float(value)
    raise TypeError(f"expected a number, got {type(value).__name__}")


def _as_int(value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an integer, got {type(value).__name__}")
    return value


def _coerce(raw):
    """Type-check a raw mapping; returns (clean values, problems)."""
    clean, problems = {}, {}
    for key, value in raw.items():
        if key not in FIELD_NAMES:
            problems[key] = "unknown key"
            continue
        try:
            if key in _INT_FIELDS:
                clean[key] = _as_int(value)
            elif key in _FLOAT_FIELDS:
                clean[key] = _as_float(value)
            elif key in _LIST_FIELDS:
                if isinstance(value, (int, float, str)) and not isinstance(value, bool):
                    value = [value]
                if not isinstance(value, (list, tuple)):
                    raise TypeError(f"expected a list of numbers, got {type(value).__name__}")
                clean[key] = [_as_float(v) for v in value]
            elif key == "weight_rule":
                if not isinstance(value, dict):
                    raise TypeError("expected a mapping of a1/a2/c to rule names")
                clean[key] = dict(value)
            elif key == "algorithm":
                if not isinstance(value, str):
                    raise TypeError(f"expected a string, got {type(value).__name__}")
                clean[key] = value
        except (TypeError, ValueError) as exc:
            problems[key] = str(exc)
    return clean, problems


def _range_problems(cfg):
    problems = {}
    if cfg.n_nodes < 1:
        problems["n_nodes"] = "must be >= 1"
    if not 0.0 < cfg.radius <= math.sqrt(2.0):
        problems["radius"] = "must lie in (0, sqrt(2)]"
    if cfg.filter_len < 1:
        problems["filter_len"] = "must be >= 1"
    if cfg.n_iters < 1:
        problems["n_iters"] = "must be >= 1"
    if cfg.n_trials < 1:
        problems["n_trials"] = "must be >= 1"
    if not (math.isfinite(cfg.mu) and cfg.mu > 0.0):
        problems["mu"] = "must be positive"
    if not math.isfinite(cfg.gsnr_db):
        problems["gsnr_db"] = "must be finite"
    if cfg.seed < 0:
        problems["seed"] = "must be non-negative"
    if not 0.0 < cfg.window_fraction <= 1.0:
        problems["window_fraction"] = "must lie in (0, 1]"
    if not cfg.alpha_list:
        problems["alpha_list"] = "must not be empty"
    elif any(not 0.0 < a <= 2.0 for a in cfg.alpha_list):
        problems["alpha_list"] = "every alpha must lie in (0, 2]"
    if not cfg.p_list:
        problems["p_list"] = "must not be empty"
    elif any(not 0.0 < p <= 2.0 for p in cfg.p_list):
        problems["p_list"] = "every p must lie in (0, 2]"
    bad = {k: v for k, v in cfg.weight_rule.items() if k not in ("a1", "a2", "c")}
    bad_rules = {k: v for k, v in cfg.weight_rule.items() if v not in WEIGHT_RULES}
    if bad or bad_rules or set(cfg.weight_rule) != {"a1", "a2", "c"}:
        problems["weight_rule"] = (
            f"needs keys a1, a2, c with values in {list(WEIGHT_RULES)}, got {cfg.weight_rule}"
        )
    if cfg.algorithm not in ALGORITHMS:
        problems["algorithm"] = f"must be one of {list(ALGORITHMS)}"
    return problems


def validate_config(cfg):
    """Raise :class:`ConfigError` naming every out-of-range field."""
    problems = _range_problems(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def parse_config(path=None, overrides=None):
    """Resolve an :class:`ExperimentConfig` from defaults, a YAML file and flags.

    Later layers win: built-in defaults, then the file at ``path`` (a YAML
    mapping whose keys are field names; an empty file means all defaults),
    then ``overrides``. ``weight_rule`` entries merge per matrix.
    """
    merged = {}
    problems = {}
    layers = []
    if path is not None:
        with open(path) as fh:
            try:
                loaded = yaml.safe_load(fh)
            except yaml.YAMLError as exc:
                raise ConfigError({"<file>": f"unparseable YAML: {exc}"}) from None
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError({"<file>": "top level must be a mapping"})
        layers.append(loaded)
    if overrides:
        layers.append({k: v for k, v in overrides.items() if v is not None})

    rules = _default_rules()
    for layer in layers:
        clean, bad = _coerce(layer)
        problems.update(bad)
        if "weight_rule" in clean:
            rules.update(clean.pop("weight_rule"))
        merged.update(clean)
    if problems:
        raise ConfigError(problems)
    cfg = ExperimentConfig(**merged, weight_rule=rules)
    return validate_config(cfg)


def _rng(seed, *key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def build_network(cfg):
    """The single network realization used by every trial of ``cfg``."""
    return generate_rgg(cfg.n_nodes, cfg.radius, _rng(cfg.seed, 0))


def run_trial(cfg, network, alpha, trial):
    """Linear network MSD per iteration for every p in ``cfg.p_list``.

    Returns
    -------
    ndarray, shape (len(p_list), n_iters)
    """
    truth = draw_ground_truth(cfg.filter_len, _rng(cfg.seed, 1, trial, 0))
    streams = generate_streams(
        truth,
        cfg.n_nodes,
        cfg.n_iters,
        StableParams(alpha=alpha),
        _rng(cfg.seed, 1, trial, 1),
        gsnr_db=cfg.gsnr_db,
    )
    u, d = stack_streams(streams)
    p = np.asarray(cfg.p_list, dtype=float)
    mu = np.full(cfg.n_nodes, cfg.mu)
    n_p, m = p.shape[0], cfg.filter_len
    out = np.empty((n_p, cfg.n_iters))

    if cfg.algorithm == "global":
        w = np.zeros((n_p, m))
        for n in range(cfg.n_iters):
            w = global_update(w, u[n], d[n], p, mu)
            dev = w - truth.w_o
            out[:, n] = np.sum(dev * dev, axis=-1)
        return out

    if cfg.algorithm == "noncooperative":
        eye = np.eye(cfg.n_nodes)
        a1 = a2 = c = eye
    else:
        wts = make_weights(network, **cfg.weight_rule)
        a1, a2, c = wts.a1, wts.a2, wts.c
    w = np.zeros((n_p, cfg.n_nodes, m))
    for n in range(cfg.n_iters):
        _, _, w = diffusion_update(w, u[n], d[n], a1, a2, c, p, mu)
        out[:, n] = msd_linear(w, truth.w_o)
    return out


def _trial_task(args):
    cfg, network, alpha, trial = args
    return run_trial(cfg, network, alpha, trial)


def _run_all(cfg, network, alphas, jobs):
    """Run every (alpha, trial) pair; returns {alpha_index: [trial arrays]}."""
    rough = [p for p in cfg.p_list if p <= 1.0]
    if rough:
        log.warning("p <= 1 in %s: the LMP gain is non-smooth at zero error", rough)
    tasks = [(cfg, network, a, t) for a in alphas for t in range(cfg.n_trials)]
    if jobs is None or jobs <= 1:
        results = [_trial_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial_task, tasks))
    grouped = {}
    for (_, _, a, _), res in zip(tasks, results):
        grouped.setdefault(a, []).append(res)
    return grouped


def run_transient_experiment(cfg, network=None, jobs=1):
    """Averaged learning curve for each p at the single alpha of ``cfg``.

    Returns
    -------
    dict
        Maps each p in ``cfg.p_list`` to an :class:`~difflmp.metrics.MsdCurve`.
    """
    validate_config(cfg)
    if len(cfg.alpha_list) != 1:
        raise ConfigError({"alpha_list": "transient mode needs exactly one alpha"})
    if network is None:
        network = build_network(cfg)
    (alpha,) = cfg.alpha_list
    trials = _run_all(cfg, network, [alpha], jobs)[alpha]
    return {
        p: average_curves([t[i] for t in trials], cfg.window_fraction)
        for i, p in enumerate(cfg.p_list)
    }


def run_steady_sweep(cfg, network=None, jobs=1):
    """Steady-state MSD for every (alpha, p) cell.

    Returns
    -------
    list of (alpha, p, steady_db)
        Ordered by alpha, then p, as listed in ``cfg``.
    """
    validate_config(cfg)
    if network is None:
        network = build_network(cfg)
    grouped = _run_all(cfg, network, cfg.alpha_list, jobs)
    rows = []
    for alpha in cfg.alpha_list:
        trials = grouped[alpha]
        for i, p in enumerate(cfg.p_list):
            curve = average_curves([t[i] for t in trials], cfg.window_fraction)
            rows.append((alpha, p, curve.steady_state_db))
    return rows


def format_p(p):
    """Compact token for file names, e.g. 1.2 -> '1.2', 2.0 -> '2'."""
    return f"{p:g}"


def _git_revision():
    here = Path(__file__).resolve().parent
    try:
        res = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=here,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return res.stdout.strip() if res.returncode == 0 and res.stdout.strip() else "unknown"


def header_lines(cfg, **extra):
    from difflmp import __version__

    lines = [
        "config: " + json.dumps(cfg.to_dict(), sort_keys=True),
        f"provenance: difflmp {__version__} git {_git_revision()}",
    ]
    lines += [f"{k}: {v}" for k, v in extra.items()]
    return lines


def write_network(cfg, network, out_dir, name):
    path = Path(out_dir) / f"{name}_network.csv"
    write_network_csv(network, path, header_lines(cfg))
    return path


def write_transient_outputs(cfg, curves, network, out_dir, name):
    """Write one curve file per p plus the network; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = [write_network(cfg, network, out_dir, name)]
    for p, curve in curves.items():
        path = Path(out_dir) / f"{name}_curve_p{format_p(p)}.csv"
        extra = {"alpha": cfg.alpha_list[0], "p": p, "steady_db": repr(curve.steady_state_db)}
        write_curve_csv(curve, path, header_lines(cfg, **extra))
        paths.append(path)
    return paths


def write_steady_outputs(cfg, rows, network, out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    paths = [write_network(cfg, network, out_dir, name)]
    path = Path(out_dir) / f"{name}_steady.csv"
    write_steady_csv(rows, path, header_lines(cfg))
    paths.append(path)
    return paths
