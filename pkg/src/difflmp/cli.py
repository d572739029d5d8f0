"""Command-line entry point: ``difflmp {transient,steady-sweep,gen-network}``.

Exit codes: 0 on success, 2 on configuration errors, 3 on generation errors.
"""

import argparse
import logging
import os
import sys

from difflmp.errors import ConfigError, GenerationError, ParameterError
from difflmp.experiment import (
    build_network,
    parse_config,
    run_steady_sweep,
    run_transient_experiment,
    write_network,
    write_steady_outputs,
    write_transient_outputs,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GENERATION = 3

log = logging.getLogger("difflmp")


def _rule_pair(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected MATRIX=RULE, got {text!r}")
    return key.strip(), value.strip()


def _jobs(text):
    if text == "max":
        return os.cpu_count() or 1
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("jobs must be >= 1 or 'max'")
    return n


def _add_common(parser):
    parser.add_argument("--config", help="YAML file with ExperimentConfig keys")
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    parser.add_argument("--name", default="run", help="output file prefix")
    parser.add_argument(
        "--jobs", type=_jobs, default=1, help="worker processes, an integer or 'max'"
    )
    g = parser.add_argument_group("experiment overrides")
    g.add_argument("--n-nodes", type=int)
    g.add_argument("--radius", type=float)
    g.add_argument("--filter-len", type=int)
    g.add_argument("--n-iters", type=int)
    g.add_argument("--n-trials", type=int)
    g.add_argument("--mu", type=float)
    g.add_argument("--gsnr-db", type=float)
    g.add_argument("--alpha-list", type=float, nargs="+")
    g.add_argument("--p-list", type=float, nargs="+")
    g.add_argument(
        "--weight-rule",
        type=_rule_pair,
        action="append",
        metavar="MATRIX=RULE",
        help="e.g. a2=metropolis; repeat for a1, a2, c",
    )
    g.add_argument("--algorithm")
    g.add_argument("--seed", type=int)
    g.add_argument("--window-fraction", type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="difflmp",
        description="Diffusion LMP simulations in alpha-stable noise.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("transient", "averaged learning curves, one file per p"),
        ("steady-sweep", "steady-state MSD over alpha x p"),
        ("gen-network", "write the network realization only"),
    ):
        _add_common(sub.add_parser(name, help=help_text))
    return parser


_OVERRIDE_KEYS = (
    "n_nodes",
    "radius",
    "filter_len",
    "n_iters",
    "n_trials",
    "mu",
    "gsnr_db",
    "alpha_list",
    "p_list",
    "algorithm",
    "seed",
    "window_fraction",
)


def _overrides(args):
    out = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
    if args.weight_rule:
        out["weight_rule"] = dict(args.weight_rule)
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = parse_config(args.config, _overrides(args))
        network = build_network(cfg)
        if args.command == "gen-network":
            os.makedirs(args.out_dir, exist_ok=True)
            paths = [write_network(cfg, network, args.out_dir, args.name)]
        elif args.command == "transient":
            curves = run_transient_experiment(cfg, network, jobs=args.jobs)
            paths = write_transient_outputs(cfg, curves, network, args.out_dir, args.name)
            for p, curve in curves.items():
                log.info("p=%g steady %.3f dB", p, curve.steady_state_db)
        else:
            rows = run_steady_sweep(cfg, network, jobs=args.jobs)
            paths = write_steady_outputs(cfg, rows, network, args.out_dir, args.name)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
