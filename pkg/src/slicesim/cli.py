"""Command-line entry point: slicesim run --config ... --experiment ..."""

import argparse
import sys

from . import config as config_mod
from .config import ConfigError
from .experiments import (experiment_decision_delay, experiment_revenue_sweep,
                          experiment_satisfaction, export_report)

EXPERIMENTS = ("revenue", "acceptance", "satisfaction", "delay", "all")
AGENTS = ("greedy", "qlearn", "dqn", "ddqn", "oracle")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="slicesim")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named experiment")
    run.add_argument("--config", help="config file (dotted-key text)")
    run.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    run.add_argument("--agent", choices=AGENTS,
                     help="restrict revenue/acceptance to one agent")
    run.add_argument("--seed", type=int, help="run a single seed instead of the list")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="config override, repeatable")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_mod.load(args.config) if args.config else config_mod.ExperimentConfig()
        config_mod.apply_overrides(cfg, args.overrides)
        if args.seed is not None:
            cfg.run.seeds = (args.seed,)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO

    def progress(msg):
        print(msg, file=sys.stderr)

    agents = (args.agent,) if args.agent else ("greedy", "qlearn", "dqn", "oracle")
    try:
        reports = []
        if args.experiment in ("revenue", "acceptance", "all"):
            reports.append(experiment_revenue_sweep(cfg, agents=agents, progress=progress))
        if args.experiment in ("satisfaction", "all"):
            reports.append(experiment_satisfaction(cfg, progress=progress))
        if args.experiment in ("delay", "all"):
            delay_agents = (args.agent,) if args.agent else ("greedy", "qlearn", "dqn", "ddqn")
            reports.append(experiment_decision_delay(cfg, agents=delay_agents,
                                                     progress=progress))
        for report in reports:
            for path in export_report(report, args.out):
                print(path)
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
