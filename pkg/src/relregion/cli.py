"""Command line front end: plan / bench / worlds / validate-config."""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .bench import (
    RunConfig,
    load_run_config,
    run_benchmark,
    validate_run_config,
    write_outputs,
)
from .environment import WORLD_NAMES, ConfigError, build_environment
from .graph import dump_graph
from .planner import plan

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relregion",
        description="Relevant-region sampling planner and benchmark harness",
    )
    p.add_argument("--version", action="version", version=f"relregion {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="run a single planning trial and print the path")
    sp.add_argument("--config", help="YAML run configuration file")
    sp.add_argument("--world", help="registered world name (alternative to --config)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sampler", default=None, help="uniform|informed|relevant|transition[:T]")
    sp.add_argument("--iterations", type=int, default=None)
    sp.add_argument("--time-budget-ms", type=float, default=None)
    sp.add_argument("--out", default=None, help="directory for graph dump and path file")

    sb = sub.add_parser("bench", help="run the multi-trial benchmark study")
    sb.add_argument("--config", required=True)
    sb.add_argument("--out", default=None, help="output directory (overrides config)")
    sb.add_argument("--seed", type=int, default=None)
    sb.add_argument("--trials", type=int, default=None)
    sb.add_argument("--sampler", default=None, help="run only this sampler label")
    sb.add_argument("--iterations", type=int, default=None)
    sb.add_argument("--time-budget-ms", type=float, default=None)

    sub.add_parser("worlds", help="list the registered benchmark worlds")

    sv = sub.add_parser("validate-config", help="check a run configuration file")
    sv.add_argument("--config", required=True)
    return p


def _cmd_plan(args) -> int:
    if args.config:
        cfg = load_run_config(args.config)
        env_config = cfg.environment
        planner_opts = dict(cfg.planner)
        sampler = args.sampler or cfg.samplers[0]
        seed = args.seed if args.seed is not None else cfg.seed
    elif args.world:
        env_config = {"world": args.world}
        planner_opts = {}
        sampler = args.sampler or "relevant"
        seed = args.seed
    else:
        raise ConfigError("plan needs --config or --world")
    if args.iterations is not None:
        planner_opts["iterations"] = args.iterations
    if args.time_budget_ms is not None:
        planner_opts["time_budget_ms"] = args.time_budget_ms
    if planner_opts.get("iterations") is None and planner_opts.get("time_budget_ms") is None:
        planner_opts["iterations"] = 2000  # keeps repeated runs byte-identical

    from .bench import _planner_config  # reuse label parsing and validation

    run = RunConfig(environment=env_config, planner=planner_opts, samplers=[sampler], seed=seed)
    env = build_environment(env_config)
    pc = _planner_config(run, sampler, trial=0)
    result = plan(env, pc)
    print(f"world {env.name}")
    print(f"sampler {sampler} seed {seed}")
    print(f"status {result.status}")
    print(f"iterations {result.iterations} vertices {result.vertices}")
    if result.best_cost is None:
        print("cost none")
    else:
        print(f"cost {result.best_cost:.9g}")
        print("path:")
        for x in result.best_path:
            print(" ".join(f"{c:.9g}" for c in x))
    if args.out:
        from pathlib import Path

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "graph.txt").write_text(dump_graph(result.graph), encoding="utf-8")
        with open(out / "path.csv", "w", encoding="utf-8", newline="\n") as fh:
            for x in result.best_path:
                fh.write(",".join(repr(float(c)) for c in x) + "\n")
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = load_run_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    if args.sampler is not None:
        cfg.samplers = [args.sampler]
    if args.iterations is not None:
        cfg.planner["iterations"] = args.iterations
    if args.time_budget_ms is not None:
        cfg.planner["time_budget_ms"] = args.time_budget_ms
    if args.out is not None:
        cfg.out_dir = args.out
    if cfg.planner.get("iterations") is None and cfg.planner.get("time_budget_ms") is None:
        raise ConfigError("bench needs a budget: iterations and/or time_budget_ms")
    cfg = RunConfig(**cfg.__dict__)  # re-validate after overrides
    validate_run_config(cfg)
    rows, summary = run_benchmark(cfg)
    for label, stats in summary["samplers"].items():
        med = stats["final_median"]
        med_txt = "none" if med is None else f"{med:.9g}"
        print(
            f"{label}: success {stats['success_rate']:.2f} "
            f"final-median {med_txt} errors {stats['errors']}"
        )
    if cfg.out_dir:
        paths = write_outputs(rows, summary, cfg.out_dir)
        print(f"wrote {paths['csv']} {paths['summary']} {paths['plot']}")
    return EXIT_OK


def _cmd_worlds() -> int:
    for name in WORLD_NAMES:
        env = build_environment(name)
        print(f"{name} d={env.d} eta={env.eta:g} costmap={env.costmap.variant}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = load_run_config(args.config)
    validate_run_config(cfg)
    print("ok")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code or 0)
    try:
        if args.command == "plan":
            return _cmd_plan(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "worlds":
            return _cmd_worlds()
        if args.command == "validate-config":
            return _cmd_validate(args)
        raise RuntimeError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
