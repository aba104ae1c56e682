"""Seeded multi-trial benchmark runner, CSV/summary emission, plot-script
generation. Trials are embarrassingly parallel; each gets seed = base + trial."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .environment import ConfigError, build_environment
from .planner import SAMPLERS, BenchRecord, PlannerConfig, plan

CSV_HEADER = "sampler,trial,iteration,elapsed_ms,best_cost,vertices"

_PLANNER_KEYS = {
    "eta", "eps", "p_rel", "p_goal", "lambdas", "n_q",
    "iterations", "time_budget_ms", "t_init", "n_fail_max",
}


@dataclass
class RunConfig:
    environment: dict
    planner: dict = field(default_factory=dict)
    samplers: list = field(default_factory=lambda: ["relevant"])
    trials: int = 1
    seed: int = 0
    out_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed < 2**63:  # headroom for seed + trial offsets
            raise ConfigError("seed must be a non-negative 63-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.samplers:
            raise ConfigError("samplers list is empty")
        unknown = set(self.planner) - _PLANNER_KEYS
        if unknown:
            raise ConfigError(f"unknown planner option(s): {sorted(unknown)}")
        for label in self.samplers:
            parse_sampler_label(label)


def parse_sampler_label(label: str) -> tuple[str, float | None]:
    """Split 'transition:0.1' style labels into (sampler, t_init)."""
    name, sep, arg = str(label).partition(":")
    if name not in SAMPLERS:
        raise ConfigError(f"unknown sampler '{label}', expected one of {SAMPLERS}")
    if not sep:
        return name, None
    if name != "transition":
        raise ConfigError(f"only the transition sampler takes a parameter, got '{label}'")
    try:
        return name, float(arg)
    except ValueError:
        raise ConfigError(f"bad T_init in sampler label '{label}'") from None


def load_run_config(path) -> RunConfig:
    """Parse the YAML run configuration (environment/planner/bench sections)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping with environment/planner/bench sections")
    unknown = set(raw) - {"environment", "planner", "bench"}
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    env_sec = raw.get("environment")
    if env_sec is None:
        raise ConfigError("config needs an 'environment' section")
    planner_sec = raw.get("planner") or {}
    if not isinstance(planner_sec, dict):
        raise ConfigError("'planner' section must be a mapping")
    bench_sec = raw.get("bench") or {}
    if not isinstance(bench_sec, dict):
        raise ConfigError("'bench' section must be a mapping")
    allowed = {"samplers", "trials", "seed", "out_dir", "workers"}
    unknown = set(bench_sec) - allowed
    if unknown:
        raise ConfigError(f"unknown bench option(s): {sorted(unknown)}")
    return RunConfig(
        environment=env_sec,
        planner=dict(planner_sec),
        samplers=list(bench_sec.get("samplers", ["relevant"])),
        trials=int(bench_sec.get("trials", 1)),
        seed=int(bench_sec.get("seed", 0)),
        out_dir=bench_sec.get("out_dir"),
        workers=int(bench_sec.get("workers", 1)),
    )


def validate_run_config(cfg: RunConfig) -> None:
    """Full dry validation: environment buildable, planner options accepted."""
    build_environment(cfg.environment)
    for label in cfg.samplers:
        _planner_config(cfg, label, trial=0)


def _planner_config(cfg: RunConfig, label: str, trial: int) -> PlannerConfig:
    name, t_init = parse_sampler_label(label)
    opts = dict(cfg.planner)
    if "lambdas" in opts:
        opts["lambdas"] = tuple(opts["lambdas"])
    if t_init is not None:
        opts["t_init"] = t_init
    try:
        return PlannerConfig(sampler=name, seed=cfg.seed + trial, **opts)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad planner config: {exc}") from exc


def _thin(records) -> list:
    """Improvement events plus the final row; reconstructs the full step curve."""
    out = []
    prev = object()
    for rec in records:
        if rec.best_cost != prev:
            out.append(rec)
            prev = rec.best_cost
    if records and (not out or out[-1] is not records[-1]):
        out.append(records[-1])
    return out


def _trial_job(args):
    env_config, cfg_dict, label, trial = args
    cfg = RunConfig(**cfg_dict)
    env = build_environment(env_config)
    pc = _planner_config(cfg, label, trial)
    result = plan(env, pc)
    recs = [
        BenchRecord(trial, r.iteration, r.elapsed_ms, r.best_cost, r.vertices)
        for r in _thin(result.records)
    ]
    return label, trial, recs


def run_benchmark(cfg: RunConfig):
    """Run every sampler x trial cell; returns (rows, summary).

    rows are (sampler_label, BenchRecord) sorted by (sampler, trial, iteration).
    A trial that raises is quarantined: it contributes no rows and counts as a
    failure in the summary.
    """
    build_environment(cfg.environment)  # fail fast on a bad world
    cfg_dict = {
        "environment": cfg.environment,
        "planner": cfg.planner,
        "samplers": cfg.samplers,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "out_dir": cfg.out_dir,
        "workers": 1,
    }
    jobs = [
        (cfg.environment, cfg_dict, label, trial)
        for label in cfg.samplers
        for trial in range(cfg.trials)
    ]
    rows = []
    errors: dict[str, int] = {label: 0 for label in cfg.samplers}
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_trial_job, job) for job in jobs]
            for job, fut in zip(jobs, futures):
                try:
                    label, trial, recs = fut.result()
                    rows.extend((label, r) for r in recs)
                except Exception:
                    errors[job[2]] += 1
    else:
        for job in jobs:
            try:
                label, trial, recs = _trial_job(job)
                rows.extend((label, r) for r in recs)
            except Exception:
                errors[job[2]] += 1
    rows.sort(key=lambda lr: (lr[0], lr[1].trial, lr[1].iteration))
    summary = summarize(cfg, rows, errors)
    return rows, summary


# ---------------------------------------------------------------------------
# Summaries

def _checkpoints(cfg: RunConfig):
    """Geometric checkpoint grid over the budget, plus which axis it lives on."""
    time_ms = cfg.planner.get("time_budget_ms")
    iters = cfg.planner.get("iterations")
    if time_ms is not None:
        grid = np.geomspace(max(time_ms / 256.0, 1.0), float(time_ms), 24)
        return "elapsed_ms", [float(t) for t in grid]
    if iters is None or iters < 1:
        return "iteration", [0]
    grid = np.unique(np.rint(np.geomspace(max(iters / 256.0, 1.0), float(iters), 24)))
    return "iteration", [int(t) for t in grid]


def _best_at(points, t):
    best = math.inf
    for tt, cost in points:
        if tt <= t and cost < best:
            best = cost
    return best


def _percentile(values, q: float) -> float:
    """Linear-interpolation percentile that tolerates +inf sentinels."""
    s = sorted(values)
    pos = (len(s) - 1) * q / 100.0
    lo = math.floor(pos)
    hi = math.ceil(pos)
    frac = pos - lo
    if frac == 0.0 or s[lo] == s[hi]:
        return s[lo]
    if math.isinf(s[lo]) or math.isinf(s[hi]):
        return s[hi]
    return s[lo] + (s[hi] - s[lo]) * frac


def _quantiles(values):
    out = [_percentile(values, q) for q in (25.0, 50.0, 75.0)]
    return tuple(float(x) if math.isfinite(x) else None for x in out)


def summarize(cfg: RunConfig, rows, errors=None) -> dict:
    """Per-sampler success rate and quartile convergence stats at checkpoints."""
    axis, checkpoints = _checkpoints(cfg)
    env_name = cfg.environment if isinstance(cfg.environment, str) else (
        cfg.environment.get("world") or cfg.environment.get("name", "custom")
    )
    by_sampler: dict[str, dict[int, list]] = {label: {} for label in cfg.samplers}
    for label, rec in rows:
        t = rec.elapsed_ms if axis == "elapsed_ms" else rec.iteration
        cost = rec.best_cost if rec.best_cost is not None else math.inf
        by_sampler[label].setdefault(rec.trial, []).append((t, cost))
    samplers = {}
    for label in cfg.samplers:
        trials = by_sampler[label]
        finals = [_best_at(trials.get(t, []), math.inf) for t in range(cfg.trials)]
        success = sum(1 for c in finals if math.isfinite(c))
        med_rows, q1_rows, q3_rows = [], [], []
        for t in checkpoints:
            vals = [_best_at(trials.get(k, []), t) for k in range(cfg.trials)]
            q1, med, q3 = _quantiles(vals)
            q1_rows.append(q1)
            med_rows.append(med)
            q3_rows.append(q3)
        samplers[label] = {
            "success_rate": success / cfg.trials,
            "errors": 0 if errors is None else errors.get(label, 0),
            "median": med_rows,
            "q1": q1_rows,
            "q3": q3_rows,
            "final_median": _quantiles(finals)[1],
            "final_costs": [c if math.isfinite(c) else None for c in finals],
        }
    return {
        "schema": "relregion-bench-summary/1",
        "environment": env_name,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "axis": axis,
        "checkpoints": checkpoints,
        "samplers": samplers,
    }


# ---------------------------------------------------------------------------
# Emission

def emit_csv(rows, path) -> None:
    """Write (sampler, BenchRecord) rows; LF endings, deterministic order."""
    ordered = sorted(rows, key=lambda lr: (lr[0], lr[1].trial, lr[1].iteration))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for label, r in ordered:
            cost = "" if r.best_cost is None else repr(float(r.best_cost))
            fh.write(
                f"{label},{r.trial},{r.iteration},{float(r.elapsed_ms)!r},{cost},{r.vertices}\n"
            )


def emit_summary(summary: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Generated convergence and success-rate plots for {env_name!r}.

Reads {csv_name!r} next to this script and renders:
  * best cost vs {axis} (median line, interquartile band) per sampler
  * success-rate bar chart per sampler
"""
import csv
import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, {csv_name!r})
ENV_NAME = {env_name!r}
AXIS = {axis!r}
CHECKPOINTS = {checkpoints!r}
SAMPLERS = {samplers!r}
TRIALS = {trials!r}

series = {{label: {{}} for label in SAMPLERS}}
with open(CSV_PATH, newline="") as fh:
    for row in csv.DictReader(fh):
        label = row["sampler"]
        if label not in series:
            continue
        t = float(row[AXIS])
        cost = float(row["best_cost"]) if row["best_cost"] else math.inf
        series[label].setdefault(int(row["trial"]), []).append((t, cost))


def best_at(points, t):
    best = math.inf
    for tt, c in points:
        if tt <= t and c < best:
            best = c
    return best


fig, ax = plt.subplots(figsize=(7, 4.5))
for label in SAMPLERS:
    trials = series[label]
    med, q1, q3, xs = [], [], [], []
    for t in CHECKPOINTS:
        vals = [best_at(trials.get(k, []), t) for k in range(TRIALS)]
        lo, m, hi = np.percentile(vals, [25.0, 50.0, 75.0])
        if math.isfinite(m):
            xs.append(t)
            med.append(m)
            q1.append(lo if math.isfinite(lo) else m)
            q3.append(hi if math.isfinite(hi) else m)
    if xs:
        (line,) = ax.plot(xs, med, label=label)
        ax.fill_between(xs, q1, q3, alpha=0.2, color=line.get_color())
ax.set_xscale("log")
ax.set_xlabel(AXIS)
ax.set_ylabel("best solution cost")
ax.set_title(f"Convergence: {{ENV_NAME}}")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, f"convergence_{{ENV_NAME}}.png"), dpi=160)

fig2, ax2 = plt.subplots(figsize=(6, 4))
rates = []
for label in SAMPLERS:
    trials = series[label]
    ok = sum(
        1 for k in range(TRIALS) if math.isfinite(best_at(trials.get(k, []), math.inf))
    )
    rates.append(100.0 * ok / TRIALS)
ax2.bar(range(len(SAMPLERS)), rates)
ax2.set_xticks(range(len(SAMPLERS)))
ax2.set_xticklabels(SAMPLERS, rotation=20, ha="right")
ax2.set_ylabel("successful trials [%]")
ax2.set_ylim(0, 105)
ax2.set_title(f"Success rate: {{ENV_NAME}}")
fig2.tight_layout()
fig2.savefig(os.path.join(HERE, f"success_rate_{{ENV_NAME}}.png"), dpi=160)
print("wrote plots next to", CSV_PATH)
'''


def emit_plot_script(summary: dict, path, csv_name: str = "records.csv") -> None:
    """Write a self-contained matplotlib script that renders the study's
    convergence chart and (always) its success-rate bar chart from the CSV."""
    script = _PLOT_TEMPLATE.format(
        env_name=summary["environment"],
        csv_name=csv_name,
        axis=summary["axis"],
        checkpoints=summary["checkpoints"],
        samplers=list(summary["samplers"]),
        trials=summary["trials"],
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(script)


def write_outputs(rows, summary: dict, out_dir) -> dict:
    """Write records.csv, summary.json and plot_study.py into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out / "records.csv",
        "summary": out / "summary.json",
        "plot": out / "plot_study.py",
    }
    emit_csv(rows, paths["csv"])
    emit_summary(summary, paths["summary"])
    emit_plot_script(summary, paths["plot"], csv_name="records.csv")
    return paths
