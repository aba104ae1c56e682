"""Main planning loop: sample, extend, exploit, track the incumbent solution."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import StateVec, l2_heuristic, rng_stream
from .costmap import default_segments, edge_cost
from .environment import Environment, in_goal, is_motion_valid, is_state_valid
from .graph import PlannerGraph, rebuild_relevant_queue, update_relevant_queue
from .sampling import (
    TransitionState,
    informed_sample,
    relevant_region_sample,
    transition_test,
    uniform_goal_biased,
)

SAMPLERS = ("uniform", "informed", "relevant", "transition")

OPT_TOL = 1e-12  # incumbent within this of the heuristic bound counts as optimal


@dataclass(frozen=True)
class BenchRecord:
    """One convergence-curve row. elapsed_ms is wall-clock for time-budgeted
    runs and a virtual 1-ms-per-iteration clock for iteration budgets, which
    keeps iteration-budgeted benchmark output exactly reproducible."""

    trial: int
    iteration: int
    elapsed_ms: float
    best_cost: float | None
    vertices: int


@dataclass
class PlannerConfig:
    sampler: str = "relevant"
    eta: float | None = None  # step size; None adopts the environment default
    eps: float | None = None  # relevant ball radius; None means 1.5 * eta
    p_rel: float = 0.5
    p_goal: float = 0.05
    lambdas: tuple = (10.0, 5.0, 100.0)
    n_q: int = 10
    iterations: int | None = None
    time_budget_ms: float | None = None
    seed: int = 0
    t_init: float = 1.0  # transition sampler only
    n_fail_max: int = 10
    k_near_max: int | None = 24  # cap on connection candidates per insertion

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler '{self.sampler}', expected one of {SAMPLERS}")
        for name in ("p_rel", "p_goal"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise ValueError(f"{name} must be in [0, 1)")
        if len(self.lambdas) != 3 or any(l <= 0.0 for l in self.lambdas):
            raise ValueError("lambdas must be three positive weights")
        if self.n_q < 1:
            raise ValueError("n_q must be >= 1")
        if self.iterations is None and self.time_budget_ms is None:
            raise ValueError("set a budget: iterations and/or time_budget_ms")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.time_budget_ms is not None and self.time_budget_ms <= 0.0:
            raise ValueError("time_budget_ms must be positive")
        if self.t_init <= 0.0:
            raise ValueError("t_init must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class PlanResult:
    best_cost: float | None
    best_path: list
    iterations: int
    elapsed_ms: float
    vertices: int
    status: str  # solved | no_solution | optimal
    records: list = field(default_factory=list, repr=False)
    graph: PlannerGraph | None = field(default=None, repr=False)


def _unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


class Planner:
    """One planning trial; owns its graph and random stream."""

    def __init__(self, env: Environment, config: PlannerConfig):
        self.env = env
        self.config = config
        self.eta = config.eta if config.eta is not None else env.eta
        self.eps = config.eps if config.eps is not None else 1.5 * self.eta
        self.rng = rng_stream(config.seed)
        self.graph = PlannerGraph(env.x_s, env.x_g, config.lambdas)
        self.v_goal: list[int] = []
        self.c_i = math.inf
        self.c_min = l2_heuristic(env.x_s, env.x_g)
        self.iteration = 0
        self.records: list[BenchRecord] = []
        self._queue_ci = None
        # standard asymptotic-optimality connection radius, free-space measure
        # upper-bounded by the bounds box
        d = env.d
        mu = env.bounds.volume()
        self._gamma_nn = 2.0 * ((1.0 + 1.0 / d) * mu / _unit_ball_volume(d)) ** (1.0 / d)
        if config.sampler == "transition":
            k = 0.5 * (env.costmap(env.x_s) + env.costmap(env.x_g))
            self.ts = TransitionState(config.t_init, k_const=k, n_fail_max=config.n_fail_max)
        else:
            self.ts = None
        self._t0 = time.perf_counter()
        self._real_clock = config.time_budget_ms is not None

    # -- helpers ------------------------------------------------------------

    def elapsed_ms(self) -> float:
        if self._real_clock:
            return (time.perf_counter() - self._t0) * 1e3
        return float(self.iteration)

    def _refresh_incumbent(self) -> None:
        if self.v_goal:
            self.c_i = min(self.graph.g[v] for v in self.v_goal)

    def _connection_radius(self) -> float:
        n = max(len(self.graph), 2)
        return min(self.eta, self._gamma_nn * (math.log(n) / n) ** (1.0 / self.env.d))

    def _edge_cost(self, x1: StateVec, x2: StateVec) -> float:
        dist = l2_heuristic(x1, x2)
        return edge_cost(self.env.costmap, x1, x2, default_segments(dist, self.eta))

    # -- Algorithm steps ----------------------------------------------------

    def extend(self, x_rand: StateVec):
        """Steer from the nearest vertex toward x_rand and insert the new state
        with the best feasible parent in its neighborhood. None on failure."""
        graph, env = self.graph, self.env
        v_nearest = graph.nearest(x_rand)
        s_nearest = graph.state(v_nearest)
        dist = l2_heuristic(s_nearest, x_rand)
        if dist <= 1e-12:
            return None
        if dist <= self.eta:
            x_new = np.array(x_rand, dtype=float)
        else:
            x_new = s_nearest + (self.eta / dist) * (x_rand - s_nearest)
        if not is_state_valid(env, x_new):
            return None
        if self.ts is not None:
            c_from = env.costmap(s_nearest)
            c_to = env.costmap(x_new)
            if not transition_test(self.ts, c_from, c_to, self.rng):
                return None
        near_ids = graph.near(x_new, self._connection_radius())
        k_max = self.config.k_near_max
        if k_max is not None and len(near_ids) > k_max:
            # bounded-degree insertion: keep the k nearest candidates so dense
            # clusters do not blow up per-insertion edge work
            d2 = np.einsum(
                "nd,nd->n", graph.states[near_ids] - x_new, graph.states[near_ids] - x_new
            )
            keep = np.argpartition(d2, k_max)[:k_max]
            near_ids = [near_ids[i] for i in keep]
        if v_nearest not in near_ids:
            near_ids.append(v_nearest)
        edges = []
        best_parent, best_g, best_w = None, math.inf, None
        for u in near_ids:
            s_u = graph.state(u)
            if not is_motion_valid(env, s_u, x_new):
                continue
            w = self._edge_cost(s_u, x_new)
            edges.append((u, w))
            if graph.g[u] + w < best_g:
                best_parent, best_g, best_w = u, graph.g[u] + w, w
        if best_parent is None:
            return None
        v_new = graph.insert_vertex(x_new, best_parent, best_w)
        if v_new is None:
            return None
        for u, w in edges:
            if u != best_parent:
                graph.add_edge(v_new, u, w)
        graph.rewire_global([v_new])
        if in_goal(env, x_new):
            self.v_goal.append(v_new)
        return v_new

    def _draw_sample(self) -> StateVec:
        cfg, env = self.config, self.env
        if cfg.sampler == "relevant":
            # p_rel == 0 skips the draw so the stream matches the pure
            # informed planner under the same seed
            u = self.rng.random() if cfg.p_rel > 0.0 else 1.0
            if u < cfg.p_rel and math.isfinite(self.c_i):
                x = relevant_region_sample(
                    self.graph, env, self.c_i, self.rng, self.eps, n_q=cfg.n_q
                )
                if x is not None:
                    return x
            return informed_sample(
                self.rng, env.x_s, env.x_g, self.c_i, env.bounds, p_goal=cfg.p_goal
            )
        if cfg.sampler == "informed":
            return informed_sample(
                self.rng, env.x_s, env.x_g, self.c_i, env.bounds, p_goal=cfg.p_goal
            )
        # uniform exploration, optionally filtered by the transition test in extend
        return uniform_goal_biased(self.rng, env, cfg.p_goal)

    def plan_iteration(self) -> None:
        """One loop body: refresh c_i, sample, extend, exploit, record."""
        self.iteration += 1
        self._refresh_incumbent()
        x_rand = self._draw_sample()
        self.extend(x_rand)  # exploitation (global rewiring) runs inside
        self._refresh_incumbent()
        if math.isfinite(self.c_i):
            if self._queue_ci != self.c_i:
                rebuild_relevant_queue(self.graph, self.c_i)
                self._queue_ci = self.c_i
            else:
                update_relevant_queue(self.graph, self.c_i)
        self.records.append(
            BenchRecord(
                trial=0,
                iteration=self.iteration,
                elapsed_ms=self.elapsed_ms(),
                best_cost=self.c_i if math.isfinite(self.c_i) else None,
                vertices=len(self.graph),
            )
        )

    def _budget_left(self) -> bool:
        cfg = self.config
        if cfg.iterations is not None and self.iteration >= cfg.iterations:
            return False
        if cfg.time_budget_ms is not None:
            if (time.perf_counter() - self._t0) * 1e3 >= cfg.time_budget_ms:
                return False
        return True

    def run(self) -> PlanResult:
        status = "no_solution"
        while self._budget_left():
            if math.isfinite(self.c_i) and self.c_i - self.c_min <= OPT_TOL:
                status = "optimal"
                break
            self.plan_iteration()
        self._refresh_incumbent()
        if math.isfinite(self.c_i) and status != "optimal":
            status = "solved"
        best_path = []
        best_cost = None
        if math.isfinite(self.c_i):
            best_cost = self.c_i
            best_v = min(self.v_goal, key=lambda v: (self.graph.g[v], v))
            best_path = [self.graph.state(v).copy() for v in self.graph.path_to_root(best_v)]
        return PlanResult(
            best_cost=best_cost,
            best_path=best_path,
            iterations=self.iteration,
            elapsed_ms=self.elapsed_ms(),
            vertices=len(self.graph),
            status=status,
            records=self.records,
            graph=self.graph,
        )


def plan(env: Environment, config: PlannerConfig) -> PlanResult:
    """Run one seeded planning trial to its budget."""
    return Planner(env, config).run()
