"""Acceptance criteria, one test per criterion.

Each test prints a single `[acceptance] <name>: PASS|FAIL` line (run pytest
with -s to see them live). The two benchmark-study criteria run wall-clock
budgets and take ~15 min each; their reports land in results/ regardless of
the verdict.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as scipy_dijkstra

from relregion.bench import RunConfig, run_benchmark, write_outputs
from relregion.core import l2_heuristic, rng_stream, sample_unit_direction
from relregion.costmap import PotentialCostMap, UniformCostMap, edge_cost
from relregion.environment import WORLD_NAMES, build_environment
from relregion.graph import PlannerGraph
from relregion.planner import Planner, PlannerConfig
from relregion.sampling import StepLimitInputs, relevant_region_sample, step_limit_general, step_limit_uniform

RESULTS = Path(__file__).resolve().parent.parent / "results"


def _report(name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"[acceptance] {name}: {verdict}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def _bisect_oracle(g_gp, h, ct, c, iters=200):
    # planar-coordinate norm via hypot: accurate even where the quadratic
    # radicand would cancel (straight-at-goal directions)
    st = np.sqrt(np.maximum((1.0 - ct) * (1.0 + ct), 0.0))
    lo = np.zeros_like(g_gp)
    hi = g_gp / c

    def phi(x):
        return x * c + np.hypot(h + x * ct, x * st) - g_gp

    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = phi(mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def test_step_limit_oracle_equivalence():
    """Closed-form gamma_rel vs bisection on the defining inequality, 1e-9."""
    t0 = time.perf_counter()
    rng = rng_stream(1001)
    n = 100_000
    h = rng.random(n) * 10.0
    h[rng.random(n) < 0.05] = 0.0
    g = h + 1e-6 + rng.random(n) * 10.0
    ct = rng.random(n) * 2.0 - 1.0
    c = 1.0 + rng.random(n) * 9.0
    c[rng.random(n) < 0.25] = 1.0  # uniform cost-map branch
    # exact Delta=0 branch: h*C == g_gp together with theta = pi
    delta_zero = rng.random(n) < 0.05
    h[delta_zero & (h == 0.0)] = 1.0
    c[delta_zero] = np.maximum(c[delta_zero], 1.25)
    g[delta_zero] = h[delta_zero] * c[delta_zero]
    ct[delta_zero] = -1.0
    eps = 0.05 + rng.random(n) * 5.0

    roots = _bisect_oracle(g, h, ct, c)
    worst = 0.0
    n_delta0 = 0
    for i in range(n):
        inp = StepLimitInputs(g[i], h[i], ct[i], c_vp=c[i], eps=eps[i])
        closed = step_limit_general(inp) if c[i] > 1.0 else step_limit_uniform(inp)
        oracle = min(float(roots[i]), eps[i])
        err = abs(closed - oracle) / max(abs(oracle), 1e-12)
        worst = max(worst, err)
        if delta_zero[i]:
            n_delta0 += 1
            assert closed == pytest.approx(min(g[i] / c[i], eps[i]), rel=1e-12)
    elapsed = time.perf_counter() - t0
    _report(
        "step-limit-oracle-equivalence",
        worst < 1e-9 and elapsed < 30.0,
        f"n={n}, delta0-cases={n_delta0}, worst-rel-err={worst:.2e}, {elapsed:.1f}s",
    )


def test_theorem1_step_limit_positive():
    """gamma_rel > 0 for 1e5 random relevant (v_p, e-hat) pairs."""
    rng = rng_stream(1002)
    n = 100_000
    count = 0
    min_gamma = math.inf
    while count < n:
        d = int(rng.integers(2, 8))
        v_p = rng.standard_normal(d) * 8.0
        x_g = rng.standard_normal(d) * 8.0
        e_hat = sample_unit_direction(rng, d)
        h = l2_heuristic(v_p, x_g)
        slack = 1e-9 + rng.random() * 12.0
        g_gp = h + slack  # v_p in V_rel: g_T + h < c_i <=> g_gp > h
        if h > 0.0:
            ct = float((v_p - x_g) @ e_hat) / h
            ct = min(1.0, max(-1.0, ct))
        else:
            ct = 0.0
        c_vp = 1.0 if rng.random() < 0.3 else 1.0 + rng.random() * 9.0
        eps = 0.05 + rng.random() * 3.0
        inp = StepLimitInputs(g_gp, h, ct, c_vp=c_vp, eps=eps)
        gamma_u = step_limit_uniform(StepLimitInputs(g_gp, h, ct, eps=eps))
        gamma_g = step_limit_general(inp)
        assert gamma_u > 0.0 and gamma_g > 0.0
        min_gamma = min(min_gamma, gamma_u, gamma_g)
        count += 1
    _report("theorem1-gamma-positive", True, f"n={n}, min gamma={min_gamma:.3e}")


def _grown_planner(world: str, seed: int) -> Planner:
    env = build_environment(world)
    p = Planner(env, PlannerConfig(sampler="relevant", iterations=8000, seed=seed))
    while not math.isfinite(p.c_i) or p.iteration < 400:
        if p.iteration >= 8000:
            break
        p.plan_iteration()
    assert math.isfinite(p.c_i), f"{world}: no incumbent within the growth budget"
    return p


def test_theorem2_relevant_subset_of_informed():
    """1e6 relevant-region samples across all worlds, zero violations of the
    strict informed-set inequality."""
    per_world = 125_000
    violations = 0
    total = 0
    for idx, world in enumerate(WORLD_NAMES):
        p = _grown_planner(world, seed=2000 + idx)
        env, g, c_i = p.env, p.graph, p.c_i
        rng = rng_stream(3000 + idx)
        for _ in range(per_world):
            x = relevant_region_sample(g, env, c_i, rng, p.eps, n_q=10)
            assert x is not None
            total += 1
            if l2_heuristic(x, env.x_s) + l2_heuristic(x, env.x_g) >= c_i:
                violations += 1
    _report(
        "theorem2-informed-subset",
        violations == 0 and total == per_world * len(WORLD_NAMES),
        f"samples={total}, violations={violations}",
    )


def _sssp(graph: PlannerGraph) -> np.ndarray:
    n = len(graph)
    rows, cols, vals = [], [], []
    for u in range(n):
        for v, w in graph.adj[u].items():
            rows.append(u)
            cols.append(v)
            vals.append(w)
    mat = csr_matrix((vals, (rows, cols)), shape=(n, n))
    return scipy_dijkstra(mat, directed=False, indices=0)


def test_rewiring_matches_shortest_path_oracle():
    """g values equal the textbook SSSP oracle after each of 1e3 insertions."""
    rng = rng_stream(1004)
    g = PlannerGraph(np.zeros(2), np.array([12.0, 12.0]))
    # grow the base 200-vertex graph
    while len(g) < 200:
        x = rng.random(2) * 12.0
        nearest = g.nearest(x)
        v = g.insert_vertex(x, nearest, l2_heuristic(g.state(nearest), x))
        if v is None:
            continue
        for u in g.near(x, 2.5):
            if u != v and u != nearest:
                g.add_edge(u, v, l2_heuristic(g.state(u), x))
        g.rewire_global([v])
    worst = 0.0
    for event in range(1000):
        if event % 2 == 0:  # new vertex with neighborhood edges
            x = rng.random(2) * 12.0
            nearest = g.nearest(x)
            v = g.insert_vertex(x, nearest, l2_heuristic(g.state(nearest), x))
            if v is None:
                continue
            for u in g.near(x, 1.8):
                if u != v and u != nearest:
                    g.add_edge(u, v, l2_heuristic(g.state(u), x))
            g.rewire_global([v])
        else:  # random shortcut edge
            u, v = rng.integers(0, len(g), size=2)
            if u != v:
                w = l2_heuristic(g.state(int(u)), g.state(int(v)))
                if w > 0.0:
                    g.add_edge(int(u), int(v), w)
                    g.rewire_global([int(u), int(v)])
        oracle = _sssp(g)
        finite = np.isfinite(oracle)
        diff = np.abs(np.asarray(g.g)[finite] - oracle[finite]).max()
        worst = max(worst, float(diff))
        assert worst < 1e-9, f"event {event}: diff {worst}"
    _report("rewiring-oracle", worst < 1e-9, f"events=1000, max |g - oracle| = {worst:.2e}")


def test_edge_cost_reduction_and_quadrature():
    """Uniform edge cost is the Euclidean distance (1e-12); potential-map edge
    cost matches adaptive quadrature to 1e-4 relative."""
    rng = rng_stream(1005)
    uni = UniformCostMap()
    worst_uni = 0.0
    for _ in range(10_000):
        d = int(rng.integers(2, 7))
        a = rng.standard_normal(d) * 10.0
        b = rng.standard_normal(d) * 10.0
        n_seg = int(rng.integers(1, 40))
        worst_uni = max(worst_uni, abs(edge_cost(uni, a, b, n_seg) - l2_heuristic(a, b)))

    pot = PotentialCostMap([[0.0, 0.0], [3.0, 2.0]])
    worst_pot = 0.0
    for _ in range(150):
        a = rng.standard_normal(2) * 5.0
        b = rng.standard_normal(2) * 5.0
        if l2_heuristic(a, b) < 1e-6:
            continue
        delta = b - a
        ref, _ = integrate.quad(
            lambda s: pot(a + s * delta), 0.0, 1.0, epsabs=1e-11, epsrel=1e-11, limit=400
        )
        ref *= l2_heuristic(a, b)
        val = edge_cost(pot, a, b, 4000)
        worst_pot = max(worst_pot, abs(val - ref) / abs(ref))
    _report(
        "edge-cost-reduction",
        worst_uni <= 1e-12 and worst_pot < 1e-4,
        f"uniform max err={worst_uni:.2e}, potential max rel err={worst_pot:.2e}",
    )


@pytest.mark.slow
def test_qualitative_convergence_relevant_vs_informed():
    """Relevant sampling's median final cost beats informed on both worlds
    (20 trials x 10 s each); the report is written before the verdict."""
    verdicts = []
    details = []
    for world in ("multi_obstacle_2d", "potential_2d"):
        cfg = RunConfig(
            environment={"world": world},
            planner={"time_budget_ms": 10_000.0},
            samplers=["relevant", "informed"],
            trials=20,
            seed=5000,
        )
        rows, summary = run_benchmark(cfg)
        write_outputs(rows, summary, RESULTS / "acceptance_convergence" / world)
        rel = summary["samplers"]["relevant"]["final_median"]
        inf_ = summary["samplers"]["informed"]["final_median"]
        ok = rel is not None and inf_ is not None and rel <= inf_
        verdicts.append(ok)
        details.append(f"{world}: relevant={rel} informed={inf_}")
    _report("qualitative-convergence", all(verdicts), "; ".join(details))


@pytest.mark.slow
def test_success_rate_terrain():
    """Relevant sampling solves every terrain trial; the transition-test
    baseline fails trials for at least one initial temperature."""
    cfg = RunConfig(
        environment={"world": "terrain_2d"},
        planner={"time_budget_ms": 5_000.0},
        samplers=["relevant", "transition:0.1", "transition:1", "transition:10"],
        trials=50,
        seed=7000,
    )
    rows, summary = run_benchmark(cfg)
    write_outputs(rows, summary, RESULTS / "acceptance_success_rate")
    rates = {label: s["success_rate"] for label, s in summary["samplers"].items()}
    relevant_full = rates["relevant"] == 1.0
    transition_lower = min(
        rates["transition:0.1"], rates["transition:1"], rates["transition:10"]
    ) < rates["relevant"]
    _report(
        "success-rate-terrain",
        relevant_full and transition_lower,
        ", ".join(f"{k}={v:.2f}" for k, v in rates.items()),
    )


def test_bench_determinism_byte_identical(tmp_path):
    """Identical configs produce byte-identical CSVs (iteration budget)."""
    cfg = RunConfig(
        environment={"world": "potential_2d"},
        planner={"iterations": 400},
        samplers=["relevant", "informed"],
        trials=2,
        seed=31,
    )
    outputs = []
    for tag in ("a", "b"):
        rows, summary = run_benchmark(cfg)
        paths = write_outputs(rows, summary, tmp_path / tag)
        outputs.append(paths["csv"].read_bytes())
    _report(
        "bench-determinism",
        outputs[0] == outputs[1] and len(outputs[0]) > 100,
        f"csv bytes={len(outputs[0])}",
    )
