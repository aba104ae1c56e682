"""Exploration strategies: goal-biased uniform, informed ellipsoid, relevant
region (vertex choice plus step limits), and the Metropolis transition test."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Bounds, StateVec, l2_heuristic, radial_offset, sample_unit_direction
from .environment import Environment
from .graph import PlannerGraph


class DegenerateInformedSetError(ValueError):
    """Informed set has empty interior: c_i does not exceed the direct heuristic."""


def uniform_goal_biased(rng: np.random.Generator, env: Environment, p_goal: float) -> StateVec:
    """Uniform draw over the bounds, returning the goal with probability p_goal."""
    if not 0.0 <= p_goal < 1.0:
        raise ValueError("p_goal must be in [0, 1)")
    if rng.random() < p_goal:
        return env.x_g.copy()
    return env.bounds.sample(rng)


def _householder_to_e1(a1: np.ndarray) -> np.ndarray:
    """Orthogonal map sending the first basis vector onto the unit vector a1."""
    d = a1.shape[0]
    w = -a1.copy()
    w[0] += 1.0
    ww = float(w @ w)
    if ww < 1e-24:
        return np.eye(d)
    return np.eye(d) - 2.0 * np.outer(w, w) / ww


def informed_sample(
    rng: np.random.Generator,
    x_s: StateVec,
    x_g: StateVec,
    c_i: float,
    bounds: Bounds,
    p_goal: float = 0.0,
    max_tries: int = 10000,
) -> StateVec:
    """Uniform sample from the L2 informed set intersected with the bounds.

    Direct generation: a uniform unit-ball draw is stretched onto the prolate
    hyperspheroid with foci x_s, x_g and transverse diameter c_i, then rotated
    so the long axis lines up with x_g - x_s. Draws outside the bounds are
    rejected. An infinite c_i degenerates to the goal-biased uniform draw.
    """
    if p_goal > 0.0 and rng.random() < p_goal:
        return x_g.copy()
    if math.isinf(c_i):
        return bounds.sample(rng)
    c_min = l2_heuristic(x_s, x_g)
    if c_i <= c_min:
        raise DegenerateInformedSetError(f"c_i={c_i} <= heuristic minimum {c_min}")
    d = x_s.shape[0]
    center = 0.5 * (x_s + x_g)
    rot = _householder_to_e1((x_g - x_s) / c_min)
    radii = np.full(d, 0.5 * math.sqrt(c_i * c_i - c_min * c_min))
    radii[0] = 0.5 * c_i
    for _ in range(max_tries):
        ball = sample_unit_direction(rng, d) * radial_offset(rng, 1.0, d)
        x = center + rot @ (radii * ball)
        if bounds.contains(x) and l2_heuristic(x, x_s) + l2_heuristic(x, x_g) < c_i:
            return x
    # ellipsoid much larger than the bounds: rejection from the box instead
    while True:
        x = bounds.sample(rng)
        if l2_heuristic(x, x_s) + l2_heuristic(x, x_g) < c_i:
            return x


def choose_vertex(graph: PlannerGraph, c_i: float, n_q: int, rng: np.random.Generator):
    """Uniform pick among the n_q lowest-weight relevant vertices; None if V_rel
    is empty. The chosen vertex's selection count p_v is incremented."""
    if n_q < 1:
        raise ValueError("n_q must be >= 1")
    top = []
    while len(top) < n_q:
        entry = graph.queue.pop_valid(graph, c_i)
        if entry is None:
            break
        top.append(entry)
    if not top:
        return None
    k = int(rng.integers(len(top)))
    for i, entry in enumerate(top):
        if i != k:
            graph.queue.reinsert(entry)
    v = top[k][2]
    graph.p_v[v] += 1
    graph.queue.push(v, graph.q_weight(v, c_i))
    return v


@dataclass(frozen=True)
class StepLimitInputs:
    """Scalars feeding the step-limit solve for one (vertex, direction) pair.

    g_gp = c_i - g_T(v_p) (cost budget left at the vertex), h_vg = h(v_p, x_g),
    cos_theta = angle between v_p - x_g and the sampled direction, c_vp =
    C(v_p), eps = relevant-ball radius.
    """

    g_gp: float
    h_vg: float
    cos_theta: float
    c_vp: float = 1.0
    eps: float = 1.0

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        if not -1.0 <= self.cos_theta <= 1.0:
            raise ValueError("cos_theta must lie in [-1, 1]")
        if self.h_vg < 0.0:
            raise ValueError("h_vg must be non-negative")
        if self.c_vp < 1.0:
            raise ValueError("state cost must be >= 1")
        if self.g_gp <= 0.0 or self.g_gp <= self.h_vg:
            raise ValueError("vertex is not relevant: requires g_gp > h_vg >= 0")


def step_limit_uniform(inp: StepLimitInputs) -> float:
    """Largest feasible travel magnitude on a unit cost-map.

    Solves gamma + g_T + |v_p + gamma*e - x_g| < c_i in closed form:
    gamma_uni = (g_gp^2 - h^2) / (2 (h cos(theta) + g_gp)), clamped by eps.
    """
    gamma_uni = (inp.g_gp * inp.g_gp - inp.h_vg * inp.h_vg) / (
        2.0 * (inp.h_vg * inp.cos_theta + inp.g_gp)
    )
    return min(gamma_uni, inp.eps)


def step_limit_general(inp: StepLimitInputs) -> float:
    """Largest feasible travel magnitude under the zeroth-order cost freeze.

    The edge cost over the step is approximated by gamma * C(v_p), giving a
    quadratic in gamma with b = g_gp C + h cos(theta) and radicand
    Delta = b^2 - (C^2-1)(g_gp^2 - h^2). The smaller root is returned in the
    cancellation-free form (g_gp^2 - h^2) / (b + sqrt(Delta)), with Delta
    computed through the equivalent sum of non-negative terms
    (g_gp + C h cos)^2 + (C^2-1)(1-cos^2) h^2 so the repeated-root case
    (Delta = 0, value g_gp / C) stays fully accurate. Reduces to the uniform
    formula at C = 1.
    """
    if inp.c_vp == 1.0:
        return step_limit_uniform(inp)
    g, h, ct, c = inp.g_gp, inp.h_vg, inp.cos_theta, inp.c_vp
    b = g * c + h * ct
    num = g * g - h * h
    delta = (g + c * h * ct) ** 2 + (c * c - 1.0) * (1.0 - ct) * (1.0 + ct) * h * h
    gamma_1 = num / (b + math.sqrt(delta))
    return min(gamma_1, inp.eps)


def relevant_region_sample(
    graph: PlannerGraph,
    env: Environment,
    c_i: float,
    rng: np.random.Generator,
    eps: float,
    n_q: int = 10,
):
    """One sample in the relevant region: pick a vertex, a direction, the step
    limit for the world's cost-map, then a 1/d-biased radial offset.

    Returns None when no relevant vertex exists (caller falls back to informed
    sampling). Every returned sample satisfies the relevant-set inequality
    strictly, hence lies inside the informed set.
    """
    if not math.isfinite(c_i):
        raise ValueError("relevant sampling requires a finite incumbent cost")
    v_p = choose_vertex(graph, c_i, n_q, rng)
    if v_p is None:
        return None
    v_state = graph.state(v_p)
    e_hat = sample_unit_direction(rng, env.d)
    g_gp = c_i - graph.g[v_p]
    h_vg = graph.h_goal[v_p]
    if h_vg > 0.0:
        cos_theta = float((v_state - env.x_g) @ e_hat) / h_vg
        cos_theta = min(1.0, max(-1.0, cos_theta))
    else:
        cos_theta = 0.0
    c_vp = env.costmap(v_state)
    inp = StepLimitInputs(g_gp, h_vg, cos_theta, c_vp=c_vp, eps=eps)
    if c_vp == 1.0:
        gamma_rel = step_limit_uniform(inp)
    else:
        gamma_rel = step_limit_general(inp)
    gamma = radial_offset(rng, gamma_rel, env.d)
    g_t = c_i - g_gp
    slack = 1e-12 * c_i
    for _ in range(16):
        x = v_state + gamma * e_hat
        f_hat = gamma * c_vp + g_t + l2_heuristic(x, env.x_g)
        if f_hat < c_i - slack:  # strict under rounding at the boundary
            return x
        gamma *= 0.5
    return v_state + gamma * e_hat


@dataclass
class TransitionState:
    """Adaptive Metropolis filter state for cost-increasing extensions.

    Uphill moves are accepted with probability exp(-dc / (K * temperature)).
    Accepted uphill moves cool the temperature by 2^(dc / cost_range); any
    accepted move resets the consecutive-failure count. After more than
    n_fail_max consecutive rejections the temperature doubles (n_fail_max = 0
    doubles on every rejection). cost_range is tracked online as the
    max - min state cost seen by the test.
    """

    t_init: float
    k_const: float = 1.0
    n_fail_max: int = 10
    t_cap: float = 1e12
    temperature: float | None = None
    n_fail: int = 0
    _c_lo: float = math.inf
    _c_hi: float = -math.inf

    def __post_init__(self):
        if self.t_init <= 0.0 or self.k_const <= 0.0:
            raise ValueError("t_init and k_const must be positive")
        if self.temperature is None:
            self.temperature = self.t_init

    @property
    def cost_range(self) -> float:
        return max(self._c_hi - self._c_lo, 0.0)


def transition_test(ts: TransitionState, c_from: float, c_to: float, rng: np.random.Generator) -> bool:
    """Metropolis acceptance of a move from state cost c_from to c_to."""
    ts._c_lo = min(ts._c_lo, c_from, c_to)
    ts._c_hi = max(ts._c_hi, c_from, c_to)
    dc = c_to - c_from
    if dc <= 0.0:
        ts.n_fail = 0
        return True
    if rng.random() < math.exp(-dc / (ts.k_const * ts.temperature)):
        # cost_range >= dc here, so the cooling exponent stays in (0, 1]
        ts.temperature = max(ts.temperature / 2.0 ** (dc / ts.cost_range), ts.t_init * 1e-6)
        ts.n_fail = 0
        return True
    ts.n_fail += 1
    if ts.n_fail > ts.n_fail_max:
        ts.temperature = min(ts.temperature * 2.0, ts.t_cap)
        ts.n_fail = 0
    return False
