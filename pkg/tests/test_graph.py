import math

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from relregion.core import l2_heuristic, rng_stream
from relregion.graph import (
    KdTree,
    PlannerGraph,
    dump_graph,
    rebuild_relevant_queue,
    update_relevant_queue,
)

X_G = np.array([10.0, 10.0])


def new_graph(root=(0.0, 0.0), lambdas=(10.0, 5.0, 100.0)):
    return PlannerGraph(np.array(root, dtype=float), X_G, lambdas)


def sssp_oracle(graph):
    """Independent single-source shortest paths on the cached edge set."""
    n = len(graph)
    rows, cols, vals = [], [], []
    for u in range(n):
        for v, w in graph.adj[u].items():
            rows.append(u)
            cols.append(v)
            vals.append(w)
    mat = csr_matrix((vals, (rows, cols)), shape=(n, n))
    return dijkstra(mat, directed=False, indices=0)


def random_graph(rng, n_vertices, connect_radius=3.0):
    g = new_graph()
    while len(g) < n_vertices:
        x = rng.random(2) * 12.0
        nearest = g.nearest(x)
        w = l2_heuristic(g.state(nearest), x)
        if w <= 1e-12:
            continue
        v = g.insert_vertex(x, nearest, w)
        if v is None:
            continue
        for u in g.near(x, connect_radius):
            if u != nearest and u != v:
                g.add_edge(v, u, l2_heuristic(g.state(u), x))
        g.rewire_global([v])
    return g


# -- kd-tree ------------------------------------------------------------------

def test_kdtree_matches_linear_scan():
    rng = rng_stream(2)
    pts = rng.random((1000, 3)) * 10.0
    tree = KdTree(3)
    for p in pts:
        tree.insert(p)
    for _ in range(300):
        q = rng.random(3) * 10.0
        d2 = np.sum((pts - q) ** 2, axis=1)
        assert tree.nearest(q)[0] == int(np.argmin(d2))


def test_kdtree_radius_matches_linear_scan():
    rng = rng_stream(3)
    pts = rng.random((500, 2)) * 4.0
    tree = KdTree(2)
    for p in pts:
        tree.insert(p)
    for _ in range(200):
        q = rng.random(2) * 4.0
        r = 0.2 + rng.random()
        expect = sorted(int(i) for i in np.flatnonzero(np.sum((pts - q) ** 2, axis=1) <= r * r))
        assert tree.in_radius(q, r) == expect


def test_kdtree_survives_sorted_inserts():
    tree = KdTree(2)
    for i in range(2000):  # degenerate insertion order must not blow the stack
        tree.insert(np.array([float(i), 0.0]))
    assert tree.nearest(np.array([1500.2, 0.0]))[0] == 1500


# -- vertex store -------------------------------------------------------------

def test_insert_first_child_cost():
    g = new_graph()
    v = g.insert_vertex(np.array([2.0, 0.0]), 0, 2.0)
    assert g.g[v] == 2.0
    assert g.parent[v] == 0
    assert g.d_v[0] == 1 and g.d_v[v] == 1


def test_insert_chain_accumulates():
    g = new_graph()
    a = g.insert_vertex(np.array([1.0, 0.0]), 0, 1.0)
    b = g.insert_vertex(np.array([2.0, 0.0]), a, 1.0)
    c = g.insert_vertex(np.array([3.0, 0.0]), b, 1.0)
    assert g.g[c] == 3.0
    assert g.path_to_root(c) == [0, a, b, c]


def test_insert_duplicate_rejected():
    g = new_graph()
    x = np.array([1.0, 1.0])
    assert g.insert_vertex(x, 0, math.sqrt(2.0)) is not None
    assert g.insert_vertex(x + 5e-13, 0, math.sqrt(2.0)) is None


def test_insert_bad_parent():
    g = new_graph()
    with pytest.raises(ValueError):
        g.insert_vertex(np.array([1.0, 1.0]), 7, 1.0)


def test_nearest_and_near_match_oracle():
    rng = rng_stream(5)
    g = new_graph()
    pts = [np.zeros(2)]
    for _ in range(1000):
        x = rng.random(2) * 12.0
        v = g.insert_vertex(x, g.nearest(x), 1.0)
        if v is not None:
            pts.append(x)
    arr = np.array(pts)
    for _ in range(300):
        q = rng.random(2) * 12.0
        d2 = np.sum((arr - q) ** 2, axis=1)
        assert g.nearest(q) == int(np.argmin(d2))
        r = 0.3 + rng.random() * 2.0
        assert g.near(q, r) == sorted(int(i) for i in np.flatnonzero(d2 <= r * r))


def test_nearest_single_vertex_and_exact_hit():
    g = new_graph()
    assert g.nearest(np.array([5.0, -3.0])) == 0
    v = g.insert_vertex(np.array([1.0, 2.0]), 0, 1.0)
    assert g.nearest(np.array([1.0, 2.0])) == v


def test_near_empty_and_full():
    g = new_graph()
    a = g.insert_vertex(np.array([1.0, 0.0]), 0, 1.0)
    assert g.near(np.array([50.0, 50.0]), 0.5) == []
    assert g.near(np.array([0.5, 0.0]), 100.0) == [0, a]
    with pytest.raises(ValueError):
        g.near(np.array([0.0, 0.0]), 0.0)


# -- relevance ---------------------------------------------------------------

def test_is_relevant_infinite_incumbent():
    rng = rng_stream(6)
    g = random_graph(rng, 50)
    assert all(g.is_relevant(v, math.inf) for v in range(len(g)))


def test_is_relevant_strict_boundary():
    g = new_graph()
    v = g.insert_vertex(np.array([5.0, 10.0]), 0, 5.0)
    c_i = g.g[v] + g.h_goal[v]
    assert not g.is_relevant(v, c_i)  # strict inequality
    assert g.is_relevant(v, c_i + 1e-9)


def test_is_relevant_matches_formula_on_random_graph():
    rng = rng_stream(7)
    g = random_graph(rng, 120)
    c_i = 18.0
    for v in range(len(g)):
        expect = g.g[v] + l2_heuristic(g.state(v), X_G) < c_i
        assert g.is_relevant(v, c_i) == expect


def test_q_weight_formula():
    g = new_graph()
    v = g.insert_vertex(np.array([0.0, 5.0]), 0, 5.0)  # g=5, h=sqrt(125)
    g.p_v[v] = 0
    # d_v == 1 from the tree edge; (g+h)/c_i = 0.5 when c_i = 2*(g+h)
    c_i = 2.0 * (g.g[v] + g.h_goal[v])
    assert g.q_weight(v, c_i) == pytest.approx(10.0 * 0 + 5.0 * 1 + 100.0 * 0.5)
    g.p_v[v] += 1
    assert g.q_weight(v, c_i) == pytest.approx(10.0 * 1 + 5.0 * 1 + 100.0 * 0.5)


# -- rewiring ----------------------------------------------------------------

def test_rewire_shortcut_chain():
    # root -> a -> b -> c chain, then a direct root->c shortcut
    g = new_graph()
    a = g.insert_vertex(np.array([1.0, 0.0]), 0, 1.0)
    b = g.insert_vertex(np.array([2.0, 0.0]), a, 1.0)
    c = g.insert_vertex(np.array([3.0, 0.0]), b, 1.0)
    d = g.insert_vertex(np.array([4.0, 0.0]), c, 1.0)
    assert g.g[d] == 4.0
    g.add_edge(0, c, 1.5)  # shortcut: root to c directly
    g.rewire_global([0, c])
    assert g.g[c] == 1.5
    assert g.parent[c] == 0
    assert g.g[d] == 2.5


def test_rewire_matches_sssp_oracle_on_random_graph():
    rng = rng_stream(8)
    g = random_graph(rng, 200)
    oracle = sssp_oracle(g)
    assert np.max(np.abs(np.array(g.g) - oracle)) < 1e-9


def test_rewire_idempotent():
    rng = rng_stream(9)
    g = random_graph(rng, 100)
    before = list(g.g)
    g.rewire_global(range(len(g)))
    assert g.g == before


def test_rewire_bellman_condition():
    rng = rng_stream(10)
    g = random_graph(rng, 150)
    for u in range(len(g)):
        for v, w in g.adj[u].items():
            assert g.g[v] <= g.g[u] + w + 1e-12


def test_tree_has_no_cycles():
    rng = rng_stream(11)
    g = random_graph(rng, 150)
    for v in range(len(g)):
        path = g.path_to_root(v)
        assert path[0] == 0
        assert len(path) <= len(g)


# -- relevant queue ------------------------------------------------------------

def test_queue_pops_are_sorted_between_rebuilds():
    rng = rng_stream(12)
    g = random_graph(rng, 120)
    c_i = 25.0
    rebuild_relevant_queue(g, c_i)
    popped = []
    while True:
        e = g.queue.pop_valid(g, c_i)
        if e is None:
            break
        popped.append(e[0])
    assert popped == sorted(popped)
    assert len(popped) == sum(g.is_relevant(v, c_i) for v in range(len(g)))


def test_queue_lazy_revalidation_after_ci_shrinks():
    rng = rng_stream(13)
    g = random_graph(rng, 80)
    rebuild_relevant_queue(g, 40.0)
    tight = 14.0
    while True:
        e = g.queue.pop_valid(g, tight)
        if e is None:
            break
        assert g.is_relevant(e[2], tight)


def test_queue_stale_entries_dropped_after_update():
    g = new_graph()
    v = g.insert_vertex(np.array([1.0, 1.0]), 0, 2.0)
    c_i = 30.0
    rebuild_relevant_queue(g, c_i)
    g.p_v[v] += 5
    g.touched.add(v)
    update_relevant_queue(g, c_i)
    seen = {}
    while True:
        e = g.queue.pop_valid(g, c_i)
        if e is None:
            break
        assert e[2] not in seen  # one live entry per vertex
        seen[e[2]] = e[0]
    assert seen[v] == pytest.approx(g.q_weight(v, c_i))


def test_dump_graph_format():
    g = new_graph()
    a = g.insert_vertex(np.array([1.0, 0.5]), 0, 1.25)
    text = dump_graph(g)
    lines = text.strip().split("\n")
    assert len(lines) == 2
    head = lines[1].split()
    assert int(head[0]) == a and int(head[1]) == 0
    assert float(head[2]) == 1.25
    assert [float(head[3]), float(head[4])] == [1.0, 0.5]
