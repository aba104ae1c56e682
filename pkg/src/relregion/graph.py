"""Planner graph: vertex store, spanning tree, kd-tree index, relevant-vertex heap.

The spanning tree is kept shortest-path optimal on the current graph by a
label-correcting relaxation pass after every change (RRT#-style exploitation).
"""
from __future__ import annotations

import heapq
import math

import numpy as np

from .core import StateVec, l2_heuristic

_BRUTE_FORCE_LIMIT = 64  # below this many points a vectorized scan answers queries


class KdTree:
    """Incremental kd-tree; splitting axis cycles with depth, no rebalancing."""

    def __init__(self, d: int):
        self.d = d
        self._pts: list[np.ndarray] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._root = -1

    def __len__(self) -> int:
        return len(self._pts)

    def insert(self, point: np.ndarray) -> int:
        idx = len(self._pts)
        self._pts.append(np.array(point, dtype=float))
        self._left.append(-1)
        self._right.append(-1)
        if self._root < 0:
            self._root = idx
            return idx
        node, depth = self._root, 0
        while True:
            axis = depth % self.d
            if point[axis] < self._pts[node][axis]:
                if self._left[node] < 0:
                    self._left[node] = idx
                    return idx
                node = self._left[node]
            else:
                if self._right[node] < 0:
                    self._right[node] = idx
                    return idx
                node = self._right[node]
            depth += 1

    def nearest(self, x: np.ndarray) -> tuple[int, float]:
        """(index, squared distance) of the closest point; ties -> lowest index."""
        if self._root < 0:
            raise ValueError("nearest query on an empty index")
        best_i, best_d2 = -1, math.inf
        # (node, depth, squared axis gap that must not exceed best_d2)
        stack = [(self._root, 0, 0.0)]
        while stack:
            node, depth, gap2 = stack.pop()
            if node < 0 or gap2 > best_d2:
                continue
            p = self._pts[node]
            diff = x - p
            d2 = float(diff @ diff)
            if d2 < best_d2 or (d2 == best_d2 and node < best_i):
                best_i, best_d2 = node, d2
            axis = depth % self.d
            gap = float(x[axis] - p[axis])
            near, far = (self._left[node], self._right[node])
            if gap >= 0.0:
                near, far = far, near
            stack.append((far, depth + 1, gap * gap))
            stack.append((near, depth + 1, 0.0))
        return best_i, best_d2

    def in_radius(self, x: np.ndarray, r: float) -> list[int]:
        """Indices of all points with distance <= r, ascending."""
        if self._root < 0 or r < 0.0:
            return []
        r2 = r * r
        out = []
        stack = [(self._root, 0)]
        while stack:
            node, depth = stack.pop()
            if node < 0:
                continue
            p = self._pts[node]
            diff = x - p
            if float(diff @ diff) <= r2:
                out.append(node)
            axis = depth % self.d
            gap = float(x[axis] - p[axis])
            if gap <= r:
                stack.append((self._left[node], depth + 1))
            if gap >= -r:
                stack.append((self._right[node], depth + 1))
        out.sort()
        return out


class RelevantQueue:
    """Binary min-heap over relevant vertices keyed by the selection weight q_v.

    Lazy deletion: each push stamps the vertex; entries whose stamp is stale,
    or whose vertex no longer satisfies the relevance inequality at pop time,
    are dropped.
    """

    def __init__(self):
        self._heap: list[tuple[float, int, int]] = []
        self._stamp: dict[int, int] = {}
        self._next_stamp = 0

    def __len__(self) -> int:
        return len(self._heap)

    def clear(self) -> None:
        self._heap.clear()
        self._stamp.clear()

    def push(self, v: int, q: float) -> None:
        self._next_stamp += 1
        self._stamp[v] = self._next_stamp
        heapq.heappush(self._heap, (q, self._next_stamp, v))

    def invalidate(self, v: int) -> None:
        self._stamp.pop(v, None)

    def reinsert(self, entry: tuple[float, int, int]) -> None:
        """Put back an entry obtained from pop_valid, stamp intact."""
        heapq.heappush(self._heap, entry)

    def pop_valid(self, graph: "PlannerGraph", c_i: float):
        """Next fresh entry whose vertex is still relevant, or None."""
        while self._heap:
            q, stamp, v = heapq.heappop(self._heap)
            if self._stamp.get(v) != stamp:
                continue
            if not graph.is_relevant(v, c_i):
                self._stamp.pop(v, None)
                continue
            return (q, stamp, v)
        return None


class PlannerGraph:
    """Graph G=(V,E) with embedded spanning tree and cached edge costs."""

    def __init__(self, root_state: StateVec, x_g: StateVec, lambdas=(10.0, 5.0, 100.0)):
        root_state = np.asarray(root_state, dtype=float)
        self.d = root_state.shape[0]
        self.x_g = np.asarray(x_g, dtype=float)
        self.lambdas = tuple(float(l) for l in lambdas)
        self._states = np.empty((256, self.d))
        self.n = 0
        self.parent: list[int] = []
        self.g: list[float] = []
        self.p_v: list[int] = []
        self.d_v: list[int] = []
        self.adj: list[dict[int, float]] = []
        self.h_goal: list[float] = []
        self.touched: set[int] = set()
        self.queue = RelevantQueue()
        self._kd = KdTree(self.d)
        self._append(root_state, parent=0, g=0.0)

    def _append(self, state: np.ndarray, parent: int, g: float) -> int:
        if self.n == self._states.shape[0]:
            grown = np.empty((2 * self.n, self.d))
            grown[: self.n] = self._states
            self._states = grown
        idx = self.n
        self._states[idx] = state
        self.n += 1
        self.parent.append(parent)
        self.g.append(g)
        self.p_v.append(0)
        self.d_v.append(0)
        self.adj.append({})
        self.h_goal.append(l2_heuristic(state, self.x_g))
        self._kd.insert(state)
        self.touched.add(idx)
        return idx

    def __len__(self) -> int:
        return self.n

    def state(self, v: int) -> np.ndarray:
        return self._states[v]

    @property
    def states(self) -> np.ndarray:
        return self._states[: self.n]

    def insert_vertex(self, x: StateVec, parent: int, edge_cost: float):
        """Add a vertex connected to parent; None if a duplicate state exists."""
        if parent < 0 or parent >= self.n:
            raise ValueError(f"parent {parent} does not exist")
        x = np.asarray(x, dtype=float)
        _, d2 = self._kd.nearest(x)
        if d2 <= 1e-24:  # duplicate within 1e-12
            return None
        idx = self._append(x, parent, self.g[parent] + edge_cost)
        self.adj[idx][parent] = edge_cost
        self.adj[parent][idx] = edge_cost
        self.d_v[idx] += 1
        self.d_v[parent] += 1
        self.touched.add(parent)
        return idx

    def add_edge(self, u: int, v: int, cost: float) -> None:
        """Cache an undirected edge; does not touch g (rewiring does)."""
        if v in self.adj[u]:
            return
        self.adj[u][v] = cost
        self.adj[v][u] = cost
        self.d_v[u] += 1
        self.d_v[v] += 1
        self.touched.add(u)
        self.touched.add(v)

    def nearest(self, x: StateVec) -> int:
        """Closest vertex by Euclidean distance, ties to the lowest id."""
        if self.n == 0:
            raise ValueError("nearest query on an empty graph")
        x = np.asarray(x, dtype=float)
        if self.n < _BRUTE_FORCE_LIMIT:
            diff = self.states - x
            d2 = np.einsum("nd,nd->n", diff, diff)
            return int(np.argmin(d2))  # argmin returns the first (lowest id) tie
        idx, _ = self._kd.nearest(x)
        return idx

    def near(self, x: StateVec, r: float) -> list[int]:
        """All vertices within distance r, sorted by id."""
        if r <= 0.0:
            raise ValueError("near radius must be positive")
        x = np.asarray(x, dtype=float)
        if self.n < _BRUTE_FORCE_LIMIT:
            diff = self.states - x
            d2 = np.einsum("nd,nd->n", diff, diff)
            return [int(i) for i in np.flatnonzero(d2 <= r * r)]
        return self._kd.in_radius(x, r)

    def is_relevant(self, v: int, c_i: float) -> bool:
        """Eq. (5): strict g(v) + h(v, x_g) < c_i."""
        return self.g[v] + self.h_goal[v] < c_i

    def q_weight(self, v: int, c_i: float) -> float:
        """Selection weight q_v = l1*p_v + l2*d_v + l3*(g+h)/c_i."""
        l1, l2, l3 = self.lambdas
        return l1 * self.p_v[v] + l2 * self.d_v[v] + l3 * (self.g[v] + self.h_goal[v]) / c_i

    def rewire_global(self, seeds) -> None:
        """Propagate cost-to-come improvements until the tree is shortest-path
        optimal on the current graph (Bellman condition holds everywhere).

        seeds are the potentially inconsistent vertices, i.e. those whose
        incident edge set or cost changed; each is first re-anchored to its
        best current neighbor, then improvements cascade.
        """
        heap = []
        for s in set(seeds):
            for u, w in self.adj[s].items():
                cand = self.g[u] + w
                if cand < self.g[s]:
                    self.g[s] = cand
                    self.parent[s] = u
                    self.touched.add(s)
            if math.isfinite(self.g[s]):
                heap.append((self.g[s], s))
        heapq.heapify(heap)
        while heap:
            gv, v = heapq.heappop(heap)
            if gv > self.g[v]:
                continue
            for u, w in self.adj[v].items():
                cand = gv + w
                if cand < self.g[u]:
                    self.g[u] = cand
                    self.parent[u] = v
                    self.touched.add(u)
                    heapq.heappush(heap, (cand, u))

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while self.parent[v] != v:
            v = self.parent[v]
            path.append(v)
            if len(path) > self.n:
                raise RuntimeError("parent pointers contain a cycle")
        path.reverse()
        return path


def update_relevant_queue(graph: PlannerGraph, c_i: float) -> None:
    """Refresh heap keys for vertices whose g/p_v/d_v changed since last sync."""
    if not math.isfinite(c_i):
        raise ValueError("relevant queue requires a finite incumbent cost")
    for v in graph.touched:
        if graph.is_relevant(v, c_i):
            graph.queue.push(v, graph.q_weight(v, c_i))
        else:
            graph.queue.invalidate(v)
    graph.touched.clear()


def rebuild_relevant_queue(graph: PlannerGraph, c_i: float) -> None:
    """Full rebuild; required whenever c_i changes since every key scales with it."""
    graph.queue.clear()
    for v in range(len(graph)):
        if graph.is_relevant(v, c_i):
            graph.queue.push(v, graph.q_weight(v, c_i))
    graph.touched.clear()


def dump_graph(graph: PlannerGraph) -> str:
    """Debug dump, one vertex per line: id parent g x[0..d)."""
    lines = []
    for v in range(len(graph)):
        coords = " ".join(repr(float(c)) for c in graph.state(v))
        lines.append(f"{v} {graph.parent[v]} {graph.g[v]!r} {coords}")
    return "\n".join(lines) + "\n"
