"""Obstacles, validity checks, goal region, and the registered benchmark worlds."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .core import Bounds, StateVec, as_state, l2_heuristic
from .costmap import (
    CostMap,
    Grid2D,
    PotentialCostMap,
    TerrainCostMap,
    UniformCostMap,
    read_pgm,
)


class ConfigError(ValueError):
    """Malformed or unknown environment/run configuration."""


@dataclass(frozen=True)
class BoxObstacle:
    """Axis-aligned box; only its open interior blocks states."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", as_state(self.lower))
        object.__setattr__(self, "upper", as_state(self.upper))
        if self.lower.shape != self.upper.shape:
            raise ValueError("obstacle lower/upper dimension mismatch")
        if not np.all(self.lower <= self.upper):
            raise ValueError("obstacle requires lower[i] <= upper[i]")


@dataclass
class Environment:
    bounds: Bounds
    obstacles: list
    costmap: CostMap
    x_s: np.ndarray
    x_g: np.ndarray
    r_goal: float
    eta: float
    name: str = "custom"
    # stacked obstacle faces for vectorized interior tests
    _obs_lo: np.ndarray = field(init=False, repr=False)
    _obs_hi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.x_s = as_state(self.x_s)
        self.x_g = as_state(self.x_g)
        d = self.bounds.d
        if self.x_s.shape[0] != d or self.x_g.shape[0] != d:
            raise ConfigError("start/goal dimension does not match bounds")
        if self.r_goal <= 0.0 or self.eta <= 0.0:
            raise ConfigError("r_goal and eta must be positive")
        if self.obstacles:
            self._obs_lo = np.stack([o.lower for o in self.obstacles])
            self._obs_hi = np.stack([o.upper for o in self.obstacles])
        else:
            self._obs_lo = np.empty((0, d))
            self._obs_hi = np.empty((0, d))
        if not is_state_valid(self, self.x_s):
            raise ConfigError("start state is not valid")
        if not is_state_valid(self, self.x_g):
            raise ConfigError("goal state is not valid")
        if l2_heuristic(self.x_s, self.x_g) <= self.r_goal:
            raise ConfigError("start state lies inside the goal ball")

    @property
    def d(self) -> int:
        return self.bounds.d

    def states_valid(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized validity of a (k, d) batch of states."""
        ok = np.all(pts >= self.bounds.lower, axis=1) & np.all(pts <= self.bounds.upper, axis=1)
        if len(self.obstacles):
            inside = (pts[:, None, :] > self._obs_lo) & (pts[:, None, :] < self._obs_hi)
            ok &= ~inside.all(axis=2).any(axis=1)
        return ok


def is_state_valid(env: Environment, x: StateVec) -> bool:
    """True iff x is within bounds and outside every obstacle's open interior."""
    return bool(env.states_valid(np.asarray(x, dtype=float)[None, :])[0])


def is_motion_valid(env: Environment, x1: StateVec, x2: StateVec) -> bool:
    """Discrete segment check at spacing <= eta/20, endpoints included."""
    dist = l2_heuristic(x1, x2)
    n = max(1, math.ceil(dist / (env.eta / 20.0)))
    t = np.linspace(0.0, 1.0, n + 1)
    pts = x1[None, :] + t[:, None] * (x2 - x1)[None, :]
    return bool(env.states_valid(pts).all())


def in_goal(env: Environment, x: StateVec) -> bool:
    """Closed goal ball around x_g."""
    return l2_heuristic(x, env.x_g) <= env.r_goal


# ---------------------------------------------------------------------------
# Registered worlds

WORLD_NAMES = (
    "multi_obstacle_2d",
    "multi_obstacle_4d",
    "multi_obstacle_6d",
    "terrain_2d",
    "potential_2d",
    "potential_4d",
    "potential_6d",
    "box7d",
)

# step-size defaults per world; 2D values are declared (only 4D/6D published)
_ETA = {
    "multi_obstacle_2d": 0.6,
    "multi_obstacle_4d": 0.6,
    "multi_obstacle_6d": 1.2,
    "terrain_2d": 0.3,
    "potential_2d": 0.6,
    "potential_4d": 0.6,
    "potential_6d": 1.5,
    "box7d": 0.7,
}

TERRAIN_VERSION = "terrain_v1"


def _layout_data() -> dict:
    path = resources.files("relregion.data") / "multi_obstacle_v2.json"
    return json.loads(path.read_text())


def default_terrain_grid(n: int = 160) -> Grid2D:
    """Deterministic terrain raster (terrain_v1).

    Smooth low-cost basins split by a full-height, sharp high-cost ridge near
    the middle, so every start-goal path must climb through expensive terrain
    (a cost-space chasm).
    """
    u = (np.arange(n) + 0.5) / n
    x, y = np.meshgrid(u, u, indexing="xy")
    base = 0.020 + 0.005 * np.sin(2.0 * np.pi * (3.0 * x + 1.7 * y))
    base += 0.005 * np.sin(2.0 * np.pi * (1.3 * x - 2.4 * y) + 0.9)
    ridge_center = 0.72 + 0.03 * np.sin(2.0 * np.pi * 2.0 * y)
    # pixel-sharp plateau: the climb cannot be split into cheap sub-steps
    plateau = np.abs(x - ridge_center) <= 0.075
    top = 0.95 + 0.03 * np.sin(2.0 * np.pi * 5.0 * (x + y))
    v = np.clip(np.where(plateau, top, base), 0.0, 1.0)
    return Grid2D(v[::-1, :])  # row 0 = top of the world


def _extrude(boxes_2d, bounds_1d, d: int, slab_half: float = 1.0):
    """Extend 2D boxes to d dims, 2-unit slabs centered in each extra dim."""
    lo1, hi1 = bounds_1d
    mid = 0.5 * (lo1 + hi1)
    out = []
    for lo, hi in boxes_2d:
        lo_d = list(lo) + [mid - slab_half] * (d - 2)
        hi_d = list(hi) + [mid + slab_half] * (d - 2)
        out.append(BoxObstacle(lo_d, hi_d))
    return out


def _multi_obstacle(d: int) -> Environment:
    data = _layout_data()["multi_obstacle"]
    lo1, hi1 = data["bounds"]
    mid = 0.5 * (lo1 + hi1)
    bounds = Bounds([lo1] * d, [hi1] * d)
    obstacles = _extrude(data["boxes"], (lo1, hi1), d)
    eta = _ETA[f"multi_obstacle_{d}d"]
    x_s = np.array(data["x_s"] + [mid] * (d - 2))
    x_g = np.array(data["x_g"] + [mid] * (d - 2))
    return Environment(
        bounds, obstacles, UniformCostMap(), x_s, x_g,
        r_goal=eta / 2.0, eta=eta, name=f"multi_obstacle_{d}d",
    )


def _potential(d: int) -> Environment:
    bounds = Bounds([0.0] * d, [20.0] * d)
    centers = np.full((2, d), 10.0)
    centers[0, 0] = 7.0
    centers[1, 0] = 13.0
    eta = _ETA[f"potential_{d}d"]
    x_s = np.full(d, 10.0)
    x_s[0] = 2.0
    x_g = np.full(d, 10.0)
    x_g[0] = 18.0
    return Environment(
        bounds, [], PotentialCostMap(centers), x_s, x_g,
        r_goal=eta / 2.0, eta=eta, name=f"potential_{d}d",
    )


def _terrain(raster_path=None) -> Environment:
    bounds = Bounds([0.0, 0.0], [20.0, 20.0])
    grid = read_pgm(raster_path) if raster_path else default_terrain_grid()
    eta = _ETA["terrain_2d"]
    return Environment(
        bounds, [], TerrainCostMap(grid, bounds), np.array([3.0, 10.0]),
        np.array([17.0, 10.0]), r_goal=eta / 2.0, eta=eta, name="terrain_2d",
    )


def _box7d() -> Environment:
    data = _layout_data()["box7d"]
    d = 7
    bounds = Bounds([-math.pi] * d, [math.pi] * d)
    obstacles = [BoxObstacle(lo, hi) for lo, hi in data["boxes"]]
    eta = _ETA["box7d"]
    return Environment(
        bounds, obstacles, UniformCostMap(), np.full(d, data["x_s"]),
        np.full(d, data["x_g"]), r_goal=eta / 2.0, eta=eta, name="box7d",
    )


def _costmap_from_config(spec: dict, bounds: Bounds) -> CostMap:
    variant = spec.get("variant", "uniform")
    if variant == "uniform":
        return UniformCostMap()
    if variant == "potential":
        if "centers" not in spec:
            raise ConfigError("potential costmap needs 'centers'")
        return PotentialCostMap(
            spec["centers"],
            amplitude=float(spec.get("amplitude", 9.0)),
            width=float(spec.get("width", 5.0)),
        )
    if variant == "terrain":
        if "raster" not in spec:
            raise ConfigError("terrain costmap needs a 'raster' PGM path")
        return TerrainCostMap(
            read_pgm(spec["raster"]),
            bounds,
            c_min=float(spec.get("c_min", 1.0)),
            c_max=float(spec.get("c_max", 10.0)),
        )
    raise ConfigError(f"unknown costmap variant '{variant}'")


def build_environment(config) -> Environment:
    """Build a registered world or a fully custom one.

    config is either a world name or a mapping with a 'world' key plus
    overrides (eta, r_goal, x_s, x_g, raster), or a full inline description
    (bounds, obstacles, costmap, x_s, x_g, plus optional eta/r_goal).
    """
    if isinstance(config, str):
        config = {"world": config}
    if not isinstance(config, dict):
        raise ConfigError("environment config must be a world name or a mapping")
    config = dict(config)
    name = config.pop("world", None)
    if name is not None:
        if name.startswith("multi_obstacle_"):
            try:
                env = _multi_obstacle({"2d": 2, "4d": 4, "6d": 6}[name[-2:]])
            except KeyError:
                raise ConfigError(f"unknown world '{name}'") from None
        elif name.startswith("potential_"):
            try:
                env = _potential({"2d": 2, "4d": 4, "6d": 6}[name[-2:]])
            except KeyError:
                raise ConfigError(f"unknown world '{name}'") from None
        elif name == "terrain_2d":
            env = _terrain(config.pop("raster", None))
        elif name == "box7d":
            env = _box7d()
        else:
            raise ConfigError(f"unknown world '{name}'")
        allowed = {"eta", "r_goal", "x_s", "x_g"}
        unknown = set(config) - allowed
        if unknown:
            raise ConfigError(f"unknown environment override(s): {sorted(unknown)}")
        if not config:
            return env
        return Environment(
            env.bounds,
            env.obstacles,
            env.costmap,
            as_state(config.get("x_s", env.x_s)),
            as_state(config.get("x_g", env.x_g)),
            float(config.get("r_goal", env.r_goal)),
            float(config.get("eta", env.eta)),
            name=env.name,
        )

    try:
        bounds = Bounds(config["bounds"]["lower"], config["bounds"]["upper"])
        obstacles = [BoxObstacle(o["lower"], o["upper"]) for o in config.get("obstacles", [])]
        costmap = _costmap_from_config(config.get("costmap", {}), bounds)
        eta = float(config.get("eta", 0.6))
        return Environment(
            bounds,
            obstacles,
            costmap,
            as_state(config["x_s"]),
            as_state(config["x_g"]),
            float(config.get("r_goal", eta / 2.0)),
            eta,
            name=config.get("name", "custom"),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad environment config: {exc}") from exc
