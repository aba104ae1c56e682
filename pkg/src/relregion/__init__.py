"""Relevant-region sampling for asymptotically optimal planning on cost-maps.

Modules: core (vector/rng primitives), costmap (state cost and edge metric),
environment (worlds and validity), graph (tree, kd-index, rewiring), sampling
(exploration strategies), planner (main loop), bench (study runner and CLI).
"""

__version__ = "0.1.0"

from .core import Bounds, l2_heuristic, radial_offset, rng_stream, sample_unit_direction
from .costmap import (
    Grid2D,
    OutOfDomainError,
    PotentialCostMap,
    TerrainCostMap,
    UniformCostMap,
    edge_cost,
    eval_cost,
    read_pgm,
    write_pgm,
)
from .environment import (
    BoxObstacle,
    ConfigError,
    Environment,
    WORLD_NAMES,
    build_environment,
    in_goal,
    is_motion_valid,
    is_state_valid,
)
from .graph import PlannerGraph, RelevantQueue, dump_graph
from .planner import BenchRecord, PlanResult, Planner, PlannerConfig, plan
from .sampling import (
    DegenerateInformedSetError,
    StepLimitInputs,
    TransitionState,
    choose_vertex,
    informed_sample,
    relevant_region_sample,
    step_limit_general,
    step_limit_uniform,
    transition_test,
    uniform_goal_biased,
)

__all__ = [
    "BenchRecord",
    "Bounds",
    "BoxObstacle",
    "ConfigError",
    "DegenerateInformedSetError",
    "Environment",
    "Grid2D",
    "OutOfDomainError",
    "PlanResult",
    "Planner",
    "PlannerConfig",
    "PlannerGraph",
    "PotentialCostMap",
    "RelevantQueue",
    "StepLimitInputs",
    "TerrainCostMap",
    "TransitionState",
    "UniformCostMap",
    "WORLD_NAMES",
    "build_environment",
    "choose_vertex",
    "dump_graph",
    "edge_cost",
    "eval_cost",
    "in_goal",
    "informed_sample",
    "is_motion_valid",
    "is_state_valid",
    "l2_heuristic",
    "plan",
    "radial_offset",
    "read_pgm",
    "relevant_region_sample",
    "rng_stream",
    "sample_unit_direction",
    "step_limit_general",
    "step_limit_uniform",
    "transition_test",
    "uniform_goal_biased",
    "write_pgm",
]
