"""State cost-maps and the integral-of-cost edge metric.

Every map guarantees C(x) >= 1, so any straight-line edge cost dominates the
Euclidean distance between its endpoints and the L2 norm stays an admissible
heuristic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Bounds, StateVec

C_FLOOR = 1.0


class OutOfDomainError(ValueError):
    """Query outside the region a cost-map is defined on."""


class CostMap:
    """Continuous state-cost function C: X -> [1, inf)."""

    variant = "abstract"

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x: StateVec) -> float:
        return float(self.eval_many(np.asarray(x, dtype=float)[None, :])[0])


class UniformCostMap(CostMap):
    """C(x) = 1 everywhere; edge costs reduce to Euclidean lengths."""

    variant = "uniform"

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        return np.ones(pts.shape[0])


class PotentialCostMap(CostMap):
    """Sum-of-Gaussians danger map, C(x) = 1 + a * sum_j exp(-|c_j - x|^2 / w)."""

    variant = "potential"

    def __init__(self, centers, amplitude: float = 9.0, width: float = 5.0):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        if amplitude < 0.0 or width <= 0.0:
            raise ValueError("potential map needs amplitude >= 0 and width > 0")
        self.amplitude = float(amplitude)
        self.width = float(width)

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        # (k, m) squared distances to every center
        diff = pts[:, None, :] - self.centers[None, :, :]
        sq = np.einsum("kmd,kmd->km", diff, diff)
        return 1.0 + self.amplitude * np.exp(-sq / self.width).sum(axis=1)


@dataclass(frozen=True)
class Grid2D:
    """Raster of normalized brightness values in [0, 1], row 0 = top."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("grid must be a non-empty 2D array")
        if not np.all(np.isfinite(v)) or v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("grid values must be finite and within [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


class TerrainCostMap(CostMap):
    """Raster-backed planar cost, bilinear between pixel centers.

    The raster covers the first two coordinates of the (possibly higher
    dimensional) search space; extra coordinates do not affect the cost.
    Queries outside the raster's xy footprint raise OutOfDomainError.
    """

    variant = "terrain"

    def __init__(self, grid: Grid2D, bounds: Bounds, c_min: float = 1.0, c_max: float = 10.0):
        if c_min < C_FLOOR:
            raise ValueError("terrain c_min must be >= 1")
        if c_max < c_min:
            raise ValueError("terrain c_max must be >= c_min")
        self.grid = grid
        self.xlo = float(bounds.lower[0])
        self.xhi = float(bounds.upper[0])
        self.ylo = float(bounds.lower[1])
        self.yhi = float(bounds.upper[1])
        self.c_min = float(c_min)
        self.c_max = float(c_max)

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        x = pts[:, 0]
        y = pts[:, 1]
        bad = (x < self.xlo) | (x > self.xhi) | (y < self.ylo) | (y > self.yhi)
        if bad.any():
            i = int(np.argmax(bad))
            raise OutOfDomainError(f"terrain query outside raster footprint: {pts[i]}")
        g = self.grid.values
        h, w = g.shape
        # pixel-center coordinates; row 0 sits at the top (max y)
        cx = (x - self.xlo) / (self.xhi - self.xlo) * w - 0.5
        cy = (self.yhi - y) / (self.yhi - self.ylo) * h - 0.5
        cx = np.clip(cx, 0.0, w - 1.0)
        cy = np.clip(cy, 0.0, h - 1.0)
        x0 = np.floor(cx).astype(int)
        y0 = np.floor(cy).astype(int)
        x1 = np.minimum(x0 + 1, w - 1)
        y1 = np.minimum(y0 + 1, h - 1)
        fx = cx - x0
        fy = cy - y0
        v = (
            g[y0, x0] * (1.0 - fx) * (1.0 - fy)
            + g[y0, x1] * fx * (1.0 - fy)
            + g[y1, x0] * (1.0 - fx) * fy
            + g[y1, x1] * fx * fy
        )
        return self.c_min + (self.c_max - self.c_min) * v


def eval_cost(cm: CostMap, x: StateVec) -> float:
    """State cost C(x), always >= 1."""
    return cm(x)


def default_segments(dist: float, eta: float) -> int:
    """Integration resolution tied to edge length: one segment per eta/10."""
    if dist <= 0.0:
        return 1
    return max(1, math.ceil(dist / (eta / 10.0)))


def edge_cost(cm: CostMap, x1: StateVec, x2: StateVec, n_seg: int) -> float:
    """Straight-line integral-of-cost metric by the composite midpoint rule.

    Returns |x2 - x1| * (1/n) * sum_i C(midpoint_i). Equals the Euclidean
    distance exactly on uniform maps and dominates it on every map.
    """
    if n_seg < 1:
        raise ValueError("n_seg must be >= 1")
    delta = x2 - x1
    dist = float(np.linalg.norm(delta))
    if dist == 0.0:
        return 0.0
    s = (np.arange(n_seg) + 0.5) / n_seg
    pts = x1[None, :] + s[:, None] * delta[None, :]
    return dist * float(cm.eval_many(pts).mean())


# ---------------------------------------------------------------------------
# Binary PGM (P5) raster I/O. Brightness v in [0, 255] maps to v/255; row 0 of
# the image is the top of the world (maximum y).

def read_pgm(path) -> Grid2D:
    """Load an 8-bit binary PGM file as a normalized grid."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    i = 0
    while len(tokens) < 4:
        if i >= len(data):
            raise ValueError(f"{path}: truncated PGM header")
        c = data[i : i + 1]
        if c == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            tokens.append(data[i:j])
            i = j
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(t) for t in tokens[1:4])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    i += 1  # single whitespace byte separates the header from the raster
    raster = data[i : i + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: truncated PGM raster")
    values = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return Grid2D(values / 255.0)


def write_pgm(grid: Grid2D, path) -> None:
    """Write a normalized grid as an 8-bit binary PGM file."""
    raw = np.clip(np.rint(grid.values * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (grid.width, grid.height))
        fh.write(raw.tobytes())
