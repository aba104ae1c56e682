"""Dimension-generic vector primitives shared by every sampler.

States are plain float64 numpy arrays of shape (d,), d >= 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

StateVec = np.ndarray

#: Random stream scheme. Philox is a counter-based generator (Random123 family)
#: with published semantics, so a stream can be replayed from the bare 64-bit
#: seed by any conforming implementation. One stream is owned by one trial.
RNG_SCHEME = "philox4x64 keyed directly by the 64-bit trial seed"


def rng_stream(seed: int) -> np.random.Generator:
    """Deterministic per-trial random stream; same seed, same sequence."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def as_state(coords) -> StateVec:
    """Coerce to a finite float64 vector."""
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"state must be a flat vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("state has non-finite coordinates")
    return x


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned box defining the search space."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", as_state(self.lower))
        object.__setattr__(self, "upper", as_state(self.upper))
        if self.lower.shape != self.upper.shape:
            raise ValueError("bounds lower/upper dimension mismatch")
        if not np.all(self.lower < self.upper):
            raise ValueError("bounds require lower[i] < upper[i]")

    @property
    def d(self) -> int:
        return self.lower.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, x: StateVec) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def sample(self, rng: np.random.Generator) -> StateVec:
        return self.lower + rng.random(self.d) * self.widths


def l2_heuristic(x1: StateVec, x2: StateVec) -> float:
    """Euclidean consistent heuristic between two states."""
    if x1.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x1.shape} vs {x2.shape}")
    return float(np.linalg.norm(x2 - x1))


def sample_unit_direction(rng: np.random.Generator, d: int) -> StateVec:
    """Uniform direction on the (d-1)-sphere via normalized normal draws."""
    if d < 2:
        raise ValueError("direction sampling requires d >= 2")
    while True:
        v = rng.standard_normal(d)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def radial_offset(rng: np.random.Generator, gamma_rel: float, d: int) -> float:
    """Travel magnitude u**(1/d) * gamma_rel, biased toward gamma_rel.

    The 1/d exponent makes the offset land uniformly in the volume of the
    d-ball of radius gamma_rel once paired with a uniform direction.
    """
    if gamma_rel <= 0.0:
        raise ValueError("gamma_rel must be positive")
    u = rng.random()
    while u == 0.0:  # keep the result in (0, gamma_rel]
        u = rng.random()
    return float(u ** (1.0 / d) * gamma_rel)
