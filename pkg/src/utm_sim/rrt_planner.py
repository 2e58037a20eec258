"""Sampling-based waypoint planner over rectangle maps.

Grows a random tree from the start, extending a fixed step toward uniform (or
goal-biased) samples, keeping only edges that stay clear of every rectangle
inflated by the vehicle radius. The first vertex inside the goal region ends
the search; the returned waypoint list is the tree branch from start to that
vertex, unsmoothed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geom2d import Bounds, Vec2, distance, segment_intersects_rect
from .obstacle_field import RectObstacle


class PlanningError(Exception):
    """Planner exhausted its iteration budget without reaching the goal region."""


@dataclass(frozen=True, slots=True)
class PlannerParams:
    step_size: float = 10.0
    goal_bias: float = 0.05
    max_iters: int = 10_000
    goal_radius: float = 10.0
    inflation: float = 12.0
    bounds: Bounds = Bounds(0.0, 0.0, 400.0, 400.0)

    def __post_init__(self) -> None:
        if self.step_size <= 0.0:
            raise ValueError("step_size must be > 0")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must be in [0, 1]")
        if self.max_iters <= 0:
            raise ValueError("max_iters must be > 0")
        if self.goal_radius <= 0.0:
            raise ValueError("goal_radius must be > 0")
        if self.inflation < 0.0:
            raise ValueError("inflation must be >= 0")


@dataclass(frozen=True)
class WaypointPath:
    """Ordered waypoints from start to goal region, consecutive pairs <= step_size apart."""

    waypoints: tuple[Vec2, ...]

    def __post_init__(self) -> None:
        if len(self.waypoints) == 0:
            raise ValueError("a path needs at least one waypoint")

    def __len__(self) -> int:
        return len(self.waypoints)

    def length(self) -> float:
        return sum(distance(a, b) for a, b in zip(self.waypoints, self.waypoints[1:]))


class RrtTree:
    """Tree of collision-free configurations; vertex 0 is the start, edges point to parents."""

    def __init__(self, root: Vec2):
        self.vertices: list[Vec2] = [root]
        self.parents: list[int] = [-1]
        # packed coordinates for the nearest-vertex scan
        self._coords = np.empty((256, 2), dtype=np.float64)
        self._coords[0] = (root.x, root.y)

    def __len__(self) -> int:
        return len(self.vertices)

    def add(self, v: Vec2, parent: int) -> int:
        if not 0 <= parent < len(self.vertices):
            raise ValueError(f"parent index {parent} out of range")
        idx = len(self.vertices)
        self.vertices.append(v)
        self.parents.append(parent)
        if idx >= self._coords.shape[0]:
            grown = np.empty((self._coords.shape[0] * 2, 2), dtype=np.float64)
            grown[:idx] = self._coords[:idx]
            self._coords = grown
        self._coords[idx] = (v.x, v.y)
        return idx

    def nearest(self, q: Vec2) -> int:
        """Index of the vertex closest to q; ties go to the lowest index."""
        pts = self._coords[: len(self.vertices)]
        d2 = (pts[:, 0] - q.x) ** 2 + (pts[:, 1] - q.y) ** 2
        return int(np.argmin(d2))

    def branch_to(self, idx: int) -> list[Vec2]:
        """Vertices from the root to idx, in root-first order."""
        out: list[Vec2] = []
        while idx >= 0:
            out.append(self.vertices[idx])
            idx = self.parents[idx]
        out.reverse()
        return out


def sample_config(params: PlannerParams, goal: Vec2, rng: random.Random) -> Vec2:
    """Goal with probability goal_bias, otherwise uniform over the workspace bounds."""
    if rng.random() < params.goal_bias:
        return goal
    b = params.bounds
    return Vec2(rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y))


def nearest_vertex(tree: RrtTree, q: Vec2) -> int:
    return tree.nearest(q)


def steer(origin: Vec2, toward: Vec2, step_size: float) -> Vec2:
    """Point at most step_size from origin along the ray origin -> toward.

    Returns `toward` itself when it is already within step_size, so reaching a
    sampled goal lands exactly on it.
    """
    if step_size <= 0.0:
        raise ValueError("step_size must be > 0")
    d = distance(origin, toward)
    if d == 0.0:
        raise ValueError("cannot steer between coincident points")
    if d <= step_size:
        return toward
    t = step_size / d
    return Vec2(origin.x + (toward.x - origin.x) * t, origin.y + (toward.y - origin.y) * t)


def _point_clear(p: Vec2, obstacles: Sequence[RectObstacle], params: PlannerParams) -> bool:
    if not params.bounds.contains(p):
        return False
    return not any(segment_intersects_rect(p, p, r, params.inflation) for r in obstacles)


def plan_path(start: Vec2, goal: Vec2, obstacles: Sequence[RectObstacle],
              params: PlannerParams, seed: int) -> WaypointPath:
    """Plan a waypoint path from start to the goal region.

    Deterministic for a given (start, goal, obstacles, params, seed). Raises
    ValueError for infeasible endpoints and PlanningError when max_iters runs
    out; PlanningError is recoverable (retry with another seed or budget).
    """
    for label, p in (("start", start), ("goal", goal)):
        if not params.bounds.contains(p):
            raise ValueError(f"{label} {p} lies outside the workspace bounds")
        if not _point_clear(p, obstacles, params):
            raise ValueError(f"{label} {p} lies inside an inflated obstacle")
    if distance(start, goal) < params.goal_radius:
        return WaypointPath((start,))

    rng = random.Random(seed)
    tree = RrtTree(start)
    for _ in range(params.max_iters):
        target = sample_config(params, goal, rng)
        near_idx = tree.nearest(target)
        origin = tree.vertices[near_idx]
        if origin == target:
            continue
        new_point = steer(origin, target, params.step_size)
        if not params.bounds.contains(new_point):
            continue
        if any(segment_intersects_rect(origin, new_point, r, params.inflation)
               for r in obstacles):
            continue
        new_idx = tree.add(new_point, near_idx)
        if distance(new_point, goal) < params.goal_radius:
            return WaypointPath(tuple(tree.branch_to(new_idx)))
    raise PlanningError(
        f"no path from {start} to {goal} within {params.max_iters} iterations"
    )
