"""Run post-processing: path lengths, pairwise separations, event tallies."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .geom2d import Vec2, distance
from .sim_engine import SimResult

COLLISION_MARKER = "--"

EVENT_KINDS = (
    "arrived",
    "waypoint_advanced",
    "empty_feasible_set",
    "uav_uav_collision",
    "uav_obstacle_collision",
)


def path_length(points: Sequence[Vec2]) -> float:
    """Total polyline length of a recorded trajectory (0 for a single sample)."""
    if len(points) == 0:
        raise ValueError("empty trajectory")
    return sum(distance(a, b) for a, b in zip(points, points[1:]))


def pairwise_distances(
    trajectories: Mapping[str, Sequence[Vec2]],
) -> tuple[dict[tuple[str, str], list[float]], dict[tuple[str, str], float]]:
    """Per-step distance series and minima for every unordered UAV pair.

    All trajectories must be time-aligned (equal sample counts). Pair keys
    follow the mapping's iteration order.
    """
    ids = list(trajectories)
    lengths = {len(trajectories[i]) for i in ids}
    if len(lengths) > 1:
        raise ValueError(f"trajectories are not time-aligned: sample counts {sorted(lengths)}")
    if lengths == {0}:
        raise ValueError("empty trajectories")
    series: dict[tuple[str, str], list[float]] = {}
    minima: dict[tuple[str, str], float] = {}
    for a, b in combinations(ids, 2):
        ds = [distance(p, q) for p, q in zip(trajectories[a], trajectories[b])]
        series[(a, b)] = ds
        minima[(a, b)] = min(ds)
    return series, minima


@dataclass
class RunReport:
    """Summary of one simulation run.

    path_lengths maps a collided UAV to None (rendered as the '--' marker on
    export); the number is never replaced by a sentinel value.
    """

    algorithm: str
    completed: bool
    steps: int
    path_lengths: dict[str, float | None]
    pair_min_distances: dict[tuple[str, str], float]
    collision_counts: dict[str, int]
    empty_feasible_set_events: int
    event_counts: dict[str, int]


def build_report(result: SimResult) -> RunReport:
    if not result.trajectories:
        raise ValueError("result has no trajectories")
    for uid, samples in result.trajectories.items():
        if len(samples) == 0:
            raise ValueError(f"uav '{uid}' has an empty trajectory")

    event_counts = {kind: 0 for kind in EVENT_KINDS}
    collided: set[str] = set()
    for ev in result.events:
        event_counts[ev.kind] = event_counts.get(ev.kind, 0) + 1
        if ev.kind == "uav_uav_collision":
            collided.add(ev.details["a"])
            collided.add(ev.details["b"])
        elif ev.kind == "uav_obstacle_collision":
            collided.add(ev.details["uav"])

    positions = {uid: [s.position for s in samples]
                 for uid, samples in result.trajectories.items()}
    path_lengths: dict[str, float | None] = {
        uid: (None if uid in collided else path_length(pts))
        for uid, pts in positions.items()
    }
    _, minima = pairwise_distances(positions)
    return RunReport(
        algorithm=result.algorithm,
        completed=result.completed,
        steps=result.steps,
        path_lengths=path_lengths,
        pair_min_distances=minima,
        collision_counts={
            "uav_uav_collision": event_counts["uav_uav_collision"],
            "uav_obstacle_collision": event_counts["uav_obstacle_collision"],
        },
        empty_feasible_set_events=event_counts["empty_feasible_set"],
        event_counts=event_counts,
    )
