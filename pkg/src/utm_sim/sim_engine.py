"""Synchronous fixed-step multi-vehicle simulation loop.

Each step works from a frozen snapshot of all vehicle states: waypoint
bookkeeping, threat gathering, and velocity decisions all read the snapshot,
and every new position commits simultaneously afterwards, so step results do
not depend on vehicle iteration order. Ground-truth collision checks run
against the true rectangles (not the circle approximation) and vehicle discs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import TYPE_CHECKING, Mapping, NamedTuple, Sequence

from .apf_core import ApfParams, apf_step
from .geom2d import Vec2, distance, point_rect_distance
from .obstacle_field import ObstacleField
from .rrt_planner import PlannerParams, PlanningError, WaypointPath, plan_path
from .vo_core import Threat, VoParams, avoid

if TYPE_CHECKING:
    from .scenario_cli import Scenario

DEFAULT_UAV_RADIUS = 12.0

ALGORITHMS = ("vo", "apf")


@dataclass(frozen=True, slots=True)
class SimParams:
    dt: float = 0.1
    kp: float = 0.2
    dist_wp: float = 10.0
    max_steps: int = 20_000
    algorithm: str = "vo"

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError("dt must be > 0")
        if self.kp <= 0.0:
            raise ValueError("kp must be > 0")
        if self.dist_wp <= 0.0:
            raise ValueError("dist_wp must be > 0")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be > 0")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")


@dataclass(frozen=True)
class UavState:
    """One vehicle's full state; replaced (never mutated) as the sim advances."""

    id: str
    position: Vec2
    velocity: Vec2
    radius: float
    path: WaypointPath
    waypoint_index: int = 0
    arrived: bool = False

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("radius must be > 0")
        if not 0 <= self.waypoint_index < len(self.path):
            raise ValueError("waypoint_index out of range")

    def current_waypoint(self) -> Vec2:
        return self.path.waypoints[self.waypoint_index]


class SimEvent(NamedTuple):
    t: float
    kind: str
    details: dict


class TrajectorySample(NamedTuple):
    t: float
    position: Vec2
    velocity: Vec2


@dataclass
class World:
    """Mutable container the engine advances; parameters and geometry are shared."""

    uavs: list[UavState]
    field: ObstacleField
    vo: VoParams = field(default_factory=VoParams)
    apf: ApfParams = field(default_factory=ApfParams)


@dataclass
class SimResult:
    trajectories: dict[str, list[TrajectorySample]]
    events: list[SimEvent]
    completed: bool
    steps: int
    algorithm: str


def assign_waypoint(state: UavState, dist_wp: float) -> UavState:
    """Advance one waypoint when within dist_wp; arriving at the last one parks the UAV.

    At most one advance per call. Already-arrived states pass through.
    """
    if state.arrived:
        return state
    if distance(state.position, state.current_waypoint()) >= dist_wp:
        return state
    if state.waypoint_index + 1 < len(state.path):
        return replace(state, waypoint_index=state.waypoint_index + 1)
    return replace(state, arrived=True, velocity=Vec2(0.0, 0.0))


def gather_threats(uav: UavState, snapshot: Sequence[UavState], obstacles: ObstacleField,
                   dist_uav: float, dist_obs: float) -> list[Threat]:
    """Threats within activation range, canonically ordered.

    Order is (distance, UAVs before obstacle circles, source id), which makes
    the seed-then-prune search independent of input vehicle order. Arrived
    UAVs still count: they are parked bodies. The per-rectangle distance
    prefilter is sound because every circle center lies on its rectangle's
    boundary, so rect distance <= any center distance.
    """
    keyed: list[tuple[float, int, str, Threat]] = []
    for other in snapshot:
        if other.id == uav.id:
            continue
        d = distance(uav.position, other.position)
        if d < dist_uav:
            keyed.append((d, 0, other.id, Threat(
                position=other.position,
                velocity=other.velocity,
                combined_radius=uav.radius + other.radius,
                kind="uav",
                source_id=other.id,
            )))
    for rect, circles in obstacles.circles_by_rect:
        if point_rect_distance(uav.position, rect) >= dist_obs:
            continue
        for k, c in enumerate(circles):
            d = distance(uav.position, c.center)
            if d < dist_obs:
                sid = f"{rect.id}#{k}"
                keyed.append((d, 1, sid, Threat(
                    position=c.center,
                    velocity=Vec2(0.0, 0.0),
                    combined_radius=uav.radius + c.radius,
                    kind="obstacle",
                    source_id=sid,
                )))
    keyed.sort(key=lambda item: (item[0], item[1], item[2]))
    return [item[3] for item in keyed]


def detect_collisions(world: World, t: float) -> list[SimEvent]:
    """Ground-truth overlap scan: UAV discs pairwise and against true rectangles.

    Strict inequalities: touching exactly is not a collision. Event order is
    canonical (sorted ids) regardless of the world's vehicle order.
    """
    events: list[SimEvent] = []
    uavs = sorted(world.uavs, key=lambda u: u.id)
    for a, b in combinations(uavs, 2):
        d = distance(a.position, b.position)
        if d < a.radius + b.radius:
            events.append(SimEvent(t, "uav_uav_collision",
                                   {"a": a.id, "b": b.id, "distance": d}))
    for u in uavs:
        for rect in world.field.rectangles:
            d = point_rect_distance(u.position, rect)
            if d < u.radius:
                events.append(SimEvent(t, "uav_obstacle_collision",
                                       {"uav": u.id, "rect": rect.id, "distance": d}))
    return events


def step(world: World, params: SimParams, t: float = 0.0) -> list[SimEvent]:
    """Advance every UAV one synchronous step; returns this step's events.

    Phases: waypoint bookkeeping, per-UAV threat gathering and velocity
    decision against the frozen snapshot, simultaneous position commit,
    ground-truth collision scan. `t` stamps the emitted events and should be
    the post-step time.
    """
    events: list[SimEvent] = []
    for i, u in enumerate(world.uavs):
        nxt = assign_waypoint(u, params.dist_wp)
        if nxt is not u:
            if nxt.arrived:
                events.append(SimEvent(t, "arrived", {"uav": u.id}))
            else:
                events.append(SimEvent(t, "waypoint_advanced",
                                       {"uav": u.id, "waypoint_index": nxt.waypoint_index}))
            world.uavs[i] = nxt

    snapshot = tuple(world.uavs)
    decided: list[tuple[Vec2, Vec2]] = []  # (new position, new velocity) per UAV
    for u in snapshot:
        if u.arrived:
            decided.append((u.position, Vec2(0.0, 0.0)))
            continue
        if params.algorithm == "vo":
            threats = gather_threats(u, snapshot, world.field,
                                     world.vo.dist_uav, world.vo.dist_obs)
            res = avoid(u, threats, world.vo)
            if res.empty_set:
                events.append(SimEvent(t, "empty_feasible_set", {"uav": u.id}))
            v = res.velocity
            decided.append((Vec2(u.position.x + params.dt * v.x,
                                 u.position.y + params.dt * v.y), v))
        else:
            threats = gather_threats(u, snapshot, world.field,
                                     world.apf.dist_uav, world.apf.dist_obs)
            new_pos = apf_step(u, threats, world.apf)
            v = Vec2((new_pos.x - u.position.x) / params.dt,
                     (new_pos.y - u.position.y) / params.dt)
            decided.append((new_pos, v))

    for i, (pos, vel) in enumerate(decided):
        world.uavs[i] = replace(world.uavs[i], position=pos, velocity=vel)

    events.extend(detect_collisions(world, t))
    return events


def derive_uav_seed(run_seed: int, uav_id: str) -> int:
    """Stable per-UAV planner seed; hash-based so it survives process boundaries."""
    digest = hashlib.sha256(f"{run_seed}:{uav_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def plan_paths(scenario: "Scenario", seed: int) -> dict[str, WaypointPath]:
    """Plan every UAV's waypoint path; deterministic in (scenario, seed)."""
    paths: dict[str, WaypointPath] = {}
    for uav in scenario.uavs:
        try:
            paths[uav.id] = plan_path(uav.start, uav.goal, scenario.rectangles,
                                      scenario.planner, derive_uav_seed(seed, uav.id))
        except PlanningError as exc:
            raise PlanningError(f"uav '{uav.id}': {exc}") from exc
    return paths


def build_world(scenario: "Scenario", paths: Mapping[str, WaypointPath]) -> World:
    uavs = [
        UavState(
            id=u.id,
            position=u.start,
            velocity=Vec2(0.0, 0.0),
            radius=scenario.uav_radius,
            path=paths[u.id],
        )
        for u in scenario.uavs
    ]
    obstacles = ObstacleField(list(scenario.rectangles),
                              scenario.circle_radius, scenario.circle_spacing)
    return World(uavs=uavs, field=obstacles, vo=scenario.vo, apf=scenario.apf)


def run_planned(scenario: "Scenario", params: SimParams,
                paths: Mapping[str, WaypointPath]) -> SimResult:
    """Simulate over pre-planned paths (lets both algorithms share one plan)."""
    world = build_world(scenario, paths)
    trajectories = {
        u.id: [TrajectorySample(0.0, u.position, u.velocity)] for u in world.uavs
    }
    events = detect_collisions(world, 0.0)
    steps = 0
    while steps < params.max_steps and not all(u.arrived for u in world.uavs):
        steps += 1
        t = steps * params.dt
        events.extend(step(world, params, t))
        for u in world.uavs:
            trajectories[u.id].append(TrajectorySample(t, u.position, u.velocity))
    return SimResult(
        trajectories=trajectories,
        events=events,
        completed=all(u.arrived for u in world.uavs),
        steps=steps,
        algorithm=params.algorithm,
    )


def run(scenario: "Scenario", params: SimParams, seed: int) -> SimResult:
    """Plan all paths, then simulate them with the configured algorithm."""
    return run_planned(scenario, params, plan_paths(scenario, seed))
