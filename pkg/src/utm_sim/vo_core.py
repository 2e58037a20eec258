"""Velocity-obstacle avoidance: collision cones and the feasible-velocity search.

For each conflicting threat, the set of relative velocities that would ever
bring the vehicle within the combined radius forms an angular cone around the
line of sight. The search enumerates replacement relative velocities on a
polar grid (headings every theta_step around the full circle, speeds every
mag_step up to the current relative speed), keeps the ones outside the first
conflicting threat's cone, prunes that set against every further conflicting
threat, and finally picks the candidate closest to the vehicle's nominal
velocity. An empty set falls back to hovering in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple, Sequence

from .geom2d import TAU, Vec2, angle_of, distance, normalize_angle

if TYPE_CHECKING:
    from .sim_engine import UavState


@dataclass(frozen=True, slots=True)
class VoParams:
    theta_step: float = 0.2
    mag_step: float = 0.2
    dist_uav: float = 50.0
    dist_obs: float = 20.0
    kp: float = 0.2

    def __post_init__(self) -> None:
        for name in ("theta_step", "mag_step", "dist_uav", "dist_obs", "kp"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True, slots=True)
class Threat:
    """One conflict source as seen by a single vehicle for one decision.

    combined_radius is the sum of both bodies' radii. kind/source_id only feed
    the engine's canonical threat ordering; the cone math never reads them.
    """

    position: Vec2
    velocity: Vec2
    combined_radius: float
    kind: str = "uav"
    source_id: str = ""


@dataclass(frozen=True, slots=True)
class CollisionCone:
    """Angular cone of relative velocities leading to collision with one threat.

    center_angle is the line-of-sight angle toward the threat, half_angle the
    cone half-width. already_violating marks separations at or below the
    combined radius, where the cone degenerates to the approaching half-plane.
    """

    center_angle: float
    half_angle: float
    c_left: float
    c_right: float
    already_violating: bool


class Candidate(NamedTuple):
    """One feasible absolute velocity plus the (theta, magnitude) grid cell it came from."""

    velocity: Vec2
    theta: float
    magnitude: float


@dataclass
class FeasibleSet:
    """Feasible velocity candidates in search order (ascending theta, then magnitude)."""

    candidates: list[Candidate] = field(default_factory=list)


class AvoidResult(NamedTuple):
    velocity: Vec2
    engaged: bool
    empty_set: bool


def collision_cone(p_a: Vec2, p_b: Vec2, r_a: float, r_b: float) -> CollisionCone:
    """Cone of relative velocities of A (w.r.t. B) that lead to collision.

    Line of sight from the two-argument arctangent; half-angle is
    asin((r_a + r_b) / distance). At distance <= combined radius the geometric
    cone is undefined, so the half-angle clamps to pi/2 (any velocity with an
    approaching component is conflicting) and already_violating is set.
    """
    if r_a < 0.0 or r_b < 0.0:
        raise ValueError("radii must be >= 0")
    d = distance(p_a, p_b)
    if d == 0.0:
        raise ValueError("collision cone undefined for coincident positions")
    center = angle_of(p_b - p_a)
    combined = r_a + r_b
    if d <= combined:
        half = math.pi / 2.0
        violating = True
    else:
        half = math.asin(combined / d)
        violating = False
    return CollisionCone(
        center_angle=center,
        half_angle=half,
        c_left=normalize_angle(center + half),
        c_right=normalize_angle(center - half),
        already_violating=violating,
    )


def in_cone(v_rel: Vec2, cone: CollisionCone) -> bool:
    """True when the relative velocity heading lies strictly inside the cone.

    The zero vector has no heading and is never inside: staying put cannot
    close the gap. Boundary headings (offset exactly half_angle) are outside.
    """
    if v_rel.is_zero():
        return False
    offset = normalize_angle(math.atan2(v_rel.y, v_rel.x) - cone.center_angle)
    return abs(offset) < cone.half_angle


def _heading_in_cone(theta: float, cone: CollisionCone) -> bool:
    # same predicate as in_cone for a nonzero velocity with known heading
    return abs(normalize_angle(theta - cone.center_angle)) < cone.half_angle


def _magnitude_grid(v_max: float, step: float) -> list[float]:
    """Speeds {k*step <= v_max} plus v_max itself when it is off-grid."""
    grid: list[float] = []
    k = 0
    while (m := k * step) <= v_max:
        grid.append(m)
        k += 1
    if grid[-1] != v_max:
        grid.append(v_max)
    return grid


def search_feasible(v_ab: Vec2, v_b: Vec2, cone: CollisionCone,
                    params: VoParams) -> FeasibleSet:
    """Enumerate replacement velocities outside `cone`, in absolute form.

    Headings run over {k*theta_step < 2*pi}; per heading, speeds over the
    magnitude grid capped at |v_ab|. A relative candidate (m, theta) survives
    when it is outside the cone; it is stored as the absolute velocity
    (m*cos, m*sin) + v_b so later pruning and selection work in world frame.
    """
    speeds = _magnitude_grid(v_ab.norm(), params.mag_step)
    out = FeasibleSet()
    k = 0
    while (theta := k * params.theta_step) < TAU:
        heading_clear = not _heading_in_cone(theta, cone)
        if heading_clear:
            cos_t, sin_t = math.cos(theta), math.sin(theta)
            for m in speeds:
                rel = Vec2(m * cos_t, m * sin_t)
                out.candidates.append(Candidate(rel + v_b, theta, m))
        else:
            # zero speed has no heading, so it survives any cone
            out.candidates.append(Candidate(Vec2(0.0, 0.0) + v_b, theta, 0.0))
        k += 1
    return out


def prune_feasible(fset: FeasibleSet, v_b_other: Vec2,
                   cone_other: CollisionCone) -> FeasibleSet:
    """Drop candidates whose velocity relative to another threat falls in its cone."""
    survivors = [
        c for c in fset.candidates
        if not in_cone(c.velocity - v_b_other, cone_other)
    ]
    return FeasibleSet(survivors)


def select_velocity(fset: FeasibleSet, v_desired: Vec2) -> Vec2:
    """Candidate closest to the nominal velocity; earliest wins ties; hover if empty."""
    best: Vec2 | None = None
    best_d2 = math.inf
    for cand in fset.candidates:
        dx = cand.velocity.x - v_desired.x
        dy = cand.velocity.y - v_desired.y
        d2 = dx * dx + dy * dy
        if d2 < best_d2:
            best, best_d2 = cand.velocity, d2
    return best if best is not None else Vec2(0.0, 0.0)


def avoid(state: "UavState", threats: Sequence[Threat], params: VoParams) -> AvoidResult:
    """One avoidance decision for one vehicle.

    `threats` must already be filtered to activation range and canonically
    ordered (nearest first); the first threat whose cone captures the nominal
    relative velocity seeds the feasible set, later conflicting threats prune
    it. With no conflicting threat the nominal velocity passes through
    unchanged. An emptied set returns hover (0, 0) with empty_set set, which
    the engine logs.
    """
    wp = state.current_waypoint()
    v_a = Vec2(params.kp * (wp.x - state.position.x), params.kp * (wp.y - state.position.y))
    fset: FeasibleSet | None = None
    for threat in threats:
        if threat.position == state.position:
            continue  # no line of sight to hang a cone on
        cone = collision_cone(state.position, threat.position, 0.0, threat.combined_radius)
        v_rel = v_a - threat.velocity
        if not in_cone(v_rel, cone):
            continue
        if fset is None:
            fset = search_feasible(v_rel, threat.velocity, cone, params)
        else:
            fset = prune_feasible(fset, threat.velocity, cone)
    if fset is None:
        return AvoidResult(v_a, engaged=False, empty_set=False)
    if not fset.candidates:
        return AvoidResult(Vec2(0.0, 0.0), engaged=True, empty_set=True)
    return AvoidResult(select_velocity(fset, v_a), engaged=True, empty_set=False)
