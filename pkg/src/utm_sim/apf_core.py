"""Potential-field baseline: fixed-magnitude attraction and repulsion.

The attractive force always has magnitude k_att toward the active waypoint and
the repulsive force magnitude k_rep away from each active threat, regardless
of range. The constant magnitudes are deliberate: they are what makes this
baseline cut corners near obstacle edges, which the avoidance comparison
measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .geom2d import Vec2

if TYPE_CHECKING:
    from .sim_engine import UavState
    from .vo_core import Threat


@dataclass(frozen=True, slots=True)
class ApfParams:
    k_att: float = 8.0
    k_rep: float = 15.0
    dt: float = 0.1
    dist_wp: float = 10.0
    dist_uav: float = 50.0
    dist_obs: float = 20.0

    def __post_init__(self) -> None:
        for name in ("k_att", "k_rep", "dt", "dist_wp", "dist_uav", "dist_obs"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")


def attractive_force(pos: Vec2, waypoint: Vec2, k_att: float) -> Vec2:
    """Force of magnitude k_att pointing from pos toward the waypoint."""
    direction = waypoint - pos
    if direction.is_zero():
        raise ValueError("attractive force undefined at the waypoint itself")
    return k_att * direction.unit()


def repulsive_force(pos: Vec2, threat_pos: Vec2, k_rep: float) -> Vec2:
    """Force of magnitude k_rep pointing from the threat toward pos."""
    direction = pos - threat_pos
    if direction.is_zero():
        raise ValueError("repulsive force undefined at coincident positions")
    return k_rep * direction.unit()


def total_force(pos: Vec2, waypoint: Vec2, threat_positions: Sequence[Vec2],
                params: ApfParams) -> Vec2:
    """Attractive force plus the sum of per-threat repulsions."""
    f = attractive_force(pos, waypoint, params.k_att)
    for tp in threat_positions:
        f = f + repulsive_force(pos, tp, params.k_rep)
    return f


def apf_step(state: "UavState", threats: Sequence["Threat"], params: ApfParams) -> Vec2:
    """New position after one Euler step of the total force.

    `threats` must already be filtered to activation range; only their
    positions matter here.
    """
    wp = state.current_waypoint()
    f = total_force(state.position, wp, [t.position for t in threats], params)
    return Vec2(state.position.x + params.dt * f.x, state.position.y + params.dt * f.y)
