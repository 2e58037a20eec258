"""Static world geometry: solid rectangles and their boundary-circle approximation.

Planning and ground-truth collision checks run against the true rectangles;
online avoidance sees each rectangle as a ring of equal circles placed on its
perimeter, so the avoidance layer only ever reasons about discs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom2d import Vec2, distance

DEFAULT_CIRCLE_RADIUS = 12.0
DEFAULT_CIRCLE_SPACING = 15.0


@dataclass(frozen=True, slots=True)
class RectObstacle:
    """Axis-aligned solid rectangle, defined by center and side lengths."""

    center: Vec2
    width: float
    height: float
    id: str

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and self.height > 0.0):
            raise ValueError(f"rectangle '{self.id}' must have positive width and height")

    @property
    def min_x(self) -> float:
        return self.center.x - self.width / 2.0

    @property
    def max_x(self) -> float:
        return self.center.x + self.width / 2.0

    @property
    def min_y(self) -> float:
        return self.center.y - self.height / 2.0

    @property
    def max_y(self) -> float:
        return self.center.y + self.height / 2.0

    def corners(self) -> tuple[Vec2, Vec2, Vec2, Vec2]:
        """Corners in counter-clockwise perimeter order, starting at (min_x, min_y)."""
        return (
            Vec2(self.min_x, self.min_y),
            Vec2(self.max_x, self.min_y),
            Vec2(self.max_x, self.max_y),
            Vec2(self.min_x, self.max_y),
        )


@dataclass(frozen=True, slots=True)
class CircleObstacle:
    """One disc of the boundary approximation; `parent` is the source rectangle id."""

    center: Vec2
    radius: float
    parent: str


def discretize_rectangle(rect: RectObstacle, circle_radius: float,
                         spacing: float) -> list[CircleObstacle]:
    """Cover the rectangle's perimeter with circles of `circle_radius`.

    Each corner gets a circle; each edge gets interior circles at the largest
    even subdivision of the edge that keeps consecutive centers <= `spacing`
    apart. With spacing < 2 * circle_radius, adjacent circles overlap, so every
    boundary point lies within a circle (worst case spacing/2 from a center).
    """
    if circle_radius <= 0.0:
        raise ValueError("circle_radius must be > 0")
    if spacing <= 0.0:
        raise ValueError("spacing must be > 0")
    if spacing >= 2.0 * circle_radius:
        raise ValueError(
            f"spacing {spacing} must be < 2 * circle_radius ({2.0 * circle_radius}); "
            "adjacent circles would leave perimeter gaps"
        )
    corners = rect.corners()
    circles: list[CircleObstacle] = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        circles.append(CircleObstacle(a, circle_radius, rect.id))
        edge_len = distance(a, b)
        n = math.ceil(edge_len / spacing)
        for k in range(1, n):
            t = k / n
            c = Vec2(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
            circles.append(CircleObstacle(c, circle_radius, rect.id))
    return circles


class ObstacleField:
    """All static obstacles of a scenario plus their circle approximation.

    Immutable after construction; the engine shares one instance across steps.
    """

    def __init__(self, rectangles: list[RectObstacle],
                 circle_radius: float = DEFAULT_CIRCLE_RADIUS,
                 spacing: float = DEFAULT_CIRCLE_SPACING):
        seen: set[str] = set()
        for r in rectangles:
            if r.id in seen:
                raise ValueError(f"duplicate rectangle id '{r.id}'")
            seen.add(r.id)
        self.rectangles: tuple[RectObstacle, ...] = tuple(rectangles)
        self.circle_radius = circle_radius
        self.spacing = spacing
        self.circles_by_rect: tuple[tuple[RectObstacle, tuple[CircleObstacle, ...]], ...] = tuple(
            (r, tuple(discretize_rectangle(r, circle_radius, spacing))) for r in self.rectangles
        )
        self.circles: tuple[CircleObstacle, ...] = tuple(
            c for _, group in self.circles_by_rect for c in group
        )
