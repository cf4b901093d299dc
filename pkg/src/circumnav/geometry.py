"""Planar vector primitives and the signed boundary-distance model.

Positions and velocities are in field units (1 unit = 100 m). Angles are
radians, always normalised into ``[0, 2*pi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BearingSingularityError, DegenerateVectorError, InvalidTargetError

TWO_PI = 2.0 * math.pi

# Bearing precondition threshold; closed-loop D^c > 0 is a proven invariant,
# so anything below this is treated as a bug rather than regularised.
SINGULARITY_EPS = 1e-9


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite Vec2 component: ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> Vec2:
        return Vec2(self.x / s, self.y / s)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        """z-component of the 3D cross product of the embedded vectors."""
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)


def normalize_angle(value: float) -> float:
    a = math.fmod(value, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # a tiny negative input can round up to exactly 2*pi
    if a >= TWO_PI:
        a = 0.0
    return a


@dataclass(frozen=True)
class Angle:
    """An angle normalised into ``[0, 2*pi)`` at construction."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite angle: {self.value}")
        object.__setattr__(self, "value", normalize_angle(self.value))

    def __float__(self) -> float:
        return self.value


def rotate90(v: Vec2) -> Vec2:
    """Apply ``E = [[0, 1], [-1, 0]]``: a clockwise quarter turn."""
    return Vec2(v.y, -v.x)


def ccw_angle(v1: Vec2, v2: Vec2) -> Angle:
    """Counterclockwise angle swept from ``v1`` to ``v2``."""
    if (v1.x == 0.0 and v1.y == 0.0) or (v2.x == 0.0 and v2.y == 0.0):
        raise DegenerateVectorError("ccw_angle of a zero-length vector")
    return Angle(math.atan2(v1.cross(v2), v1.dot(v2)))


def bearing(c_hat: Vec2, p: Vec2, eps: float = SINGULARITY_EPS) -> Vec2:
    """Unit vector from ``p`` towards the estimated centre ``c_hat``."""
    dx = c_hat.x - p.x
    dy = c_hat.y - p.y
    dist = math.sqrt(dx * dx + dy * dy)
    if not dist > eps:
        raise BearingSingularityError(
            f"agent at ({p.x}, {p.y}) is {dist:g} from the estimated centre"
        )
    return Vec2(dx / dist, dy / dist)


def signed_boundary_distance(p: Vec2, c: Vec2, r: float) -> float:
    """Distance from ``p`` to the circle ``(c, r)``; negative inside."""
    if not r > 0.0:
        raise InvalidTargetError(f"target radius must be positive, got {r}")
    dx = c.x - p.x
    dy = c.y - p.y
    return math.sqrt(dx * dx + dy * dy) - r
