"""Elementary 3D vector and configuration types shared by all modules.

Positions and lengths are expressed in the same unit as the turn radius;
angles are radians throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Vectors shorter than this are treated as zero; well below geometric noise
# for radii of order one, well above double rounding.
EPS_ZERO = 1e-9

_UNIT_TOL = 1e-12


class DubinsError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(DubinsError):
    """Raised when a direction is requested from a (near-)zero vector."""


@dataclass(frozen=True, slots=True)
class Vec3:
    """Immutable 3D vector with finite components."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite vector components: ({self.x}, {self.y}, {self.z})")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True, slots=True)
class UnitVec3(Vec3):
    """A Vec3 constrained to unit length (within 1e-12)."""

    def __post_init__(self) -> None:
        # explicit base call: slots=True regenerates the class, breaking super()
        Vec3.__post_init__(self)
        if abs(self.norm() - 1.0) > _UNIT_TOL:
            raise ValueError(f"not a unit vector: norm={self.norm()!r}")

    def __neg__(self) -> "UnitVec3":
        return UnitVec3(-self.x, -self.y, -self.z)


def normalize(v: Vec3) -> UnitVec3:
    """Return v / ||v||.

    Raises ZeroVector if ||v|| <= EPS_ZERO.
    """
    n = v.norm()
    if n <= EPS_ZERO:
        raise ZeroVector(f"cannot normalize near-zero vector (norm={n!r})")
    return UnitVec3(v.x / n, v.y / n, v.z / n)


def point_line_distance(p: Vec3, origin: Vec3, direction: UnitVec3) -> float:
    """Distance from point p to the line through origin with unit direction."""
    d = p - origin
    along = d.dot(direction)
    return (d - along * direction).norm()


@dataclass(frozen=True, slots=True)
class Configuration:
    """A position together with a unit heading."""

    position: Vec3
    direction: UnitVec3

    def point_along(self, h: float) -> Vec3:
        """Point at signed offset h along the configuration's ray."""
        return self.position + h * self.direction


@dataclass(frozen=True, slots=True)
class ProblemInstance:
    """Start and goal configurations plus the minimum turn radius."""

    start: Configuration
    goal: Configuration
    radius: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"radius must be positive and finite, got {self.radius!r}")

    @property
    def chord(self) -> float:
        """Straight-line distance between start and goal positions."""
        return (self.goal.position - self.start.position).norm()


def instance(
    start_position: tuple[float, float, float],
    start_direction: tuple[float, float, float],
    goal_position: tuple[float, float, float],
    goal_direction: tuple[float, float, float],
    radius: float = 1.0,
) -> ProblemInstance:
    """Convenience constructor from raw tuples; directions are normalized."""
    return ProblemInstance(
        Configuration(Vec3(*start_position), normalize(Vec3(*start_direction))),
        Configuration(Vec3(*goal_position), normalize(Vec3(*goal_direction))),
        radius,
    )
