"""Planar state, transition model, and goal-distance cost.

Units are centimeters and radians throughout. The heading convention is
theta = 0 along world +X, counterclockwise positive; primitive 0 points
along +Y when theta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .primitives import MotionPrimitive


def wrap_angle(theta: float) -> float:
    """Normalize an angle to the half-open interval (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class Pose2D:
    """Planar robot state [x, y, theta] in the world frame (cm, cm, rad)."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"pose position must be finite, got ({self.x}, {self.y})")
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))


@dataclass(frozen=True)
class GoalState:
    """In-plane goal position (cm)."""

    x_bar: float
    y_bar: float

    def __post_init__(self):
        object.__setattr__(self, "x_bar", float(self.x_bar))
        object.__setattr__(self, "y_bar", float(self.y_bar))
        if not (math.isfinite(self.x_bar) and math.isfinite(self.y_bar)):
            raise ValueError(f"goal must be finite, got ({self.x_bar}, {self.y_bar})")


@dataclass(frozen=True)
class DisplacementPrediction:
    """Nominal planar displacement of one action; dtheta is always 0."""

    dx: float
    dy: float
    dtheta: float = 0.0


def predict_displacement(pose: Pose2D, primitive: "MotionPrimitive") -> DisplacementPrediction:
    """Nominal displacement of executing ``primitive`` from ``pose``.

    The transition model is polar: the robot translates by the primitive's
    nominal distance along heading theta + phi, with no rotation.
    """
    angle = pose.theta + primitive.phi
    return DisplacementPrediction(
        dx=primitive.r_nominal * math.cos(angle),
        dy=primitive.r_nominal * math.sin(angle),
        dtheta=0.0,
    )


def predict_next_state(pose: Pose2D, primitive: "MotionPrimitive") -> Pose2D:
    """Advance ``pose`` by the nominal displacement; theta is unchanged."""
    d = predict_displacement(pose, primitive)
    return Pose2D(pose.x + d.dx, pose.y + d.dy, pose.theta)


def cost(pose: Pose2D, goal: GoalState) -> float:
    """Euclidean distance from the pose position to the goal (cm).

    Heading is deliberately not weighed.
    """
    return math.hypot(pose.x - goal.x_bar, pose.y - goal.y_bar)
