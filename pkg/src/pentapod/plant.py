"""Stochastic kinematic stand-in for the physical robot.

Executing a primitive displaces the body along the commanded heading by a
truncated-normal distance, plus a lateral offset and a small heading
perturbation, over a truncated-normal duration. Defaults are calibrated
to the measured hardware behavior: 2.31 cm and 2.52 s per iteration,
roughly 1 cm/s. A contact clamp keeps the body center at least one arm
radius away from the goal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import GoalState, Pose2D, wrap_angle
from .primitives import MotionPrimitive, NUM_LIMBS

DEFAULT_STEP_MEAN_CM = 2.31
DEFAULT_STEP_STD_CM = 0.7
DEFAULT_LATERAL_STD_CM = 0.5
DEFAULT_HEADING_STD_RAD = math.radians(5.0)
DEFAULT_DURATION_MEAN_S = 2.52
DEFAULT_DURATION_STD_S = 0.2
DEFAULT_BODY_RADIUS_CM = 10.0
MIN_DURATION_S = 1e-3


@dataclass
class NoiseModel:
    """Disturbance parameters of primitive execution.

    ``step_mean_cm`` may be a single value shared by all primitives or a
    per-primitive sequence of five. Magnitudes are truncated at zero.
    """

    step_mean_cm: Sequence[float] | float = DEFAULT_STEP_MEAN_CM
    step_std_cm: Sequence[float] | float = DEFAULT_STEP_STD_CM
    lateral_std_cm: float = DEFAULT_LATERAL_STD_CM
    heading_std_rad: float = DEFAULT_HEADING_STD_RAD
    duration_mean_s: float = DEFAULT_DURATION_MEAN_S
    duration_std_s: float = DEFAULT_DURATION_STD_S

    def __post_init__(self):
        self.step_mean_cm = self._per_primitive(self.step_mean_cm, "step_mean_cm")
        self.step_std_cm = self._per_primitive(self.step_std_cm, "step_std_cm")
        if any(m < 0 for m in self.step_mean_cm):
            raise ValueError("step means must be >= 0")
        for name in ("lateral_std_cm", "heading_std_rad", "duration_std_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if any(s < 0 for s in self.step_std_cm):
            raise ValueError("step stds must be >= 0")

    @staticmethod
    def _per_primitive(value, name) -> Tuple[float, ...]:
        if isinstance(value, (int, float)):
            return (float(value),) * NUM_LIMBS
        values = tuple(float(v) for v in value)
        if len(values) != NUM_LIMBS:
            raise ValueError(f"{name} needs 1 or {NUM_LIMBS} values, got {len(values)}")
        return values

    @classmethod
    def noise_free(cls, step_mean_cm: Sequence[float] | float = DEFAULT_STEP_MEAN_CM,
                   duration_mean_s: float = DEFAULT_DURATION_MEAN_S) -> "NoiseModel":
        """Degenerate model: every execution is exactly nominal."""
        return cls(step_mean_cm=step_mean_cm, step_std_cm=0.0, lateral_std_cm=0.0,
                   heading_std_rad=0.0, duration_mean_s=duration_mean_s,
                   duration_std_s=0.0)


@dataclass(frozen=True)
class ExecutionOutcome:
    """Realized displacement, rotation, and duration of one primitive."""

    dx: float
    dy: float
    dtheta: float
    duration: float


def truncated_normal(rng: np.random.Generator, mean: float, std: float,
                     lower: float) -> float:
    """Sample Normal(mean, std) conditioned on the result being >= lower."""
    if std == 0.0:
        return max(mean, lower)
    while True:
        sample = rng.normal(mean, std)
        if sample >= lower:
            return float(sample)


def truncated_normal_mean(mean: float, std: float, lower: float = 0.0) -> float:
    """Exact mean of the truncated distribution (calibration oracle)."""
    if std == 0.0:
        return max(mean, lower)
    alpha = (lower - mean) / std
    pdf = math.exp(-0.5 * alpha * alpha) / math.sqrt(2.0 * math.pi)
    survival = 0.5 * math.erfc(alpha / math.sqrt(2.0))
    return mean + std * pdf / survival


def goal_contact_clamp(start: Pose2D, end: Pose2D, goal: GoalState,
                       body_radius: float = DEFAULT_BODY_RADIUS_CM) -> Pose2D:
    """Stop the motion where the body first contacts the goal circle.

    If the straight-line motion from ``start`` to ``end`` enters the disc
    of ``body_radius`` around the goal, the position is pulled back to the
    first intersection of the segment with the contact circle. Heading is
    untouched. A start already inside the disc is projected radially out.
    """
    if body_radius < 0:
        raise ValueError(f"body_radius must be >= 0, got {body_radius}")
    gx, gy = goal.x_bar, goal.y_bar
    ex, ey = end.x - gx, end.y - gy
    if math.hypot(ex, ey) >= body_radius:
        return end

    sx, sy = start.x - gx, start.y - gy
    start_dist = math.hypot(sx, sy)
    if start_dist < body_radius:
        # Shouldn't happen when the clamp is applied every step; push out.
        if start_dist == 0.0:
            return Pose2D(gx + body_radius, gy, end.theta)
        scale = body_radius / start_dist
        return Pose2D(gx + sx * scale, gy + sy * scale, end.theta)

    # First root of |s + t*(e - s)|^2 = body_radius^2 in t of [0, 1].
    dx, dy = ex - sx, ey - sy
    a = dx * dx + dy * dy
    b = 2.0 * (sx * dx + sy * dy)
    c = sx * sx + sy * sy - body_radius * body_radius
    disc = b * b - 4.0 * a * c
    t = (-b - math.sqrt(max(disc, 0.0))) / (2.0 * a)
    t = min(max(t, 0.0), 1.0)
    return Pose2D(start.x + t * (end.x - start.x),
                  start.y + t * (end.y - start.y), end.theta)


class Plant:
    """Simulated robot: true pose, clock, and a seeded random stream."""

    def __init__(self, initial_pose: Pose2D,
                 library: Sequence[MotionPrimitive],
                 noise: Optional[NoiseModel] = None,
                 seed: int = 0,
                 goal: Optional[GoalState] = None,
                 body_radius: float = DEFAULT_BODY_RADIUS_CM):
        self.pose = initial_pose
        self.noise = noise if noise is not None else NoiseModel()
        self.rng = np.random.default_rng(seed)
        self.goal = goal
        self.body_radius = body_radius
        self._by_id = {p.id: p for p in library}
        self._sim_time = 0.0
        self.outcomes: List[ExecutionOutcome] = []

    @property
    def sim_time(self) -> float:
        return self._sim_time

    def observe(self) -> Pose2D:
        """Ground-truth pose; the vision path adds its own noise on top."""
        return self.pose

    # Alias matching the planner's PlantHandle protocol.
    observe_pose = observe

    def execute(self, primitive: MotionPrimitive) -> ExecutionOutcome:
        """Realize one primitive: sample disturbance, move pose, advance clock."""
        if primitive.id not in self._by_id:
            raise KeyError(f"unknown primitive id {primitive.id}")
        noise = self.noise
        magnitude = truncated_normal(
            self.rng, noise.step_mean_cm[primitive.id],
            noise.step_std_cm[primitive.id], 0.0)
        lateral = (float(self.rng.normal(0.0, noise.lateral_std_cm))
                   if noise.lateral_std_cm > 0 else 0.0)
        dtheta = (float(self.rng.normal(0.0, noise.heading_std_rad))
                  if noise.heading_std_rad > 0 else 0.0)
        duration = truncated_normal(
            self.rng, noise.duration_mean_s, noise.duration_std_s, MIN_DURATION_S)

        heading = self.pose.theta + primitive.phi
        ca, sa = math.cos(heading), math.sin(heading)
        dx = magnitude * ca - lateral * sa
        dy = magnitude * sa + lateral * ca

        raw_end = Pose2D(self.pose.x + dx, self.pose.y + dy,
                         wrap_angle(self.pose.theta + dtheta))
        end = raw_end
        if self.goal is not None:
            end = goal_contact_clamp(self.pose, raw_end, self.goal, self.body_radius)
        if end is not raw_end:
            # Contact shortened the motion; report the realized displacement.
            dx, dy = end.x - self.pose.x, end.y - self.pose.y

        outcome = ExecutionOutcome(dx=dx, dy=dy, dtheta=dtheta, duration=duration)
        self.pose = end
        self._sim_time += duration
        self.outcomes.append(outcome)
        return outcome

    def execute_action(self, action_id: int) -> ExecutionOutcome:
        return self.execute(self._by_id[action_id])
