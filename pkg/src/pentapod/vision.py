"""Emulated marker-based vision feedback.

The overhead camera is modeled as a planar similarity transform (scale,
rotation, translation) from world centimeters to pixels, with optional
isotropic pixel noise. Calibration recovers the inverse transform from
floor-marker correspondences by closed-form least squares; robot pose is
estimated from the front and back body markers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Pose2D, wrap_angle


@dataclass(frozen=True)
class SimilarityTransform:
    """p' = scale * R(rotation) @ p + translation."""

    scale: float
    rotation: float                     # rad
    translation: Tuple[float, float]

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def apply(self, point: Sequence[float]) -> Tuple[float, float]:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        x, y = point
        tx, ty = self.translation
        return (self.scale * (c * x - s * y) + tx,
                self.scale * (s * x + c * y) + ty)

    def inverse(self) -> "SimilarityTransform":
        inv_scale = 1.0 / self.scale
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        tx, ty = self.translation
        return SimilarityTransform(
            scale=inv_scale,
            rotation=wrap_angle(-self.rotation),
            translation=(-inv_scale * (c * tx - s * ty),
                         -inv_scale * (s * tx + c * ty)))

    @staticmethod
    def identity() -> "SimilarityTransform":
        return SimilarityTransform(1.0, 0.0, (0.0, 0.0))


@dataclass
class CameraModel:
    """World-to-pixel similarity plus pixel noise level."""

    transform: SimilarityTransform = field(default_factory=SimilarityTransform.identity)
    pixel_noise_std: float = 0.0

    @property
    def scale(self) -> float:
        return self.transform.scale


@dataclass(frozen=True)
class MarkerObservation:
    """One detected marker in pixel coordinates."""

    u: float
    v: float
    role: str = "floor"   # "front", "back", "goal", or "floor-<i>"

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"marker pixels must be finite, got ({self.u}, {self.v})")


@dataclass
class CalibrationSet:
    """Paired world points (cm) and their pixel observations."""

    pairs: List[Tuple[Tuple[float, float], MarkerObservation]]

    def __post_init__(self):
        if len(self.pairs) < 2:
            raise ValueError("calibration needs at least 2 correspondences")


class DegenerateCalibrationError(ValueError):
    """All calibration points coincide; the transform is unobservable."""


def project(world_point: Sequence[float], camera: CameraModel,
            rng: Optional[np.random.Generator] = None,
            role: str = "floor") -> MarkerObservation:
    """Map a world point through the camera, adding pixel noise if configured."""
    u, v = camera.transform.apply(world_point)
    if camera.pixel_noise_std > 0:
        if rng is None:
            raise ValueError("pixel noise requires an explicit random generator")
        u += rng.normal(0.0, camera.pixel_noise_std)
        v += rng.normal(0.0, camera.pixel_noise_std)
    return MarkerObservation(u=u, v=v, role=role)


def calibrate(correspondences: CalibrationSet) -> SimilarityTransform:
    """Least-squares pixel-to-world similarity from floor markers.

    Closed form: subtract centroids, take the cross-covariance between
    pixel and world coordinates, read the rotation off its polar angle
    and the scale off the variance ratio. Exact recovery when the pixel
    observations are noise-free.
    """
    world = np.array([[w[0], w[1]] for w, _ in correspondences.pairs], dtype=float)
    pixel = np.array([[m.u, m.v] for _, m in correspondences.pairs], dtype=float)

    pixel_c = pixel - pixel.mean(axis=0)
    world_c = world - world.mean(axis=0)
    pixel_var = float(np.sum(pixel_c ** 2))
    if pixel_var == 0.0:
        raise DegenerateCalibrationError("calibration markers coincide in pixel space")

    # Cross-covariance of the centered sets, as the two components of a
    # complex-valued regression coefficient (rotation+scale in one number).
    dot = float(np.sum(pixel_c * world_c))
    cross = float(np.sum(pixel_c[:, 0] * world_c[:, 1] - pixel_c[:, 1] * world_c[:, 0]))
    if dot == 0.0 and cross == 0.0:
        raise DegenerateCalibrationError("world calibration points coincide")

    scale = math.hypot(dot, cross) / pixel_var
    rotation = math.atan2(cross, dot)

    c, s = math.cos(rotation), math.sin(rotation)
    pu, pv = pixel.mean(axis=0)
    wx, wy = world.mean(axis=0)
    tx = wx - scale * (c * pu - s * pv)
    ty = wy - scale * (s * pu + c * pv)
    return SimilarityTransform(scale=scale, rotation=rotation, translation=(tx, ty))


def estimate_pose(front: MarkerObservation, back: MarkerObservation,
                  pixel_to_world: SimilarityTransform) -> Pose2D:
    """Pose from the two body markers: midpoint position, front-back heading."""
    fx, fy = pixel_to_world.apply((front.u, front.v))
    bx, by = pixel_to_world.apply((back.u, back.v))
    dx, dy = fx - bx, fy - by
    if dx == 0.0 and dy == 0.0:
        raise ValueError("front and back markers coincide; heading undefined")
    return Pose2D(x=0.5 * (fx + bx), y=0.5 * (fy + by), theta=math.atan2(dy, dx))


def observe_robot(pose: Pose2D, camera: CameraModel,
                  pixel_to_world: SimilarityTransform,
                  marker_offset_cm: float = 5.0,
                  rng: Optional[np.random.Generator] = None) -> Pose2D:
    """Full feedback path: body markers -> camera -> pose estimate.

    The front and back markers sit ``marker_offset_cm`` ahead of and
    behind the body center along the heading.
    """
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    front_w = (pose.x + marker_offset_cm * c, pose.y + marker_offset_cm * s)
    back_w = (pose.x - marker_offset_cm * c, pose.y - marker_offset_cm * s)
    front = project(front_w, camera, rng=rng, role="front")
    back = project(back_w, camera, rng=rng, role="back")
    return estimate_pose(front, back, pixel_to_world)
