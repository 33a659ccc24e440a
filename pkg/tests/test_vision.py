import math

import numpy as np
import pytest

from pentapod.geometry import Pose2D
from pentapod.vision import (CalibrationSet, CameraModel,
                             DegenerateCalibrationError, MarkerObservation,
                             SimilarityTransform, calibrate, estimate_pose,
                             observe_robot, project)

IDENTITY = SimilarityTransform.identity()


def make_calibration(camera, world_points, rng=None):
    pairs = [(tuple(w), project(w, camera, rng=rng, role=f"floor-{i}"))
             for i, w in enumerate(world_points)]
    return CalibrationSet(pairs)


SQUARE = [(-50, -50), (50, -50), (50, 50), (-50, 50)]


class TestProject:
    def test_identity_camera(self):
        obs = project((3, 4), CameraModel())
        assert (obs.u, obs.v) == (3.0, 4.0)

    def test_hand_evaluated_similarity(self):
        camera = CameraModel(SimilarityTransform(
            scale=2.0, rotation=math.pi / 2, translation=(10.0, 0.0)))
        obs = project((1, 0), camera)
        assert obs.u == pytest.approx(10.0)
        assert obs.v == pytest.approx(2.0)

    def test_deterministic_without_noise(self):
        camera = CameraModel(SimilarityTransform(3.7, 1.2, (55.0, -20.0)))
        a = project((7, -3), camera)
        b = project((7, -3), camera)
        assert (a.u, a.v) == (b.u, b.v)

    def test_noise_requires_rng(self):
        camera = CameraModel(pixel_noise_std=1.0)
        with pytest.raises(ValueError):
            project((0, 0), camera)

    def test_noise_is_applied(self):
        camera = CameraModel(pixel_noise_std=1.0)
        rng = np.random.default_rng(0)
        obs = [project((0, 0), camera, rng=rng) for _ in range(100)]
        us = np.array([o.u for o in obs])
        assert us.std() == pytest.approx(1.0, abs=0.25)


class TestCalibrate:
    def test_identity_roundtrip(self):
        recovered = calibrate(make_calibration(CameraModel(), SQUARE))
        assert recovered.scale == pytest.approx(1.0, abs=1e-9)
        assert recovered.rotation == pytest.approx(0.0, abs=1e-9)
        assert recovered.translation == pytest.approx((0.0, 0.0), abs=1e-9)

    def test_recovers_synthetic_camera(self):
        forward = SimilarityTransform(3.7, 1.2, (55.0, -20.0))
        camera = CameraModel(forward)
        recovered = calibrate(make_calibration(camera, SQUARE))
        expected = forward.inverse()
        assert recovered.scale == pytest.approx(expected.scale, rel=1e-6)
        assert recovered.rotation == pytest.approx(expected.rotation, abs=1e-6)
        assert recovered.translation == pytest.approx(expected.translation, rel=1e-6)

    def test_two_point_minimum(self):
        forward = SimilarityTransform(2.5, -0.4, (12.0, 7.0))
        recovered = calibrate(make_calibration(CameraModel(forward), [(0, 0), (10, 5)]))
        for w in [(3, 3), (-7, 2)]:
            px = forward.apply(w)
            assert recovered.apply(px) == pytest.approx(w, abs=1e-9)

    def test_noisy_markers_residual_under_1cm(self):
        # 1 px noise at 3.7 px/cm over 8 markers: world RMS residual < 1 cm.
        forward = SimilarityTransform(3.7, 1.2, (55.0, -20.0))
        camera = CameraModel(forward, pixel_noise_std=1.0)
        markers = [(60 * math.cos(a), 60 * math.sin(a))
                   for a in np.linspace(0, 2 * math.pi, 8, endpoint=False)]
        rng = np.random.default_rng(17)
        residuals = []
        for _ in range(200):
            recovered = calibrate(make_calibration(camera, markers, rng=rng))
            errs = [np.subtract(recovered.apply(forward.apply(w)), w)
                    for w in markers]
            residuals.append(np.sqrt(np.mean(np.square(errs))))
        assert np.mean(residuals) < 1.0

    def test_degenerate_set_rejected(self):
        obs = MarkerObservation(5.0, 5.0)
        with pytest.raises(DegenerateCalibrationError):
            calibrate(CalibrationSet([((0, 0), obs), ((0, 0), obs), ((0, 0), obs)]))

    def test_too_few_pairs_rejected(self):
        with pytest.raises(ValueError):
            CalibrationSet([((0, 0), MarkerObservation(0, 0))])


class TestEstimatePose:
    def test_axis_aligned_forward(self):
        pose = estimate_pose(MarkerObservation(1, 0, "front"),
                             MarkerObservation(-1, 0, "back"), IDENTITY)
        assert (pose.x, pose.y) == (0.0, 0.0)
        assert pose.theta == 0.0

    def test_axis_aligned_up(self):
        pose = estimate_pose(MarkerObservation(0, 2, "front"),
                             MarkerObservation(0, 0, "back"), IDENTITY)
        assert pose.x == 0.0
        assert pose.y == 1.0
        assert pose.theta == pytest.approx(math.pi / 2)

    def test_coincident_markers_rejected(self):
        with pytest.raises(ValueError):
            estimate_pose(MarkerObservation(1, 1), MarkerObservation(1, 1), IDENTITY)

    def test_rigid_equivariance(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            front = rng.uniform(-50, 50, 2)
            back = front + rng.uniform(-10, 10, 2)
            if np.allclose(front, back):
                continue
            base = estimate_pose(MarkerObservation(*front), MarkerObservation(*back),
                                 IDENTITY)
            alpha = rng.uniform(-math.pi, math.pi)
            t = rng.uniform(-30, 30, 2)
            c, s = math.cos(alpha), math.sin(alpha)
            rot = lambda p: (c * p[0] - s * p[1] + t[0], s * p[0] + c * p[1] + t[1])
            moved = estimate_pose(MarkerObservation(*rot(front)),
                                  MarkerObservation(*rot(back)), IDENTITY)
            expected_xy = rot((base.x, base.y))
            assert moved.x == pytest.approx(expected_xy[0], abs=1e-9)
            assert moved.y == pytest.approx(expected_xy[1], abs=1e-9)
            assert math.remainder(moved.theta - (base.theta + alpha),
                                  2 * math.pi) == pytest.approx(0.0, abs=1e-9)


class TestObserveRobot:
    def test_exact_recovery_with_clean_pipeline(self):
        forward = SimilarityTransform(3.7, 0.9, (100.0, 50.0))
        camera = CameraModel(forward)
        pixel_to_world = forward.inverse()
        truth = Pose2D(12.0, -7.0, 0.8)
        est = observe_robot(truth, camera, pixel_to_world)
        assert est.x == pytest.approx(truth.x, abs=1e-9)
        assert est.y == pytest.approx(truth.y, abs=1e-9)
        assert est.theta == pytest.approx(truth.theta, abs=1e-9)

    def test_error_scales_linearly_with_pixel_noise(self):
        forward = SimilarityTransform(3.7, 0.0, (0.0, 0.0))
        truth = Pose2D(0.0, 0.0, 0.0)
        noise_levels = [0.5, 1.0, 2.0, 4.0]
        mean_errors = []
        for std in noise_levels:
            camera = CameraModel(forward, pixel_noise_std=std)
            rng = np.random.default_rng(99)
            errs = []
            for _ in range(2000):
                est = observe_robot(truth, camera, forward.inverse(), rng=rng)
                errs.append(math.hypot(est.x, est.y))
            mean_errors.append(np.mean(errs))
        slope, intercept = np.polyfit(noise_levels, mean_errors, 1)
        fitted = np.polyval([slope, intercept], noise_levels)
        rel_resid = np.abs(fitted - mean_errors) / np.max(mean_errors)
        assert np.all(rel_resid < 0.05)
        assert slope > 0


class TestSimilarityTransform:
    def test_inverse_composes_to_identity(self):
        t = SimilarityTransform(3.7, 1.2, (55.0, -20.0))
        inv = t.inverse()
        for p in [(0, 0), (10, -4), (-3, 8)]:
            assert inv.apply(t.apply(p)) == pytest.approx(p, abs=1e-9)

    def test_nonpositive_scale_rejected(self):
        with pytest.raises(ValueError):
            SimilarityTransform(0.0, 0.0, (0.0, 0.0))
