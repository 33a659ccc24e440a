"""Reproducible closed-loop experiments: configs, scenarios, logs, plots.

Three scenarios are supported:

* ``stationary`` -- seek a fixed goal point.
* ``floating`` -- seek a goal moving along a timed piecewise-linear
  waypoint path, exercising the per-step re-planning.
* ``characterize`` -- execute each primitive repeatedly and tabulate the
  realized displacement magnitudes.

Every run is fully determined by (config, seed): the CSV log is
byte-identical across repeats. Exit codes: 0 converged, 2 did not
converge within the step cap, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import GoalState, Pose2D
from .planner import PlannerConfig, run_policy
from .plant import (DEFAULT_BODY_RADIUS_CM, NoiseModel, Plant,
                    truncated_normal_mean)
from .primitives import (DEFAULT_SAFETY_TIMEOUT_S, GaitTiming,
                         build_default_library, validate_schedule)
from .protocol import CentralEndpoint, OnboardState, SerialLink
from .vision import (CameraModel, SimilarityTransform, CalibrationSet,
                     calibrate, observe_robot, project)

CSV_HEADER = "step,t_sim_s,x_cm,y_cm,theta_rad,goal_x_cm,goal_y_cm,action_id,cost_cm"

EXIT_CONVERGED = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

DEFAULT_FLOOR_MARKERS_CM = ((-50.0, -50.0), (50.0, -50.0), (50.0, 50.0), (-50.0, 50.0))


@dataclass
class CameraConfig:
    scale_px_per_cm: float = 3.7
    rotation_deg: float = 0.0
    translation_px: Tuple[float, float] = (320.0, 240.0)
    pixel_noise_std: float = 0.0
    floor_markers_cm: Sequence[Tuple[float, float]] = DEFAULT_FLOOR_MARKERS_CM

    def build(self) -> CameraModel:
        return CameraModel(
            transform=SimilarityTransform(
                scale=self.scale_px_per_cm,
                rotation=math.radians(self.rotation_deg),
                translation=tuple(self.translation_px)),
            pixel_noise_std=self.pixel_noise_std)


@dataclass
class ExperimentConfig:
    scenario: str = "stationary"   # stationary | floating | characterize
    seed: int = 0
    initial_pose: Tuple[float, float, float] = (0.0, 0.0, 0.0)  # x cm, y cm, theta deg
    goal_cm: Tuple[float, float] = (40.0, 0.0)
    # Floating scenario: list of (time s, x cm, y cm) waypoints.
    goal_path: Sequence[Tuple[float, float, float]] = ()
    tolerance_cm: float = 12.0
    max_steps: int = 200
    body_radius_cm: float = DEFAULT_BODY_RADIUS_CM
    goal_contact: bool = True
    noise: NoiseModel = field(default_factory=NoiseModel)
    gait_timing: GaitTiming = field(default_factory=GaitTiming)
    camera: CameraConfig = field(default_factory=CameraConfig)
    safety_timeout_s: float = DEFAULT_SAFETY_TIMEOUT_S
    characterize_samples: int = 500
    out_dir: str = "out"
    plot: bool = False

    def initial_pose2d(self) -> Pose2D:
        x, y, theta_deg = self.initial_pose
        return Pose2D(x, y, math.radians(theta_deg))

    @staticmethod
    def from_dict(raw: Dict) -> "ExperimentConfig":
        raw = dict(raw)
        if "noise" in raw:
            raw["noise"] = NoiseModel(**raw["noise"])
        if "gait_timing" in raw:
            raw["gait_timing"] = GaitTiming(**raw["gait_timing"])
        if "camera" in raw:
            raw["camera"] = CameraConfig(**raw["camera"])
        known = set(ExperimentConfig.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return ExperimentConfig(**raw)

    @staticmethod
    def from_file(path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return ExperimentConfig.from_dict(json.load(fh))


@dataclass(frozen=True)
class ExperimentLogRow:
    step: int
    t_sim: float
    x: float
    y: float
    theta: float
    goal_x: float
    goal_y: float
    action_id: int
    cost: float


@dataclass
class ExperimentResult:
    rows: List[ExperimentLogRow]
    converged: bool
    summary: Dict


def make_goal_provider(config: ExperimentConfig):
    """Fixed-point or piecewise-linear timed waypoint goal source."""
    if config.scenario == "floating" and config.goal_path:
        path = sorted((float(t), float(x), float(y)) for t, x, y in config.goal_path)

        def provider(t: float) -> GoalState:
            if t <= path[0][0]:
                return GoalState(path[0][1], path[0][2])
            for (t0, x0, y0), (t1, x1, y1) in zip(path, path[1:]):
                if t <= t1:
                    frac = (t - t0) / (t1 - t0) if t1 > t0 else 1.0
                    return GoalState(x0 + frac * (x1 - x0), y0 + frac * (y1 - y0))
            return GoalState(path[-1][1], path[-1][2])

        return provider

    goal = GoalState(*config.goal_cm)
    return lambda t: goal


class _VisionPlant:
    """Plant wrapper whose observations go through the emulated camera."""

    def __init__(self, plant: Plant, camera: CameraModel,
                 pixel_to_world: SimilarityTransform,
                 central: CentralEndpoint, library,
                 rng: np.random.Generator):
        self.plant = plant
        self.camera = camera
        self.pixel_to_world = pixel_to_world
        self.central = central
        self._by_id = {p.id: p for p in library}
        self.rng = rng

    @property
    def sim_time(self) -> float:
        return self.plant.sim_time

    def observe(self) -> Pose2D:
        return observe_robot(self.plant.pose, self.camera, self.pixel_to_world,
                             rng=self.rng)

    def execute_action(self, action_id: int) -> None:
        # Drive the actuator protocol for the chosen gait, then realize
        # the displacement on the kinematic plant.
        primitive = self._by_id[action_id]
        start = self.central.onboard.clock
        self.central.play_schedule(primitive.schedule, start)
        self.plant.execute(primitive)


def calibrate_from_floor_markers(config: ExperimentConfig,
                                 camera: CameraModel,
                                 rng: np.random.Generator) -> SimilarityTransform:
    pairs = [
        (tuple(w), project(w, camera, rng=rng, role=f"floor-{i}"))
        for i, w in enumerate(config.camera.floor_markers_cm)
    ]
    return calibrate(CalibrationSet(pairs))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute one full closed-loop experiment per the config."""
    if config.scenario == "characterize":
        return _run_characterization(config)
    if config.scenario not in ("stationary", "floating"):
        raise ValueError(f"unknown scenario {config.scenario!r}")

    rng = np.random.default_rng(config.seed + 1)  # vision stream, distinct from plant's
    library = build_default_library(timing=config.gait_timing)
    for prim in library:
        report = validate_schedule(prim.schedule, config.safety_timeout_s)
        if not report.valid:
            raise ValueError(f"primitive {prim.id} schedule unsafe: {report.violations}")

    goal_provider = make_goal_provider(config)
    contact_goal = goal_provider(0.0) if (config.goal_contact
                                          and config.scenario == "stationary") else None
    plant = Plant(config.initial_pose2d(), library, noise=config.noise,
                  seed=config.seed, goal=contact_goal,
                  body_radius=config.body_radius_cm)

    camera = config.camera.build()
    pixel_to_world = calibrate_from_floor_markers(config, camera, rng)
    onboard = OnboardState(safety_timeout=config.safety_timeout_s)
    central = CentralEndpoint(onboard, SerialLink(keep_transcript=True))
    vision_plant = _VisionPlant(plant, camera, pixel_to_world, central, library, rng)

    planner_config = PlannerConfig(tolerance_d=config.tolerance_cm,
                                   max_steps=config.max_steps, library=library)
    result = run_policy(vision_plant, goal_provider, planner_config)

    rows = [
        ExperimentLogRow(
            step=r.step, t_sim=r.t_sim,
            x=r.pose_before.x, y=r.pose_before.y, theta=r.pose_before.theta,
            goal_x=r.goal.x_bar, goal_y=r.goal.y_bar,
            action_id=r.action_id, cost=r.cost_before)
        for r in result.records
    ]

    distances = [math.hypot(o.dx, o.dy) for o in plant.outcomes]
    durations = [o.duration for o in plant.outcomes]
    summary = {
        "scenario": config.scenario,
        "seed": config.seed,
        "converged": result.converged,
        "steps": len(result.records),
        "t_sim_s": result.t_sim,
        "final_cost_cm": result.final_cost,
        "mean_step_distance_cm": float(np.mean(distances)) if distances else 0.0,
        "mean_step_duration_s": float(np.mean(durations)) if durations else 0.0,
    }
    return ExperimentResult(rows=rows, converged=result.converged, summary=summary)


def _run_characterization(config: ExperimentConfig) -> ExperimentResult:
    """Execute each primitive many times; tabulate realized displacements."""
    library = build_default_library(timing=config.gait_timing)
    rows: List[ExperimentLogRow] = []
    per_primitive = {}
    step = 0
    for prim in library:
        plant = Plant(Pose2D(0.0, 0.0, 0.0), library, noise=config.noise,
                      seed=config.seed + prim.id)
        magnitudes = []
        for _ in range(config.characterize_samples):
            pose_before = plant.pose
            outcome = plant.execute(prim)
            # Net displacement in the direction of the leading limb, which
            # excludes the independent lateral disturbance.
            heading = pose_before.theta + prim.phi
            magnitudes.append(outcome.dx * math.cos(heading)
                              + outcome.dy * math.sin(heading))
            rows.append(ExperimentLogRow(
                step=step, t_sim=plant.sim_time,
                x=pose_before.x, y=pose_before.y, theta=pose_before.theta,
                goal_x=0.0, goal_y=0.0, action_id=prim.id,
                cost=math.hypot(pose_before.x, pose_before.y)))
            step += 1
        mags = np.asarray(magnitudes)
        per_primitive[prim.id] = {
            "mean_cm": float(mags.mean()),
            "std_cm": float(mags.std(ddof=1)),
            "stderr_cm": float(mags.std(ddof=1) / math.sqrt(len(mags))),
            "expected_mean_cm": truncated_normal_mean(
                config.noise.step_mean_cm[prim.id],
                config.noise.step_std_cm[prim.id]),
            "samples": len(mags),
        }
    summary = {
        "scenario": "characterize",
        "seed": config.seed,
        "converged": True,
        "per_primitive": per_primitive,
    }
    return ExperimentResult(rows=rows, converged=True, summary=summary)


def write_csv(rows: Sequence[ExperimentLogRow], path: str) -> None:
    """Write the experiment log with the exact canonical header."""
    try:
        with open(path, "w", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            for r in rows:
                writer.writerow([r.step, repr(r.t_sim), repr(r.x), repr(r.y),
                                 repr(r.theta), repr(r.goal_x), repr(r.goal_y),
                                 r.action_id, repr(r.cost)])
    except OSError as exc:
        raise OSError(f"cannot write CSV log to {path!r}: {exc}") from exc


def read_csv(path: str) -> List[ExperimentLogRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if ",".join(header) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path!r}: {header}")
        return [
            ExperimentLogRow(step=int(r[0]), t_sim=float(r[1]), x=float(r[2]),
                             y=float(r[3]), theta=float(r[4]), goal_x=float(r[5]),
                             goal_y=float(r[6]), action_id=int(r[7]), cost=float(r[8]))
            for r in reader
        ]


def render_plot(rows: Sequence[ExperimentLogRow], path: str) -> None:
    """Trajectory with goal plus cost-vs-step curve, as a vector file."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_traj, ax_cost) = plt.subplots(1, 2, figsize=(10, 4.5))
    if rows:
        xs = [r.x for r in rows]
        ys = [r.y for r in rows]
        ax_traj.plot(xs, ys, "o-", ms=3, label="robot")
        ax_traj.plot([r.goal_x for r in rows], [r.goal_y for r in rows],
                     "r*", ms=10, label="goal")
        ax_cost.plot([r.step for r in rows], [r.cost for r in rows], "o-", ms=3)
        ax_traj.legend(loc="best")
    ax_traj.set_xlabel("x (cm)")
    ax_traj.set_ylabel("y (cm)")
    ax_traj.set_aspect("equal", adjustable="datalim")
    ax_cost.set_xlabel("step")
    ax_cost.set_ylabel("distance to goal (cm)")
    fig.tight_layout()
    try:
        fig.savefig(path)
    except OSError as exc:
        raise OSError(f"cannot write plot to {path!r}: {exc}") from exc
    finally:
        plt.close(fig)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pentapod-experiment",
        description="Run a closed-loop locomotion experiment.")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="override random seed")
    parser.add_argument("--scenario", choices=["stationary", "floating", "characterize"],
                        help="override scenario")
    parser.add_argument("--out-dir", help="override output directory")
    parser.add_argument("--max-steps", type=int, help="override planner step cap")
    parser.add_argument("--plot", action="store_true", help="also write a trajectory plot")
    args = parser.parse_args(argv)

    try:
        config = (ExperimentConfig.from_file(args.config) if args.config
                  else ExperimentConfig())
        if args.seed is not None:
            config.seed = args.seed
        if args.scenario is not None:
            config.scenario = args.scenario
        if args.out_dir is not None:
            config.out_dir = args.out_dir
        if args.max_steps is not None:
            config.max_steps = args.max_steps
        if args.plot:
            config.plot = True

        result = run_experiment(config)

        os.makedirs(config.out_dir, exist_ok=True)
        csv_path = os.path.join(config.out_dir, f"{config.scenario}_log.csv")
        write_csv(result.rows, csv_path)
        summary_path = os.path.join(config.out_dir, f"{config.scenario}_summary.json")
        with open(summary_path, "w") as fh:
            json.dump(result.summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if config.plot:
            render_plot(result.rows, os.path.join(config.out_dir,
                                                  f"{config.scenario}_plot.svg"))
        print(json.dumps(result.summary, indent=2, sort_keys=True))
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    return EXIT_CONVERGED if result.converged else EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
