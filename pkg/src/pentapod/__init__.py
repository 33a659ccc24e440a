"""Closed-loop locomotion planning testbed for a five-limbed soft crawler.

Subsystems: planar kinematic model (:mod:`pentapod.geometry`), motion
primitive library (:mod:`pentapod.primitives`), greedy goal-seeking
policy (:mod:`pentapod.planner`), stochastic plant simulator
(:mod:`pentapod.plant`), emulated marker vision (:mod:`pentapod.vision`),
actuator command protocol (:mod:`pentapod.protocol`), and the experiment
harness (:mod:`pentapod.experiment`).
"""

from .geometry import (DisplacementPrediction, GoalState, Pose2D, cost,
                       predict_displacement, predict_next_state, wrap_angle)
from .planner import (PlannerConfig, PolicyResult, PolicyStepRecord,
                      run_policy, select_action)
from .plant import (ExecutionOutcome, NoiseModel, Plant, goal_contact_clamp,
                    truncated_normal_mean)
from .primitives import (ActuatorFrame, GaitSchedule, GaitTiming, LimbMap,
                         MotionPrimitive, build_default_library, gait_for,
                         validate_schedule)
from .experiment import ExperimentConfig, run_experiment, write_csv

__all__ = [
    "ActuatorFrame", "DisplacementPrediction", "ExecutionOutcome",
    "ExperimentConfig", "GaitSchedule", "GaitTiming", "GoalState", "LimbMap",
    "MotionPrimitive", "NoiseModel", "Plant", "PlannerConfig", "PolicyResult",
    "PolicyStepRecord", "Pose2D", "build_default_library", "cost",
    "gait_for", "goal_contact_clamp", "predict_displacement",
    "predict_next_state", "run_experiment", "run_policy", "select_action",
    "truncated_normal_mean", "validate_schedule", "wrap_angle", "write_csv",
]
