"""Greedy single-step goal-seeking policy over the motion primitive library.

Each iteration re-reads the robot pose, predicts the next state for every
primitive with the nominal transition model, and executes the action whose
predicted state is closest to the goal. The loop stops when the distance
to goal drops below the tolerance or a step cap is hit. A single-step
horizon is deliberate: model mismatch would compound over a longer one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Protocol, Sequence

from .geometry import GoalState, Pose2D, cost, predict_next_state
from .primitives import MotionPrimitive, build_default_library

DEFAULT_TOLERANCE_CM = 12.0
DEFAULT_MAX_STEPS = 200


class PlantHandle(Protocol):
    """What the policy needs from the thing it commands."""

    def observe(self) -> Pose2D: ...
    def execute_action(self, action_id: int) -> None: ...
    @property
    def sim_time(self) -> float: ...


GoalProvider = Callable[[float], GoalState]


@dataclass
class PlannerConfig:
    tolerance_d: float = DEFAULT_TOLERANCE_CM   # cm
    max_steps: int = DEFAULT_MAX_STEPS
    library: List[MotionPrimitive] = field(default_factory=build_default_library)

    def __post_init__(self):
        if not self.tolerance_d > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance_d}")
        if not self.max_steps > 0:
            raise ValueError(f"max_steps must be positive, got {self.max_steps}")
        if not self.library:
            raise ValueError("primitive library must be nonempty")


@dataclass(frozen=True)
class PolicyStepRecord:
    """One closed-loop iteration: what was seen, chosen, and observed."""

    step: int
    t_sim: float
    pose_before: Pose2D
    goal: GoalState
    action_id: int
    predicted_pose: Pose2D
    observed_pose: Pose2D
    cost_before: float
    cost_after: float


@dataclass
class PolicyResult:
    records: List[PolicyStepRecord]
    converged: bool
    final_pose: Pose2D
    final_cost: float
    t_sim: float


class PlantObservationError(RuntimeError):
    """The plant failed to deliver a pose observation."""


def select_action(pose: Pose2D, goal: GoalState,
                  library: Sequence[MotionPrimitive]) -> int:
    """Id of the primitive minimizing predicted distance to goal.

    Ties break toward the lowest id.
    """
    if not library:
        raise ValueError("primitive library must be nonempty")
    best_id, best_cost = -1, float("inf")
    for prim in library:
        c = cost(predict_next_state(pose, prim), goal)
        if c < best_cost:
            best_id, best_cost = prim.id, c
    return best_id


def run_policy(plant: PlantHandle, goal_provider: GoalProvider,
               config: PlannerConfig) -> PolicyResult:
    """Run the observe-decide-act loop until convergence or the step cap."""
    by_id = {p.id: p for p in config.library}
    records: List[PolicyStepRecord] = []

    for step in range(config.max_steps):
        t = plant.sim_time
        goal = goal_provider(t)
        try:
            pose = plant.observe()
        except Exception as exc:
            raise PlantObservationError(
                f"pose observation failed at step {step}: {exc}") from exc

        c_before = cost(pose, goal)
        if c_before <= config.tolerance_d:
            return PolicyResult(records, True, pose, c_before, t)

        action_id = select_action(pose, goal, config.library)
        predicted = predict_next_state(pose, by_id[action_id])
        plant.execute_action(action_id)
        observed = plant.observe()

        records.append(PolicyStepRecord(
            step=step, t_sim=t, pose_before=pose, goal=goal,
            action_id=action_id, predicted_pose=predicted,
            observed_pose=observed, cost_before=c_before,
            cost_after=cost(observed, goal)))

    t = plant.sim_time
    goal = goal_provider(t)
    pose = plant.observe()
    final_cost = cost(pose, goal)
    return PolicyResult(records, final_cost <= config.tolerance_d, pose, final_cost, t)
