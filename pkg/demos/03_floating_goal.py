"""Floating-goal run: the target drifts while the robot chases it.

The goal follows a timed piecewise-linear waypoint path slower than the
robot's ~1 cm/s, so the closed-loop re-planning catches it.
"""

from pentapod.experiment import ExperimentConfig, run_experiment

config = ExperimentConfig(
    scenario="floating",
    seed=3,
    initial_pose=(0.0, 0.0, 0.0),
    goal_path=[
        (0.0, 30.0, 0.0),      # starts 30 cm ahead
        (40.0, 40.0, 15.0),    # drifts away and sideways
        (120.0, 45.0, 25.0),
    ],
)
result = run_experiment(config)

for row in result.rows:
    print(f"step {row.step:3d}  robot ({row.x:6.1f}, {row.y:6.1f})  "
          f"goal ({row.goal_x:6.1f}, {row.goal_y:6.1f})  "
          f"action {row.action_id}  cost {row.cost:6.2f} cm")

print(f"\nconverged: {result.converged} after {result.summary['steps']} steps "
      f"({result.summary['t_sim_s']:.1f} s simulated)")
