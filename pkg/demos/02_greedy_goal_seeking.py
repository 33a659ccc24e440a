"""Stationary-goal run: the robot crawls 40 cm to a fixed target.

Runs the full closed loop (emulated vision -> greedy policy -> actuator
protocol -> stochastic plant) and prints the per-step log. Outputs land
in demos/out/.
"""

import os

from pentapod.experiment import (ExperimentConfig, render_plot,
                                 run_experiment, write_csv)

config = ExperimentConfig(scenario="stationary", seed=7,
                          goal_cm=(40.0, 0.0), tolerance_cm=12.0)
result = run_experiment(config)

print(f"{'step':>4} {'t_sim':>7} {'x':>7} {'y':>7} {'action':>6} {'cost':>7}")
for row in result.rows:
    print(f"{row.step:>4} {row.t_sim:>7.2f} {row.x:>7.2f} {row.y:>7.2f} "
          f"{row.action_id:>6} {row.cost:>7.2f}")

print(f"\nconverged: {result.converged}")
print(f"steps: {result.summary['steps']}, "
      f"simulated time: {result.summary['t_sim_s']:.1f} s, "
      f"final distance to goal: {result.summary['final_cost_cm']:.2f} cm")
print(f"mean step: {result.summary['mean_step_distance_cm']:.2f} cm over "
      f"{result.summary['mean_step_duration_s']:.2f} s")

out_dir = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out_dir, exist_ok=True)
write_csv(result.rows, os.path.join(out_dir, "stationary_log.csv"))
render_plot(result.rows, os.path.join(out_dir, "stationary_plot.svg"))
print(f"\nlog and plot written to {out_dir}/")
