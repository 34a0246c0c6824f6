"""Locomotion gallery: the six reference maneuvers, simulated end to end.

Each scenario activates a fixed fin subset from rest; the summary lines
mirror how the tank trials were scored (steady speed, yaw rate, turning
radius).  Trajectory CSVs land next to this script.
"""

import math
import pathlib

from vibrafin.config import calibrated_config
from vibrafin.locomotion import simulate, summarize, trajectory_to_csv
from vibrafin.scenarios import REFERENCE_SCENARIOS, get_scenario

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

cfg = calibrated_config()
bl = cfg.body.body_length

print(f"three-fin fish, BL = {bl * 1e3:.0f} mm, mass = {cfg.body.mass * 1e3:.0f} g\n")
for name in REFERENCE_SCENARIOS:
    scenario = get_scenario(name)
    traj = simulate(scenario, cfg.body, decimation=20)
    s = summarize(traj)
    radius = ("straight" if math.isinf(s.turning_radius)
              else f"R = {s.turning_radius * 100:5.1f} cm "
                   f"({s.turning_radius / bl:4.2f} BL)")
    turn = ""
    if abs(s.steady_yaw_rate) > 1e-3:
        turn = "right turn, " if s.steady_yaw_rate < 0 else "left turn, "
    print(f"{name:22s} speed {s.steady_speed * 100:5.2f} cm/s "
          f"({s.steady_speed / bl:4.2f} BL/s), "
          f"{turn}|yaw| {abs(s.steady_yaw_rate):4.2f} rad/s, {radius}")
    (OUT / f"{name}.csv").write_text(trajectory_to_csv(traj))

print(f"\ntrajectory CSVs written to {OUT}/")
print("to steer the fish yourself: `vibrafin serve` plus the browser UI in frontend/")
