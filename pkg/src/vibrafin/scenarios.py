"""Bundled scenarios and scenario file I/O.

Scenario files are JSON with SI units spelled out in the field names.
The six reference scenarios mirror the tank trials the locomotion model
is calibrated against; the interactive server additionally offers
open_water, floating_balls (3x3 grid of discs) and measurement_post.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Mapping

from .errors import ConfigurationError, ValidationError
from .locomotion import Obstacle, Scenario, ScheduleEntry, SimState

__all__ = [
    "REFERENCE_SCENARIOS",
    "SERVER_SCENARIOS",
    "scenario_names",
    "get_scenario",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "save_scenario",
]

REFERENCE_SCENARIOS = (
    "caudal_only",
    "all_fins",
    "left_pectoral_only",
    "right_pectoral_only",
    "caudal_left",
    "caudal_right",
)

SERVER_SCENARIOS = ("open_water", "floating_balls", "measurement_post")


def scenario_names() -> tuple[str, ...]:
    return REFERENCE_SCENARIOS + SERVER_SCENARIOS


def scenario_from_dict(data: Mapping) -> Scenario:
    try:
        schedule = tuple(
            ScheduleEntry(
                t_start=entry["t_start_s"],
                t_end=entry["t_end_s"],
                fins=(
                    bool(entry["fins"]["left"]),
                    bool(entry["fins"]["right"]),
                    bool(entry["fins"]["caudal"]),
                ),
            )
            for entry in data.get("schedule", [])
        )
        obstacles = tuple(
            Obstacle(x=o["x_m"], y=o["y_m"], radius=o["radius_m"])
            for o in data.get("obstacles", [])
        )
        init = data.get("initial", {})
        initial = SimState(
            t=init.get("t_s", 0.0),
            x=init.get("x_m", 0.0),
            y=init.get("y_m", 0.0),
            theta=init.get("theta_rad", 0.0),
            u=init.get("u_mps", 0.0),
            v=init.get("v_mps", 0.0),
            r=init.get("r_radps", 0.0),
        )
        return Scenario(
            duration=data["duration_s"],
            dt=data.get("dt_s", 1.0e-3),
            schedule=schedule,
            obstacles=obstacles,
            initial=initial,
            name=data.get("name", ""),
        )
    except KeyError as exc:
        raise ConfigurationError(f"scenario is missing field {exc.args[0]!r}") from None
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "name": scenario.name,
        "duration_s": scenario.duration,
        "dt_s": scenario.dt,
        "schedule": [
            {
                "t_start_s": e.t_start,
                "t_end_s": e.t_end,
                "fins": {"left": e.fins[0], "right": e.fins[1], "caudal": e.fins[2]},
            }
            for e in scenario.schedule
        ],
        "obstacles": [
            {"x_m": o.x, "y_m": o.y, "radius_m": o.radius} for o in scenario.obstacles
        ],
        "initial": {
            "t_s": scenario.initial.t,
            "x_m": scenario.initial.x,
            "y_m": scenario.initial.y,
            "theta_rad": scenario.initial.theta,
            "u_mps": scenario.initial.u,
            "v_mps": scenario.initial.v,
            "r_radps": scenario.initial.r,
        },
    }


def get_scenario(name: str) -> Scenario:
    """Load a bundled scenario by name."""
    if name not in scenario_names():
        raise ConfigurationError(
            f"unknown scenario {name!r}; bundled: {', '.join(scenario_names())}"
        )
    path = resources.files("vibrafin").joinpath(f"data/scenarios/{name}.json")
    return scenario_from_dict(json.loads(path.read_text()))


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario from a file path, falling back to bundled names."""
    import os

    if os.path.exists(path_or_name):
        with open(path_or_name) as fh:
            return scenario_from_dict(json.load(fh))
    name = os.path.splitext(os.path.basename(str(path_or_name)))[0]
    if name in scenario_names():
        return get_scenario(name)
    raise ConfigurationError(f"scenario file not found: {path_or_name}")


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")
