"""Toolkit configuration: defaults, JSON files and calibrated parameters.

Config files are JSON with units spelled out in the field names
(rod_length_mm, thickness_um, ...); everything is converted to SI on load.
Fields whose defaults were never measured are listed under "uncalibrated"
so downstream reports can flag them.  Calibrated parameter sets are stored
in a separate versioned file and applied on top of a config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from typing import Mapping

from .erm_motor import MotorSpec
from .errors import ConfigurationError, ValidationError
from .locomotion import FinMount, FishBody
from .structural_modal import (
    FlexibleFinGeometry,
    FluidProperties,
    ModelConfig,
    RigidPartGeometry,
)
from .thrust_model import StreamingCoefficients

__all__ = [
    "ToolkitConfig",
    "default_config",
    "load_config",
    "save_config",
    "config_to_dict",
    "config_from_dict",
    "apply_parameters",
    "load_parameters",
    "save_parameters",
    "bundled_parameters",
    "PARAMETER_NAMES",
]

# defaults the measurements never pin down; kept visible in config files
UNCALIBRATED_DEFAULTS = (
    "motor.eccentric_mass_g",
    "motor.eccentricity_mm",
    "rigid.rod_elastic_modulus_gpa",
    "rigid.rigid_part_mass_g",
    "fin.clamped_width_mm",
    "model.rod_density_kg_m3",
    "model.damping_ratio_x",
    "model.damping_ratio_y",
    "model.fin_damping_ratio",
)

# parameter names understood by apply_parameters (calibration output)
PARAMETER_NAMES = (
    "joint_stiffness_per_area",
    "added_mass_coefficient",
    "velocity_scale",
    "thrust_coefficient",
    "thrust_left",
    "thrust_right",
    "thrust_caudal",
    "drag_area_surge",
    "drag_area_sway",
    "yaw_drag",
    "yaw_drag_crossflow",
    "caudal_offset_y",
    "added_mass_surge",
    "added_mass_sway",
)


@dataclass(frozen=True)
class ToolkitConfig:
    motor: MotorSpec
    rigid: RigidPartGeometry
    fin: FlexibleFinGeometry
    fluid: FluidProperties
    model: ModelConfig
    coefficients: StreamingCoefficients
    body: FishBody
    uncalibrated: tuple[str, ...] = UNCALIBRATED_DEFAULTS


def _default_fins() -> tuple[FinMount, ...]:
    from .locomotion import standard_fins

    return standard_fins(thrust_left=1.8e-3, thrust_right=2.0e-3, thrust_caudal=4.0e-3)


def default_config() -> ToolkitConfig:
    """The shipped default configuration (pre-calibration seed values)."""
    return ToolkitConfig(
        motor=MotorSpec(
            eccentric_mass=0.9e-3,
            eccentricity=0.5e-3,
            voltage_freq_points=((3.0, 138.0), (4.0, 144.0)),
            rated_voltage=3.0,
            voltage_range=(3.0, 4.0),
        ),
        rigid=RigidPartGeometry(),
        fin=FlexibleFinGeometry(),
        fluid=FluidProperties(),
        model=ModelConfig(),
        coefficients=StreamingCoefficients(),
        body=FishBody(fins=_default_fins()),
    )


def config_to_dict(config: ToolkitConfig) -> dict:
    m, r, f, fl = config.motor, config.rigid, config.fin, config.fluid
    mo, co, b = config.model, config.coefficients, config.body
    return {
        "motor": {
            "eccentric_mass_g": m.eccentric_mass * 1e3,
            "eccentricity_mm": m.eccentricity * 1e3,
            "voltage_freq_points": [list(p) for p in m.voltage_freq_points],
            "rated_voltage_v": m.rated_voltage,
            "voltage_range_v": list(m.voltage_range),
        },
        "rigid": {
            "rod_length_mm": r.rod_length * 1e3,
            "rod_height_mm": r.rod_height * 1e3,
            "rod_width_mm": r.rod_width * 1e3,
            "housing_length_mm": r.housing_length * 1e3,
            "cap_length_mm": r.cap_length * 1e3,
            "housing_diameter_mm": r.housing_diameter * 1e3,
            "rod_elastic_modulus_gpa": r.rod_elastic_modulus * 1e-9,
            "rigid_part_mass_g": r.rigid_part_mass * 1e3,
            "joint_stiffness_per_area_pa_per_m": r.joint_stiffness_per_area,
        },
        "fin": {
            "fin_length_mm": f.fin_length * 1e3,
            "thickness_um": f.thickness * 1e6,
            "clamped_width_mm": f.clamped_width * 1e3,
            "elastic_modulus_gpa": f.elastic_modulus * 1e-9,
            "material_density_kg_m3": f.material_density,
            "poisson_ratio": f.poisson_ratio,
        },
        "fluid": {
            "density_kg_m3": fl.density,
            "dynamic_viscosity_pa_s": fl.dynamic_viscosity,
        },
        "model": {
            "rod_density_kg_m3": mo.rod_density,
            "rod_mass_participation": mo.rod_mass_participation,
            "fin_modal_mass_fraction": mo.fin_modal_mass_fraction,
            "added_mass_coefficient": mo.added_mass_coefficient,
            "damping_ratio_x": mo.damping_ratio_x,
            "damping_ratio_y": mo.damping_ratio_y,
            "fin_damping_ratio": mo.fin_damping_ratio,
        },
        "coefficients": {
            "velocity_scale_m2": co.velocity_scale,
            "thrust_coefficient": co.thrust_coefficient,
        },
        "body": {
            "mass_g": b.mass * 1e3,
            "body_length_mm": b.body_length * 1e3,
            "added_mass_surge_g": b.added_mass_surge * 1e3,
            "added_mass_sway_g": b.added_mass_sway * 1e3,
            "yaw_inertia_kg_m2": b.yaw_inertia,
            "added_yaw_inertia_kg_m2": b.added_yaw_inertia,
            "drag_area_surge_m2": b.drag_area_surge,
            "drag_area_sway_m2": b.drag_area_sway,
            "yaw_drag_nm_s2": b.yaw_drag,
            "yaw_drag_crossflow_nm_s3_per_m2": b.yaw_drag_crossflow,
            "fluid_density_kg_m3": b.fluid_density,
            "fins": [
                {
                    "role": fin.role,
                    "x_mm": fin.position[0] * 1e3,
                    "y_mm": fin.position[1] * 1e3,
                    "direction_rad": fin.thrust_direction,
                    "thrust_mn": fin.thrust_magnitude * 1e3,
                }
                for fin in b.fins
            ],
        },
        "uncalibrated": list(config.uncalibrated),
    }


def config_from_dict(data: Mapping) -> ToolkitConfig:
    try:
        m = data["motor"]
        motor = MotorSpec(
            eccentric_mass=m["eccentric_mass_g"] * 1e-3,
            eccentricity=m["eccentricity_mm"] * 1e-3,
            voltage_freq_points=tuple(tuple(p) for p in m["voltage_freq_points"]),
            rated_voltage=m["rated_voltage_v"],
            voltage_range=tuple(m["voltage_range_v"]),
        )
        r = data["rigid"]
        rigid = RigidPartGeometry(
            rod_length=r["rod_length_mm"] * 1e-3,
            rod_height=r["rod_height_mm"] * 1e-3,
            rod_width=r["rod_width_mm"] * 1e-3,
            housing_length=r["housing_length_mm"] * 1e-3,
            cap_length=r["cap_length_mm"] * 1e-3,
            housing_diameter=r["housing_diameter_mm"] * 1e-3,
            rod_elastic_modulus=r["rod_elastic_modulus_gpa"] * 1e9,
            rigid_part_mass=r["rigid_part_mass_g"] * 1e-3,
            joint_stiffness_per_area=r["joint_stiffness_per_area_pa_per_m"],
        )
        f = data["fin"]
        fin = FlexibleFinGeometry(
            fin_length=f["fin_length_mm"] * 1e-3,
            thickness=f["thickness_um"] * 1e-6,
            clamped_width=f["clamped_width_mm"] * 1e-3,
            elastic_modulus=f["elastic_modulus_gpa"] * 1e9,
            material_density=f["material_density_kg_m3"],
            poisson_ratio=f["poisson_ratio"],
        )
        fl = data["fluid"]
        fluid = FluidProperties(
            density=fl["density_kg_m3"],
            dynamic_viscosity=fl["dynamic_viscosity_pa_s"],
        )
        mo = data["model"]
        model = ModelConfig(
            rod_density=mo["rod_density_kg_m3"],
            rod_mass_participation=mo["rod_mass_participation"],
            fin_modal_mass_fraction=mo["fin_modal_mass_fraction"],
            added_mass_coefficient=mo["added_mass_coefficient"],
            damping_ratio_x=mo["damping_ratio_x"],
            damping_ratio_y=mo["damping_ratio_y"],
            fin_damping_ratio=mo["fin_damping_ratio"],
        )
        co = data["coefficients"]
        coeffs = StreamingCoefficients(
            velocity_scale=co["velocity_scale_m2"],
            thrust_coefficient=co["thrust_coefficient"],
        )
        b = data["body"]
        fins = tuple(
            FinMount(
                role=fd["role"],
                position=(fd["x_mm"] * 1e-3, fd["y_mm"] * 1e-3),
                thrust_direction=fd["direction_rad"],
                thrust_magnitude=fd["thrust_mn"] * 1e-3,
            )
            for fd in b["fins"]
        )
        body = FishBody(
            fins=fins,
            mass=b["mass_g"] * 1e-3,
            body_length=b["body_length_mm"] * 1e-3,
            added_mass_surge=b["added_mass_surge_g"] * 1e-3,
            added_mass_sway=b["added_mass_sway_g"] * 1e-3,
            yaw_inertia=b["yaw_inertia_kg_m2"],
            added_yaw_inertia=b["added_yaw_inertia_kg_m2"],
            drag_area_surge=b["drag_area_surge_m2"],
            drag_area_sway=b["drag_area_sway_m2"],
            yaw_drag=b["yaw_drag_nm_s2"],
            yaw_drag_crossflow=b.get("yaw_drag_crossflow_nm_s3_per_m2", 0.0),
            fluid_density=b.get("fluid_density_kg_m3", 1000.0),
        )
    except KeyError as exc:
        raise ConfigurationError(f"config is missing field {exc.args[0]!r}") from None
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc
    return ToolkitConfig(
        motor=motor, rigid=rigid, fin=fin, fluid=fluid, model=model,
        coefficients=coeffs, body=body,
        uncalibrated=tuple(data.get("uncalibrated", UNCALIBRATED_DEFAULTS)),
    )


def load_config(path) -> ToolkitConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def save_config(config: ToolkitConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(config_to_dict(config), fh, indent=2)
        fh.write("\n")


def _replace_fin(fins, role, **changes):
    out = []
    for fin in fins:
        if fin.role == role:
            pos = changes.pop("position", fin.position)
            fin = FinMount(
                role=fin.role,
                position=pos,
                thrust_direction=changes.pop("thrust_direction", fin.thrust_direction),
                thrust_magnitude=changes.pop("thrust_magnitude", fin.thrust_magnitude),
            )
        out.append(fin)
    return tuple(out)


def apply_parameters(config: ToolkitConfig, params: Mapping[str, float]) -> ToolkitConfig:
    """Return a new config with calibrated parameter values applied."""
    unknown = set(params) - set(PARAMETER_NAMES)
    if unknown:
        raise ConfigurationError(f"unknown calibration parameters: {sorted(unknown)}")
    rigid, model, coeffs, body = config.rigid, config.model, config.coefficients, config.body
    if "joint_stiffness_per_area" in params:
        rigid = replace(rigid, joint_stiffness_per_area=params["joint_stiffness_per_area"])
    if "added_mass_coefficient" in params:
        model = replace(model, added_mass_coefficient=params["added_mass_coefficient"])
    if "velocity_scale" in params:
        coeffs = replace(coeffs, velocity_scale=params["velocity_scale"])
    if "thrust_coefficient" in params:
        coeffs = replace(coeffs, thrust_coefficient=params["thrust_coefficient"])

    fins = body.fins
    if "thrust_left" in params:
        fins = _replace_fin(fins, "left_pectoral", thrust_magnitude=params["thrust_left"])
    if "thrust_right" in params:
        fins = _replace_fin(fins, "right_pectoral", thrust_magnitude=params["thrust_right"])
    if "thrust_caudal" in params:
        fins = _replace_fin(fins, "caudal", thrust_magnitude=params["thrust_caudal"])
    if "caudal_offset_y" in params:
        caudal = next(f for f in fins if f.role == "caudal")
        fins = _replace_fin(fins, "caudal",
                            position=(caudal.position[0], params["caudal_offset_y"]))
    body_changes = {}
    for name in ("drag_area_surge", "drag_area_sway", "yaw_drag", "yaw_drag_crossflow",
                 "added_mass_surge", "added_mass_sway"):
        if name in params:
            body_changes[name] = params[name]
    body = replace(body, fins=fins, **body_changes)
    return replace(config, rigid=rigid, model=model, coefficients=coeffs, body=body)


def load_parameters(path) -> dict[str, float]:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format") != "vibrafin-parameters":
        raise ConfigurationError("not a vibrafin parameters file")
    return {str(k): float(v) for k, v in data["parameters"].items()}


def save_parameters(params: Mapping[str, float], path, objective: float | None = None,
                    records: list | None = None, notes: str = "") -> None:
    payload = {
        "format": "vibrafin-parameters",
        "version": 1,
        "parameters": {k: params[k] for k in sorted(params)},
    }
    if objective is not None:
        payload["objective"] = objective
    if records is not None:
        payload["records"] = records
    if notes:
        payload["notes"] = notes
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def bundled_parameters() -> dict[str, float]:
    """The calibrated parameter set shipped with the package."""
    path = resources.files("vibrafin").joinpath("data/calibrated_params.json")
    data = json.loads(path.read_text())
    return {str(k): float(v) for k, v in data["parameters"].items()}


def calibrated_config() -> ToolkitConfig:
    """Default config with the shipped calibration applied."""
    return apply_parameters(default_config(), bundled_parameters())
