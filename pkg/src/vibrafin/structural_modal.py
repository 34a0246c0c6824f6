"""Reduced-order modal models of the fin assembly.

Replaces mesh-based modal analysis with two lumped models:

* rigid part on its compliant mount: per-axis stiffness is the series
  combination of rod tip-bending stiffness (3*E*I/L**3) and an isotropic
  area-proportional silicone joint stiffness; per-axis effective mass is the
  rigid-part mass plus a participation fraction of the rod mass,
* flexible fin: first clamped-free bending mode of a uniform strip, with a
  single-coefficient added-mass correction when submerged, condensed to one
  modal mass/stiffness/damper stage.

The full assembly is the two-stage chain (mount spring + rigid mass) --
(fin modal spring + fin modal mass); its eigenfrequencies come from the
closed-form 2x2 generalized eigenproblem.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .errors import ValidationError

__all__ = [
    "RigidPartGeometry",
    "FlexibleFinGeometry",
    "FluidProperties",
    "ModelConfig",
    "ReducedOrderModel",
    "ModalFrequencies",
    "SweepRow",
    "build_reduced_model",
    "natural_frequencies",
    "fin_first_frequency",
    "assembly_first_frequency",
    "chain_frequencies",
    "modal_sweep",
    "sweep_to_csv",
]

# First clamped-free bending mode root of cos(x)cosh(x) = -1
_LAMBDA1 = 1.875


@dataclass(frozen=True)
class RigidPartGeometry:
    """Connecting rod + housing geometry of the rigid part.

    rod_length L, rod_height H, rod_width W : m, connecting-rod dimensions
        (H and W are the cross-section sides; motion along x bends about
        the H side, so the x axis is the soft axis when H > W)
    housing_length, cap_length, housing_diameter : m, fixed shell dimensions
    rod_elastic_modulus : Pa, printed-rod material modulus
    rigid_part_mass : kg, lumped housing + motor + cap mass carried at the rod tip
    joint_stiffness_per_area : Pa/m, silicone bond stiffness per bonded area
    """

    rod_length: float = 10.0e-3
    rod_height: float = 7.5e-3
    rod_width: float = 3.0e-3
    housing_length: float = 15.5e-3
    cap_length: float = 5.0e-3
    housing_diameter: float = 11.0e-3
    rod_elastic_modulus: float = 2.0e9
    rigid_part_mass: float = 4.0e-3
    joint_stiffness_per_area: float = 1.40e8

    def __post_init__(self):
        for name in (
            "rod_length",
            "rod_height",
            "rod_width",
            "housing_length",
            "cap_length",
            "housing_diameter",
        ):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0")
        if self.rod_elastic_modulus <= 0:
            raise ValidationError("rod_elastic_modulus must be > 0")
        if self.rigid_part_mass <= 0:
            raise ValidationError("rigid_part_mass must be > 0")
        if self.joint_stiffness_per_area <= 0:
            raise ValidationError("joint_stiffness_per_area must be > 0")


@dataclass(frozen=True)
class FlexibleFinGeometry:
    """Flexible fin strip: length, thickness, clamped width and material.

    The fin is modeled as a uniform clamped-free strip; the clamped width
    defaults to the housing diameter.
    """

    fin_length: float = 12.0e-3
    thickness: float = 200.0e-6
    clamped_width: float = 11.0e-3
    elastic_modulus: float = 2.5e9
    material_density: float = 1420.0
    poisson_ratio: float = 0.34

    def __post_init__(self):
        if self.fin_length <= 0:
            raise ValidationError("fin_length must be > 0")
        if self.thickness <= 0:
            raise ValidationError("thickness must be > 0")
        if self.clamped_width <= 0:
            raise ValidationError("clamped_width must be > 0")
        if self.elastic_modulus <= 0:
            raise ValidationError("elastic_modulus must be > 0")
        if self.material_density <= 0:
            raise ValidationError("material_density must be > 0")
        if not 0 <= self.poisson_ratio < 0.5:
            raise ValidationError("poisson_ratio must be in [0, 0.5)")

    @property
    def mass(self) -> float:
        """Strip mass in kg."""
        return self.material_density * self.fin_length * self.clamped_width * self.thickness


@dataclass(frozen=True)
class FluidProperties:
    """Surrounding fluid: density (kg/m^3) and dynamic viscosity (Pa*s)."""

    density: float = 1000.0
    dynamic_viscosity: float = 1.0e-3

    def __post_init__(self):
        if self.density <= 0:
            raise ValidationError("density must be > 0")
        if self.dynamic_viscosity <= 0:
            raise ValidationError("dynamic_viscosity must be > 0")


WATER = FluidProperties()


@dataclass(frozen=True)
class ModelConfig:
    """Tunable knobs of the reduced-order model.

    rod_density : kg/m^3, printed-rod density (rod mass = rho*L*H*W)
    rod_mass_participation : fraction of rod mass lumped at the tip
        (0.24 is the standard tip-loaded cantilever value)
    fin_modal_mass_fraction : fraction of (fin + added fluid) mass in the
        first-mode single-DOF condensation
    added_mass_coefficient : C_am in Gamma = C_am * rho_fluid * b / (rho_fin * t)
    damping_ratio_x/y, fin_damping_ratio : modal damping ratios
    """

    rod_density: float = 1200.0
    rod_mass_participation: float = 0.24
    fin_modal_mass_fraction: float = 0.25
    added_mass_coefficient: float = math.pi / 4.0
    damping_ratio_x: float = 0.05
    damping_ratio_y: float = 0.05
    fin_damping_ratio: float = 0.10

    def __post_init__(self):
        if self.rod_density <= 0:
            raise ValidationError("rod_density must be > 0")
        if self.rod_mass_participation < 0:
            raise ValidationError("rod_mass_participation must be >= 0")
        if self.fin_modal_mass_fraction <= 0:
            raise ValidationError("fin_modal_mass_fraction must be > 0")
        if self.added_mass_coefficient < 0:
            raise ValidationError("added_mass_coefficient must be >= 0")
        for name in ("damping_ratio_x", "damping_ratio_y", "fin_damping_ratio"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")


@dataclass(frozen=True)
class ReducedOrderModel:
    """Lumped parameters of the mount (per axis) and fin modal stage."""

    effective_mass_x: float
    effective_mass_y: float
    stiffness_x: float
    stiffness_y: float
    damping_x: float
    damping_y: float
    fin_modal_mass: float
    fin_modal_stiffness: float
    fin_modal_damping: float

    def __post_init__(self):
        for name in (
            "effective_mass_x",
            "effective_mass_y",
            "stiffness_x",
            "stiffness_y",
            "fin_modal_mass",
            "fin_modal_stiffness",
        ):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0")
        for name in ("damping_x", "damping_y", "fin_modal_damping"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")


@dataclass(frozen=True)
class ModalFrequencies:
    """Ordered mount-mode frequencies with axis labels (f1 <= f2)."""

    f1: float
    f2: float
    axis1: str
    axis2: str


def _series(k1: float, k2: float) -> float:
    return k1 * k2 / (k1 + k2)


def fin_first_frequency(fin: FlexibleFinGeometry, fluid: FluidProperties | None = None,
                        config: ModelConfig = ModelConfig()) -> float:
    """First bending frequency (Hz) of the clamped-free fin strip.

    In air:  f = (lambda1^2 / 2*pi) * (1/L^2) * sqrt(E*t^2 / (12*rho*(1 - nu^2)))
    In fluid the frequency drops by sqrt(1 + Gamma) where
    Gamma = C_am * rho_fluid * b / (rho_fin * t).
    """
    e_eff = fin.elastic_modulus / (1.0 - fin.poisson_ratio**2)
    wave_speed = fin.thickness * math.sqrt(e_eff / (12.0 * fin.material_density))
    f_air = (_LAMBDA1**2 / (2.0 * math.pi)) * wave_speed / fin.fin_length**2
    if fluid is None:
        return f_air
    gamma = _added_mass_ratio(fin, fluid, config)
    return f_air / math.sqrt(1.0 + gamma)


def _added_mass_ratio(fin: FlexibleFinGeometry, fluid: FluidProperties,
                      config: ModelConfig) -> float:
    return (
        config.added_mass_coefficient
        * fluid.density
        * fin.clamped_width
        / (fin.material_density * fin.thickness)
    )


def build_reduced_model(rigid: RigidPartGeometry, fin: FlexibleFinGeometry,
                        fluid: FluidProperties | None = None,
                        config: ModelConfig = ModelConfig()) -> ReducedOrderModel:
    """Assemble the lumped mount + fin-stage model from geometry.

    Per-axis mount stiffness is the series combination of rod tip bending
    (I_x = H*W^3/12 for motion along x, I_y = W*H^3/12 for motion along y)
    with the isotropic joint stiffness k_j = joint_stiffness_per_area * H * W.
    """
    L, H, W = rigid.rod_length, rigid.rod_height, rigid.rod_width
    i_x = H * W**3 / 12.0
    i_y = W * H**3 / 12.0
    k_rod_x = 3.0 * rigid.rod_elastic_modulus * i_x / L**3
    k_rod_y = 3.0 * rigid.rod_elastic_modulus * i_y / L**3
    k_joint = rigid.joint_stiffness_per_area * H * W
    k_x = _series(k_rod_x, k_joint)
    k_y = _series(k_rod_y, k_joint)

    rod_mass = config.rod_density * L * H * W
    m_eff = rigid.rigid_part_mass + config.rod_mass_participation * rod_mass
    c_x = 2.0 * config.damping_ratio_x * math.sqrt(k_x * m_eff)
    c_y = 2.0 * config.damping_ratio_y * math.sqrt(k_y * m_eff)

    if fluid is None:
        wet_mass = fin.mass
    else:
        wet_mass = fin.mass * (1.0 + _added_mass_ratio(fin, fluid, config))
    m_fin = config.fin_modal_mass_fraction * wet_mass
    f_fin = fin_first_frequency(fin, fluid, config)
    k_fin = (2.0 * math.pi * f_fin) ** 2 * m_fin
    c_fin = 2.0 * config.fin_damping_ratio * math.sqrt(k_fin * m_fin)

    return ReducedOrderModel(
        effective_mass_x=m_eff,
        effective_mass_y=m_eff,
        stiffness_x=k_x,
        stiffness_y=k_y,
        damping_x=c_x,
        damping_y=c_y,
        fin_modal_mass=m_fin,
        fin_modal_stiffness=k_fin,
        fin_modal_damping=c_fin,
    )


def natural_frequencies(model: ReducedOrderModel) -> ModalFrequencies:
    """Mount-mode frequencies f = sqrt(k/m)/(2*pi) per axis, ordered f1 <= f2."""
    f_x = math.sqrt(model.stiffness_x / model.effective_mass_x) / (2.0 * math.pi)
    f_y = math.sqrt(model.stiffness_y / model.effective_mass_y) / (2.0 * math.pi)
    if f_x <= f_y:
        return ModalFrequencies(f1=f_x, f2=f_y, axis1="x", axis2="y")
    return ModalFrequencies(f1=f_y, f2=f_x, axis1="y", axis2="x")


def chain_frequencies(k1: float, m1: float, k2: float, m2: float) -> tuple[float, float]:
    """Eigenfrequencies (Hz) of the grounded spring-mass-spring-mass chain.

    Closed-form roots of  m1*m2*w^4 - (m1*k2 + m2*(k1 + k2))*w^2 + k1*k2 = 0.
    """
    if min(k1, m1, k2, m2) <= 0:
        raise ValidationError("chain parameters must be > 0")
    a = m1 * m2
    b = m1 * k2 + m2 * (k1 + k2)
    c = k1 * k2
    disc = b * b - 4.0 * a * c
    if disc < 0:
        disc = 0.0
    root = math.sqrt(disc)
    # b - root cancels catastrophically for widely separated stages; get the
    # low root from the product of roots (Vieta) instead
    w2_high = (b + root) / (2.0 * a)
    w2_low = c / (a * w2_high)
    return (math.sqrt(w2_low) / (2.0 * math.pi), math.sqrt(w2_high) / (2.0 * math.pi))


def assembly_first_frequency(rigid: RigidPartGeometry, fin: FlexibleFinGeometry,
                             fluid: FluidProperties | None = None,
                             config: ModelConfig = ModelConfig()) -> float:
    """Lowest eigenfrequency (Hz) of the mount + fin two-stage chain (x axis)."""
    model = build_reduced_model(rigid, fin, fluid, config)
    f_low, _ = chain_frequencies(
        model.stiffness_x,
        model.effective_mass_x,
        model.fin_modal_stiffness,
        model.fin_modal_mass,
    )
    return f_low


def assembly_frequencies(rigid: RigidPartGeometry, fin: FlexibleFinGeometry,
                         fluid: FluidProperties | None = None,
                         config: ModelConfig = ModelConfig()) -> tuple[float, float]:
    """Both eigenfrequencies (Hz) of the mount + fin chain (x axis)."""
    model = build_reduced_model(rigid, fin, fluid, config)
    return chain_frequencies(
        model.stiffness_x,
        model.effective_mass_x,
        model.fin_modal_stiffness,
        model.fin_modal_mass,
    )


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a modal sweep."""

    geometry: tuple[tuple[str, float], ...]
    f1_hz: float
    f2_hz: float
    gap_ratio: float


_SWEEP_AXES = ("rod_length", "aspect_ratio", "fin_length")


def _apply_axis(rigid: RigidPartGeometry, fin: FlexibleFinGeometry, axis: str, value: float):
    if axis == "rod_length":
        return replace(rigid, rod_length=value), fin
    if axis == "aspect_ratio":
        # H/W swept at fixed cross-section area H*W
        area = rigid.rod_height * rigid.rod_width
        h = math.sqrt(area * value)
        w = math.sqrt(area / value)
        return replace(rigid, rod_height=h, rod_width=w), fin
    if axis == "fin_length":
        return rigid, replace(fin, fin_length=value)
    raise ValidationError(f"unknown sweep axis {axis!r}; supported: {_SWEEP_AXES}")


def _max_workers() -> int:
    raw = os.environ.get("VIBRAFIN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def modal_sweep(axes: Mapping[str, Sequence[float]],
                rigid: RigidPartGeometry,
                fin: FlexibleFinGeometry,
                fluid: FluidProperties | None = None,
                config: ModelConfig = ModelConfig()) -> list[SweepRow]:
    """Mount-mode table over a geometry grid.

    ``axes`` maps axis name (rod_length, aspect_ratio, fin_length) to grid
    values; rows cover the full grid product in lexicographic order (first
    axis outermost).  For the fin_length axis the chain (assembly) modes are
    reported, otherwise the rigid-part mount modes.

    Grid points evaluate independently; VIBRAFIN_THREADS > 1 parallelizes
    the evaluation without changing the row order.
    """
    if not axes:
        raise ValidationError("sweep needs at least one axis")
    for name, values in axes.items():
        if name not in _SWEEP_AXES:
            raise ValidationError(f"unknown sweep axis {name!r}; supported: {_SWEEP_AXES}")
        if len(values) == 0:
            raise ValidationError(f"sweep axis {name!r} has an empty grid")

    names = list(axes.keys())
    points: list[tuple[float, ...]] = [()]
    for name in names:
        points = [p + (float(v),) for p in points for v in axes[name]]

    def evaluate(point: tuple[float, ...]) -> SweepRow:
        r, f = rigid, fin
        for name, value in zip(names, point):
            r, f = _apply_axis(r, f, name, value)
        if "fin_length" in names:
            f1, f2 = assembly_frequencies(r, f, fluid, config)
        else:
            model = build_reduced_model(r, f, fluid, config)
            freqs = natural_frequencies(model)
            f1, f2 = freqs.f1, freqs.f2
        return SweepRow(
            geometry=tuple(zip(names, point)),
            f1_hz=f1,
            f2_hz=f2,
            gap_ratio=(f2 - f1) / f1,
        )

    workers = _max_workers()
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, points))
    else:
        rows = [evaluate(p) for p in points]
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    """Render sweep rows as CSV: one column per geometry axis, then
    f1_hz, f2_hz, gap_ratio."""
    if not rows:
        raise ValidationError("no sweep rows to export")
    names = [name for name, _ in rows[0].geometry]
    lines = [",".join(names + ["f1_hz", "f2_hz", "gap_ratio"])]
    for row in rows:
        values = [f"{value:.9g}" for _, value in row.geometry]
        values += [f"{row.f1_hz:.9g}", f"{row.f2_hz:.9g}", f"{row.gap_ratio:.9g}"]
        lines.append(",".join(values))
    return "\n".join(lines) + "\n"
