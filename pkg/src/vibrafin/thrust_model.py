"""Forcing-to-thrust chain for one oscillating fin.

Rotating force -> mount oscillation amplitude -> fin-tip deformation
amplitude -> acoustic streaming velocity -> streaming thrust:

    A_x1 = F0 / sqrt((k_x - m_x w^2)^2 + (c_x w)^2)
    A_x2 = A_x1 * m_f w^2 / sqrt((k_f - m_f w^2)^2 + (c_f w)^2)
    A_x3 = A_x1 + A_x2
    U    = C_U * rho * A_x3^2 * w^2 / mu
    F    = C_F * rho * U^2 * L_f * b

The streaming proportionalities keep the classic scaling in rho, amplitude
squared, frequency squared and 1/mu; C_U carries units of m^2 because the
scaling law alone is not dimensionally a velocity (the implied length scale
is absorbed into the fitted constant), and the thrust law includes the fin
width b so that rho*U^2*(area) is a force.  The fin stage uses the
inertial (w^2-scaled) base-excitation form so the tip deformation vanishes
as w -> 0.

No measurement pins the velocity branch on its own, so streaming
velocities are meaningful relative to one another; only the thrust end of
the chain is calibrated absolutely (through the locomotion force balance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .erm_motor import MotorSpec, centrifugal_amplitude, drive_frequency
from .errors import ResonanceSingularityError, ValidationError
from .structural_modal import (
    FlexibleFinGeometry,
    FluidProperties,
    ModelConfig,
    ReducedOrderModel,
    RigidPartGeometry,
    build_reduced_model,
)

__all__ = [
    "OscillationAmplitudes",
    "StreamingCoefficients",
    "MarkerMeasurement",
    "ThrustBreakdown",
    "forced_amplitude",
    "total_amplitude",
    "streaming_velocity",
    "streaming_thrust",
    "predict_thrust",
    "thrust_chain",
    "amplitude_from_markers",
]


@dataclass(frozen=True)
class OscillationAmplitudes:
    """Steady-state oscillation amplitudes (m).

    a_x1 : rigid-part amplitude along x
    a_x2 : fin free-end deformation amplitude along x
    a_x3 : total fin-tip amplitude, a_x1 + a_x2
    a_1y : rigid-part amplitude along y
    """

    a_x1: float
    a_x2: float
    a_x3: float
    a_1y: float

    def __post_init__(self):
        for name in ("a_x1", "a_x2", "a_x3", "a_1y"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.a_x3 != self.a_x1 + self.a_x2:
            raise ValidationError("a_x3 must equal a_x1 + a_x2")


@dataclass(frozen=True)
class StreamingCoefficients:
    """Fitted streaming constants: C_U (m^2) for velocity, C_F (-) for thrust."""

    velocity_scale: float = 8.6e-12
    thrust_coefficient: float = 12.0

    def __post_init__(self):
        if self.velocity_scale <= 0:
            raise ValidationError("velocity_scale must be > 0")
        if self.thrust_coefficient <= 0:
            raise ValidationError("thrust_coefficient must be > 0")


@dataclass(frozen=True)
class MarkerMeasurement:
    """Marker separations (m): oscillating d_x, d_y and static d_x0, d_y0."""

    d_x: float
    d_x0: float
    d_y: float
    d_y0: float

    def __post_init__(self):
        if not self.d_x >= self.d_x0 >= 0:
            raise ValidationError("require d_x >= d_x0 >= 0")
        if not self.d_y >= self.d_y0 >= 0:
            raise ValidationError("require d_y >= d_y0 >= 0")


def _sdof_response(f0: float, k: float, m: float, c: float, omega: float) -> float:
    real = k - m * omega * omega
    imag = c * omega
    denom = math.hypot(real, imag)
    if denom == 0.0:
        raise ResonanceSingularityError(
            "undamped response evaluated exactly at resonance (k = m*w^2, c = 0)"
        )
    return f0 / denom


def forced_amplitude(model: ReducedOrderModel, f0: float, omega: float) -> OscillationAmplitudes:
    """Steady-state amplitudes of the mount and fin stages under force amplitude f0 (N)."""
    if omega <= 0:
        raise ValidationError("omega must be > 0")
    if f0 < 0:
        raise ValidationError("f0 must be >= 0")
    a_x1 = _sdof_response(f0, model.stiffness_x, model.effective_mass_x,
                          model.damping_x, omega)
    a_1y = _sdof_response(f0, model.stiffness_y, model.effective_mass_y,
                          model.damping_y, omega)
    base_force = a_x1 * model.fin_modal_mass * omega * omega
    a_x2 = _sdof_response(base_force, model.fin_modal_stiffness,
                          model.fin_modal_mass, model.fin_modal_damping, omega)
    return OscillationAmplitudes(a_x1=a_x1, a_x2=a_x2, a_x3=a_x1 + a_x2, a_1y=a_1y)


def total_amplitude(a_x1: float, a_x2: float) -> float:
    """Total fin-tip amplitude a_x3 = a_x1 + a_x2 (m)."""
    if a_x1 < 0 or a_x2 < 0:
        raise ValidationError("amplitudes must be >= 0")
    return a_x1 + a_x2


def streaming_velocity(a_x3: float, omega: float, fluid: FluidProperties,
                       coeffs: StreamingCoefficients) -> float:
    """Acoustic streaming velocity U = C_U * rho * A^2 * w^2 / mu (m/s)."""
    if a_x3 < 0 or omega < 0:
        raise ValidationError("a_x3 and omega must be >= 0")
    return (
        coeffs.velocity_scale
        * fluid.density
        * a_x3 * a_x3
        * omega * omega
        / fluid.dynamic_viscosity
    )


def streaming_thrust(u: float, fin: FlexibleFinGeometry, fluid: FluidProperties,
                     coeffs: StreamingCoefficients) -> float:
    """Streaming thrust F = C_F * rho * U^2 * L_f * b (N)."""
    if u < 0:
        raise ValidationError("u must be >= 0")
    return (
        coeffs.thrust_coefficient
        * fluid.density
        * u * u
        * fin.fin_length
        * fin.clamped_width
    )


@dataclass(frozen=True)
class ThrustBreakdown:
    """Every stage of the voltage-to-thrust chain at one operating point."""

    voltage_v: float
    freq_hz: float
    a_x1_m: float
    a_x2_m: float
    a_x3_m: float
    u_mps: float
    thrust_n: float


def thrust_chain(voltage: float,
                 rigid: RigidPartGeometry,
                 fin: FlexibleFinGeometry,
                 fluid: FluidProperties,
                 motor: MotorSpec,
                 coeffs: StreamingCoefficients,
                 config: ModelConfig = ModelConfig()) -> ThrustBreakdown:
    """Evaluate the full chain at one supply voltage; see predict_thrust."""
    freq = drive_frequency(motor, voltage)
    omega = 2.0 * math.pi * freq
    f0 = centrifugal_amplitude(motor, omega)
    model = build_reduced_model(rigid, fin, fluid, config)
    amps = forced_amplitude(model, f0, omega)
    u = streaming_velocity(amps.a_x3, omega, fluid, coeffs)
    thrust = streaming_thrust(u, fin, fluid, coeffs)
    return ThrustBreakdown(
        voltage_v=voltage,
        freq_hz=freq,
        a_x1_m=amps.a_x1,
        a_x2_m=amps.a_x2,
        a_x3_m=amps.a_x3,
        u_mps=u,
        thrust_n=thrust,
    )


def predict_thrust(voltage: float,
                   rigid: RigidPartGeometry,
                   fin: FlexibleFinGeometry,
                   fluid: FluidProperties,
                   motor: MotorSpec,
                   coeffs: StreamingCoefficients,
                   config: ModelConfig = ModelConfig()) -> float:
    """Predicted streaming thrust (N) at the given supply voltage.

    Stateless composition: drive frequency -> centrifugal force -> forced
    amplitudes -> streaming velocity -> streaming thrust.
    """
    return thrust_chain(voltage, rigid, fin, fluid, motor, coeffs, config).thrust_n


def amplitude_from_markers(meas: MarkerMeasurement) -> tuple[float, float]:
    """Oscillation amplitudes (A_1x, A_1y) from marker separations:
    A_1x = d_x - d_x0, A_1y = d_y - d_y0."""
    return (meas.d_x - meas.d_x0, meas.d_y - meas.d_y0)
