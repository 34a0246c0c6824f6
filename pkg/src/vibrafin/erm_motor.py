"""Eccentric-rotating-mass (ERM) vibration motor model.

The motor is treated as a prescribed-frequency force source: the spinning
eccentric rotor produces a rotating centrifugal force of amplitude

    F0 = m_e * d * omega**2

whose horizontal/vertical components are F0*cos(omega*t + phi) and
F0*sin(omega*t + phi).  Drive frequency versus supply voltage is a linear
least-squares fit through measured (voltage, frequency) anchor points; no
extrapolation outside the measured voltage range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRangeError, ValidationError

__all__ = [
    "MotorSpec",
    "RotatingForce",
    "drive_frequency",
    "centrifugal_amplitude",
    "force_components",
]


@dataclass(frozen=True)
class MotorSpec:
    """Eccentric rotor parameters and the voltage-to-frequency anchor points.

    eccentric_mass : kg, mass of the eccentric rotor
    eccentricity   : m, offset of the rotor center of mass from the axis
    voltage_freq_points : ((V, Hz), ...) measured anchors, at least two,
        strictly increasing in both voltage and frequency
    rated_voltage  : V, nominal operating point (must lie in voltage_range)
    voltage_range  : (min V, max V) supported supply range
    """

    eccentric_mass: float
    eccentricity: float
    voltage_freq_points: tuple[tuple[float, float], ...]
    rated_voltage: float
    voltage_range: tuple[float, float]

    def __post_init__(self):
        if self.eccentric_mass <= 0:
            raise ValidationError("eccentric_mass must be > 0")
        if self.eccentricity <= 0:
            raise ValidationError("eccentricity must be > 0")
        pts = tuple((float(v), float(f)) for v, f in self.voltage_freq_points)
        object.__setattr__(self, "voltage_freq_points", pts)
        if len(pts) < 2:
            raise ValidationError("voltage_freq_points needs at least 2 points")
        for (v0, f0), (v1, f1) in zip(pts, pts[1:]):
            if not v1 > v0:
                raise ValidationError("voltage_freq_points voltages must be strictly increasing")
            if not f1 > f0:
                raise ValidationError("voltage_freq_points frequencies must be strictly increasing")
        lo, hi = self.voltage_range
        if not lo < hi:
            raise ValidationError("voltage_range must be ordered (min < max)")
        if not lo <= self.rated_voltage <= hi:
            raise ValidationError("rated_voltage must lie within voltage_range")


@dataclass(frozen=True)
class RotatingForce:
    """A rotating force phasor: amplitude (N), angular velocity (rad/s), phase (rad)."""

    amplitude: float
    angular_velocity: float
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValidationError("amplitude must be >= 0")
        if self.angular_velocity < 0:
            raise ValidationError("angular_velocity must be >= 0")


def _linear_fit(points):
    """Ordinary least squares slope/intercept through (x, y) pairs."""
    n = len(points)
    sx = sum(p[0] for p in points)
    sy = sum(p[1] for p in points)
    sxx = sum(p[0] * p[0] for p in points)
    sxy = sum(p[0] * p[1] for p in points)
    denom = n * sxx - sx * sx
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    return slope, intercept


def drive_frequency(spec: MotorSpec, voltage: float) -> float:
    """Drive frequency (Hz) at the given supply voltage (V).

    Linear least-squares fit through the spec's anchor points, evaluated at
    ``voltage``.  Voltages outside the supported range raise OutOfRangeError:
    the fit is only trusted where it was measured.
    """
    lo, hi = spec.voltage_range
    if not lo <= voltage <= hi:
        raise OutOfRangeError(
            f"voltage {voltage} V outside supported range [{lo}, {hi}] V"
        )
    slope, intercept = _linear_fit(spec.voltage_freq_points)
    return slope * voltage + intercept


def centrifugal_amplitude(spec: MotorSpec, omega: float) -> float:
    """Centrifugal force amplitude F0 = m_e * d * omega**2 (N)."""
    if omega < 0:
        raise ValidationError("omega must be >= 0")
    return spec.eccentric_mass * spec.eccentricity * omega * omega


def force_components(force: RotatingForce, t: float) -> tuple[float, float]:
    """Horizontal and vertical force components (Fx, Fy) at time t (s)."""
    if t < 0:
        raise ValidationError("t must be >= 0")
    arg = force.angular_velocity * t + force.phase
    return (force.amplitude * math.cos(arg), force.amplitude * math.sin(arg))
