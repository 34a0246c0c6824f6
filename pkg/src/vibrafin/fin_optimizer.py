"""Fin geometry selection: resonance matching and thrust maximization.

Rod length is chosen by golden-section search on the squared relative
mismatch between the mount's first mode and a target drive frequency
(after probing that the frequency is monotone in rod length, which makes
the mismatch unimodal).  Flexible-fin length is chosen by a 64-point grid
scan of predicted thrust followed by simplex refinement from the best
grid point.  Both searches log every probe so callers can verify the
returned optimum dominates everything that was evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .calibration import NelderMeadOptions, nelder_mead
from .erm_motor import MotorSpec
from .structural_modal import (
    FlexibleFinGeometry,
    FluidProperties,
    ModelConfig,
    RigidPartGeometry,
    build_reduced_model,
    natural_frequencies,
)
from .thrust_model import StreamingCoefficients, predict_thrust, thrust_chain
from .errors import ValidationError

__all__ = [
    "resonance_mismatch",
    "optimize_rod_length",
    "optimize_fin_length",
    "design_report",
    "RodLengthResult",
    "FinLengthResult",
    "DesignReport",
    "golden_section",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def resonance_mismatch(rigid: RigidPartGeometry, fin: FlexibleFinGeometry,
                       fluid: FluidProperties | None, target_freq: float,
                       config: ModelConfig = ModelConfig()) -> float:
    """Squared relative mismatch ((f1 - target)/target)^2 of the mount mode."""
    if target_freq <= 0:
        raise ValidationError("target_freq must be > 0")
    model = build_reduced_model(rigid, fin, fluid, config)
    f1 = natural_frequencies(model).f1
    return ((f1 - target_freq) / target_freq) ** 2


def golden_section(f, lo: float, hi: float, x_tol: float = 1e-5,
                   probes: list | None = None) -> float:
    """Golden-section minimization of a unimodal scalar function on [lo, hi]."""
    if not lo < hi:
        raise ValidationError("bounds must satisfy lo < hi")

    def probe(x):
        val = f(x)
        if probes is not None:
            probes.append((x, val))
        return val

    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = probe(x1), probe(x2)
    while b - a > x_tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = probe(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = probe(x2)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class RodLengthResult:
    rod_length: float
    mismatch: float
    f1: float
    method: str  # "golden" or "grid+refine"
    at_boundary: bool
    probes: tuple[tuple[float, float], ...]


def optimize_rod_length(bounds: tuple[float, float],
                        rigid: RigidPartGeometry,
                        fin: FlexibleFinGeometry,
                        fluid: FluidProperties | None,
                        target_freq: float,
                        config: ModelConfig = ModelConfig(),
                        x_tol: float = 1e-5) -> RodLengthResult:
    """Rod length whose mount first mode best matches the target frequency."""
    lo, hi = bounds
    if not lo < hi:
        raise ValidationError("bounds must be ordered (lo < hi)")

    def f1_at(length):
        model = build_reduced_model(replace(rigid, rod_length=length), fin, fluid, config)
        return natural_frequencies(model).f1

    def mismatch_at(length):
        return resonance_mismatch(replace(rigid, rod_length=length), fin, fluid,
                                  target_freq, config)

    probes: list[tuple[float, float]] = []

    # monotonicity probe: f1 should decrease with rod length
    n_probe = 5
    ls = [lo + (hi - lo) * i / (n_probe - 1) for i in range(n_probe)]
    f1s = [f1_at(l) for l in ls]
    monotone = all(b < a for a, b in zip(f1s, f1s[1:]))

    if monotone:
        best = golden_section(mismatch_at, lo, hi, x_tol, probes)
        method = "golden"
    else:
        # non-monotone frequency: dense scan, then refine around the best cell
        n_grid = 256
        ls = [lo + (hi - lo) * i / (n_grid - 1) for i in range(n_grid)]
        vals = []
        for l in ls:
            val = mismatch_at(l)
            probes.append((l, val))
            vals.append(val)
        i_best = min(range(n_grid), key=lambda i: vals[i])
        a = ls[max(0, i_best - 1)]
        b = ls[min(n_grid - 1, i_best + 1)]
        best = golden_section(mismatch_at, a, b, x_tol, probes)
        method = "grid+refine"

    best = min(max(best, lo), hi)
    best_val = mismatch_at(best)
    # never return worse than a logged probe
    for l, val in probes:
        if val < best_val:
            best, best_val = l, val
    at_boundary = (best - lo) <= 2.0 * x_tol or (hi - best) <= 2.0 * x_tol
    return RodLengthResult(
        rod_length=best,
        mismatch=best_val,
        f1=f1_at(best),
        method=method,
        at_boundary=at_boundary,
        probes=tuple(probes),
    )


@dataclass(frozen=True)
class FinLengthResult:
    fin_length: float
    thrust: float
    probes: tuple[tuple[float, float], ...]


def optimize_fin_length(bounds: tuple[float, float],
                        voltage: float,
                        rigid: RigidPartGeometry,
                        fin: FlexibleFinGeometry,
                        fluid: FluidProperties,
                        motor: MotorSpec,
                        coeffs: StreamingCoefficients,
                        config: ModelConfig = ModelConfig()) -> FinLengthResult:
    """Fin length maximizing predicted thrust at the given voltage.

    64-point grid scan over the bounds, then Nelder-Mead refinement from
    the best grid point.  The returned thrust is at least as large as
    every probe evaluated during the search.
    """
    lo, hi = bounds
    if lo > hi:
        raise ValidationError("bounds must be ordered (lo <= hi)")

    probes: list[tuple[float, float]] = []

    def thrust_at(length):
        val = predict_thrust(voltage, rigid, replace(fin, fin_length=length),
                             fluid, motor, coeffs, config)
        probes.append((length, val))
        return val

    if lo == hi:
        t = thrust_at(lo)
        return FinLengthResult(fin_length=lo, thrust=t, probes=tuple(probes))

    n_grid = 64
    ls = [lo + (hi - lo) * i / (n_grid - 1) for i in range(n_grid)]
    vals = [thrust_at(l) for l in ls]
    i_best = max(range(n_grid), key=lambda i: vals[i])
    best_l, best_t = ls[i_best], vals[i_best]

    def negated(z):
        l = min(max(z[0], lo), hi)
        return -thrust_at(l)

    refine = nelder_mead(negated, [best_l],
                         NelderMeadOptions(f_tol=1e-14, x_tol=1e-7, max_iter=200))
    l_ref = min(max(refine.parameters["x0"], lo), hi)
    t_ref = predict_thrust(voltage, rigid, replace(fin, fin_length=l_ref),
                           fluid, motor, coeffs, config)
    if t_ref >= best_t:
        best_l, best_t = l_ref, t_ref
    return FinLengthResult(fin_length=best_l, thrust=best_t, probes=tuple(probes))


@dataclass(frozen=True)
class DesignReport:
    """Modal and thrust summary of one candidate geometry."""

    rod_length: float
    rod_height: float
    rod_width: float
    fin_length: float
    f1: float
    f2: float
    mode_axis: str
    gap_ratio: float
    assembly_f1: float
    drive_freq: float
    amplitude_at_rated: float
    thrust_at_rated: float
    resonance_mismatch: float

    def render_text(self) -> str:
        mm = 1e3
        return "\n".join([
            "design report",
            f"  rod L x H x W        : {self.rod_length*mm:.2f} x {self.rod_height*mm:.2f} x {self.rod_width*mm:.2f} mm",
            f"  fin length           : {self.fin_length*mm:.2f} mm",
            f"  mount modes f1, f2   : {self.f1:.2f} Hz, {self.f2:.2f} Hz (first mode axis {self.mode_axis})",
            f"  mode gap (f2-f1)/f1  : {self.gap_ratio:.3f}",
            f"  assembly first mode  : {self.assembly_f1:.2f} Hz",
            f"  drive at rated volts : {self.drive_freq:.2f} Hz",
            f"  tip amplitude        : {self.amplitude_at_rated*mm:.3f} mm",
            f"  predicted thrust     : {self.thrust_at_rated*1e3:.3f} mN",
            f"  resonance mismatch   : {self.resonance_mismatch:.3e}",
        ]) + "\n"


def design_report(rigid: RigidPartGeometry,
                  fin: FlexibleFinGeometry,
                  fluid: FluidProperties,
                  motor: MotorSpec,
                  coeffs: StreamingCoefficients,
                  config: ModelConfig = ModelConfig()) -> DesignReport:
    """Aggregate modal, amplitude and thrust figures for one geometry."""
    from .structural_modal import assembly_first_frequency

    model = build_reduced_model(rigid, fin, fluid, config)
    freqs = natural_frequencies(model)
    chain = thrust_chain(motor.rated_voltage, rigid, fin, fluid, motor, coeffs, config)
    target = chain.freq_hz
    return DesignReport(
        rod_length=rigid.rod_length,
        rod_height=rigid.rod_height,
        rod_width=rigid.rod_width,
        fin_length=fin.fin_length,
        f1=freqs.f1,
        f2=freqs.f2,
        mode_axis=freqs.axis1,
        gap_ratio=(freqs.f2 - freqs.f1) / freqs.f1,
        assembly_f1=assembly_first_frequency(rigid, fin, fluid, config),
        drive_freq=chain.freq_hz,
        amplitude_at_rated=chain.a_x3_m,
        thrust_at_rated=chain.thrust_n,
        resonance_mismatch=((freqs.f1 - target) / target) ** 2,
    )
