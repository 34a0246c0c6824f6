"""Reference datasets and derivative-free fitting of model coefficients.

The bundled datasets carry the measured targets the toolkit is calibrated
against (drive frequencies, mount resonance, fin-length thrust ordering,
and the six locomotion scenarios).  Free coefficients are fitted with a
deterministic Nelder-Mead simplex search minimizing the sum of squared
relative errors plus hinge penalties for ordering constraints.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Mapping, Protocol, Sequence

from .errors import ConfigurationError, ObjectiveError, ValidationError

__all__ = [
    "ReferenceRecord",
    "ReferenceDataset",
    "FreeParameter",
    "FitResult",
    "RecordError",
    "NelderMeadOptions",
    "fit_linear",
    "nelder_mead",
    "fit_model_coefficients",
    "load_dataset",
    "bundled_dataset_names",
]

BUNDLED_DATASETS = (
    "voltage_frequency",
    "resonance_target",
    "thrust_ordering",
    "locomotion_targets",
)


@dataclass(frozen=True)
class ReferenceRecord:
    """One calibration target.

    ``kind`` is "value" (match ``target`` within relative ``tolerance``) or
    "ordering" (the resolved quantity must be <= 0; positive values are
    penalized with a squared hinge).
    """

    inputs: Mapping[str, object]
    target: float
    unit: str
    tolerance: float
    citation: str
    kind: str = "value"

    def __post_init__(self):
        if not self.citation:
            raise ValidationError("every record needs a non-empty citation")
        if self.kind not in ("value", "ordering"):
            raise ValidationError(f"unknown record kind {self.kind!r}")
        if self.kind == "value" and self.target == 0:
            raise ValidationError("value records need a non-zero target (errors are relative)")


@dataclass(frozen=True)
class ReferenceDataset:
    name: str
    citation: str
    records: tuple[ReferenceRecord, ...]

    def __post_init__(self):
        if not self.records:
            raise ValidationError(f"dataset {self.name!r} has no records")


def load_dataset(name: str) -> ReferenceDataset:
    """Load a bundled dataset by name from the package data files."""
    root = resources.files("vibrafin").joinpath("data/datasets")
    path = root.joinpath(f"{name}.json")
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"no bundled dataset named {name!r}") from None
    records = tuple(
        ReferenceRecord(
            inputs=rec["inputs"],
            target=float(rec.get("target", 0.0)),
            unit=rec.get("unit", ""),
            tolerance=float(rec.get("tolerance", 0.15)),
            citation=rec.get("citation", raw.get("citation", "")),
            kind=rec.get("kind", "value"),
        )
        for rec in raw["records"]
    )
    return ReferenceDataset(name=raw["name"], citation=raw.get("citation", ""), records=records)


def bundled_dataset_names() -> tuple[str, ...]:
    return BUNDLED_DATASETS


def fit_linear(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Ordinary least-squares line through (x, y) points: (slope, intercept)."""
    if len(points) < 2:
        raise ValidationError("fit_linear needs at least 2 points")
    n = len(points)
    sx = sum(p[0] for p in points)
    sy = sum(p[1] for p in points)
    sxx = sum(p[0] * p[0] for p in points)
    sxy = sum(p[0] * p[1] for p in points)
    denom = n * sxx - sx * sx
    if denom == 0.0:
        raise ValidationError("fit_linear: all x values are equal")
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    return slope, intercept


@dataclass(frozen=True)
class RecordError:
    """Resolved error of one record at the fitted parameters.

    For value records this is the signed relative error; for ordering
    records it is the (non-negative) hinge shortfall.
    """

    dataset: str
    index: int
    error: float
    tolerance: float = 0.0


@dataclass(frozen=True)
class FitResult:
    """Outcome of a simplex search or model-coefficient fit."""

    parameters: dict[str, float]
    objective: float
    per_record_errors: tuple[RecordError, ...]
    converged: bool
    iterations: int
    probes: tuple[tuple[tuple[float, ...], float], ...]
    best_history: tuple[float, ...]


@dataclass(frozen=True)
class NelderMeadOptions:
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    max_iter: int = 2000


def nelder_mead(objective: Callable[[Sequence[float]], float],
                x0: Sequence[float],
                options: NelderMeadOptions | None = None,
                names: Sequence[str] | None = None) -> FitResult:
    """Deterministic Nelder-Mead simplex minimization.

    Standard coefficients (reflection 1, expansion 2, contraction 0.5,
    shrink 0.5).  Terminates once the simplex is small in both senses
    (function spread below f_tol and size below x_tol; either alone can
    trigger spuriously, e.g. a simplex straddling a 1-D minimum has zero
    spread) or after max_iter iterations.  A non-finite objective value
    raises ObjectiveError carrying the point.
    """
    opts = options or NelderMeadOptions()
    x0 = [float(v) for v in x0]
    n = len(x0)
    if n < 1:
        raise ValidationError("nelder_mead needs dimension >= 1")
    if names is None:
        names = [f"x{i}" for i in range(n)]
    probes: list[tuple[tuple[float, ...], float]] = []

    def f(x: list[float]) -> float:
        val = float(objective(x))
        if not math.isfinite(val):
            raise ObjectiveError("objective returned a non-finite value", x)
        probes.append((tuple(x), val))
        return val

    # scipy-style initial simplex: 5% nudge per coordinate, absolute for zeros
    simplex = [list(x0)]
    for i in range(n):
        vert = list(x0)
        vert[i] = vert[i] * 1.05 if vert[i] != 0.0 else 0.00025
        simplex.append(vert)
    fvals = [f(v) for v in simplex]

    def sort_simplex():
        order = sorted(range(n + 1), key=lambda i: fvals[i])
        return [simplex[i] for i in order], [fvals[i] for i in order]

    simplex, fvals = sort_simplex()
    best_history = [fvals[0]]
    iterations = 0
    converged = False

    while iterations < opts.max_iter:
        spread = fvals[-1] - fvals[0]
        size = max(
            max(abs(v[j] - simplex[0][j]) for j in range(n)) for v in simplex[1:]
        )
        if spread < opts.f_tol and size < opts.x_tol:
            converged = True
            break
        iterations += 1

        centroid = [sum(v[j] for v in simplex[:-1]) / n for j in range(n)]
        worst = simplex[-1]
        xr = [centroid[j] + (centroid[j] - worst[j]) for j in range(n)]
        fr = f(xr)

        if fr < fvals[0]:
            xe = [centroid[j] + 2.0 * (centroid[j] - worst[j]) for j in range(n)]
            fe = f(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = [centroid[j] + 0.5 * (xr[j] - centroid[j]) for j in range(n)]
                fc = f(xc)
                accept = fc <= fr
            else:
                xc = [centroid[j] + 0.5 * (worst[j] - centroid[j]) for j in range(n)]
                fc = f(xc)
                accept = fc < fvals[-1]
            if accept:
                simplex[-1], fvals[-1] = xc, fc
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = [best[j] + 0.5 * (simplex[i][j] - best[j]) for j in range(n)]
                    fvals[i] = f(simplex[i])

        simplex, fvals = sort_simplex()
        best_history.append(fvals[0])

    return FitResult(
        parameters=dict(zip(names, simplex[0])),
        objective=fvals[0],
        per_record_errors=(),
        converged=converged,
        iterations=iterations,
        probes=tuple(probes),
        best_history=tuple(best_history),
    )


@dataclass(frozen=True)
class FreeParameter:
    """A fitted coefficient with box bounds and a starting value."""

    name: str
    lower: float
    upper: float
    initial: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValidationError(f"{self.name}: bounds must satisfy lower < upper")
        if not self.lower <= self.initial <= self.upper:
            raise ValidationError(f"{self.name}: initial value outside bounds")

    @property
    def log_scaled(self) -> bool:
        # log-transform parameters whose bounds span more than two decades
        return self.lower > 0 and self.upper / self.lower > 100.0

    def to_internal(self, value: float) -> float:
        return math.log10(value) if self.log_scaled else value

    def from_internal(self, z: float) -> float:
        return 10.0 ** z if self.log_scaled else z


class ModelBundle(Protocol):
    """Resolves a record to the model's prediction at given parameters.

    For "value" records the return is the predicted quantity; for
    "ordering" records it is the constraint violation (<= 0 when satisfied).
    """

    def evaluate(self, params: Mapping[str, float], dataset: ReferenceDataset,
                 record: ReferenceRecord) -> float: ...


def _record_errors(bundle: ModelBundle, params: Mapping[str, float],
                   datasets: Sequence[ReferenceDataset]) -> list[RecordError]:
    errors = []
    for ds in datasets:
        for idx, rec in enumerate(ds.records):
            value = bundle.evaluate(params, ds, rec)
            if rec.kind == "value":
                err = (value - rec.target) / rec.target
            else:
                err = max(0.0, value)
            errors.append(RecordError(dataset=ds.name, index=idx, error=err,
                                      tolerance=rec.tolerance))
    return errors


def aggregate_objective(errors: Sequence[RecordError],
                        weights: Mapping[str, float] | None = None,
                        scale_by_tolerance: bool = False) -> float:
    """Sum of squared per-record errors, optionally weighted per dataset.

    With scale_by_tolerance, each value-record error is divided by its
    stated tolerance first, so loosely-toleranced records pull less.
    """
    weights = weights or {}
    total = 0.0
    for e in errors:
        w = weights.get(e.dataset, 1.0)
        err = e.error
        if scale_by_tolerance and e.tolerance > 0.0:
            err = err / e.tolerance
        total += w * err * err
    return total


def fit_model_coefficients(datasets: Sequence[ReferenceDataset],
                           free_params: Sequence[FreeParameter],
                           bundle: ModelBundle,
                           weights: Mapping[str, float] | None = None,
                           options: NelderMeadOptions | None = None,
                           scale_by_tolerance: bool = False) -> FitResult:
    """Fit the free parameters to the datasets through the model bundle.

    Minimizes the weighted sum of squared relative errors (value records)
    plus squared hinge penalties (ordering records).  Parameters are kept
    inside their bounds by clipping with a quadratic out-of-bounds penalty;
    wide-bounded positive parameters are searched in log10 space.
    """
    base = {p.name: p.initial for p in free_params}
    try:
        initial_errors = _record_errors(bundle, base, datasets)
    except (ValidationError, KeyError, ArithmeticError) as exc:
        raise ConfigurationError(f"unresolvable calibration record: {exc}") from exc

    if not free_params:
        objective = aggregate_objective(initial_errors, weights, scale_by_tolerance)
        return FitResult(
            parameters={},
            objective=objective,
            per_record_errors=tuple(initial_errors),
            converged=True,
            iterations=0,
            probes=(((), objective),),
            best_history=(objective,),
        )

    z_bounds = [(p.to_internal(p.lower), p.to_internal(p.upper)) for p in free_params]

    def decode(z: Sequence[float]) -> tuple[dict[str, float], float]:
        params = {}
        penalty = 0.0
        for p, (zlo, zhi), zv in zip(free_params, z_bounds, z):
            zc = min(max(zv, zlo), zhi)
            overshoot = (zv - zc) / (zhi - zlo)
            penalty += 100.0 * overshoot * overshoot
            params[p.name] = p.from_internal(zc)
        return params, penalty

    def objective(z: Sequence[float]) -> float:
        params, penalty = decode(z)
        errs = _record_errors(bundle, params, datasets)
        return aggregate_objective(errs, weights, scale_by_tolerance) + penalty

    z0 = [p.to_internal(p.initial) for p in free_params]
    result = nelder_mead(objective, z0, options, names=[p.name for p in free_params])

    final_params, _ = decode([result.parameters[p.name] for p in free_params])
    final_errors = _record_errors(bundle, final_params, datasets)
    return FitResult(
        parameters=final_params,
        objective=aggregate_objective(final_errors, weights, scale_by_tolerance),
        per_record_errors=tuple(final_errors),
        converged=result.converged,
        iterations=result.iterations,
        probes=result.probes,
        best_history=result.best_history,
    )
