"""Fitting machinery: linear fit, simplex search, coefficient fitting."""

import pytest

from vibrafin.calibration import (
    FreeParameter,
    NelderMeadOptions,
    ReferenceDataset,
    ReferenceRecord,
    aggregate_objective,
    bundled_dataset_names,
    fit_linear,
    fit_model_coefficients,
    load_dataset,
    nelder_mead,
)
from vibrafin.errors import ConfigurationError, ObjectiveError, ValidationError


class TestFitLinear:
    def test_two_point_exact_line(self):
        slope, intercept = fit_linear([(3.0, 138.0), (4.0, 144.0)])
        assert slope == pytest.approx(6.0, rel=1e-12)
        assert intercept == pytest.approx(120.0, rel=1e-12)

    def test_identity_line(self):
        slope, intercept = fit_linear([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])
        assert slope == pytest.approx(1.0, rel=1e-12)
        assert intercept == pytest.approx(0.0, abs=1e-12)

    def test_constant_data_zero_slope(self):
        slope, _ = fit_linear([(0.0, 5.0), (1.0, 5.0), (2.0, 5.0)])
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_x_rejected(self):
        with pytest.raises(ValidationError):
            fit_linear([(1.0, 2.0), (1.0, 3.0)])

    def test_needs_two_points(self):
        with pytest.raises(ValidationError):
            fit_linear([(1.0, 2.0)])


def rosenbrock(x):
    return (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2


def grid_refine_minimum(f, lo, hi, rounds=6, n=21):
    """Independent coarse-to-fine grid search oracle."""
    best = None
    span = [(lo[i], hi[i]) for i in range(len(lo))]
    for _ in range(rounds):
        pts0 = [span[0][0] + (span[0][1] - span[0][0]) * i / (n - 1) for i in range(n)]
        pts1 = [span[1][0] + (span[1][1] - span[1][0]) * i / (n - 1) for i in range(n)]
        best = min(((f((a, b)), a, b) for a in pts0 for b in pts1))
        _, a, b = best
        w0 = (span[0][1] - span[0][0]) / (n - 1)
        w1 = (span[1][1] - span[1][0]) / (n - 1)
        span = [(a - w0, a + w0), (b - w1, b + w1)]
    return best[1], best[2]


class TestNelderMead:
    def test_quadratic_bowl(self):
        result = nelder_mead(lambda x: (x[0] - 3.0) ** 2, [0.0])
        assert result.converged
        assert result.parameters["x0"] == pytest.approx(3.0, abs=1e-6)

    def test_rosenbrock_standard_start(self):
        # independent oracle: grid refinement locates the minimum at (1, 1)
        gx, gy = grid_refine_minimum(rosenbrock, (-2.0, -1.0), (2.0, 3.0))
        assert abs(gx - 1.0) < 1e-2 and abs(gy - 1.0) < 1e-2
        result = nelder_mead(rosenbrock, [-1.2, 1.0],
                             NelderMeadOptions(max_iter=5000))
        assert abs(result.parameters["x0"] - 1.0) < 1e-4
        assert abs(result.parameters["x1"] - 1.0) < 1e-4

    def test_constant_objective_returns_start(self):
        result = nelder_mead(lambda x: 7.0, [1.5, -2.5])
        assert result.converged
        assert result.iterations < 60  # only simplex shrinkage, no search
        assert result.parameters == {"x0": 1.5, "x1": -2.5}

    def test_nonfinite_objective_carries_point(self):
        def f(x):
            return float("nan") if x[0] > 5.0 else x[0] ** 2

        with pytest.raises(ObjectiveError) as excinfo:
            nelder_mead(f, [4.9])
        assert excinfo.value.point[0] > 5.0

    def test_deterministic(self):
        a = nelder_mead(rosenbrock, [-1.2, 1.0])
        b = nelder_mead(rosenbrock, [-1.2, 1.0])
        assert a.parameters == b.parameters
        assert a.objective == b.objective
        assert a.iterations == b.iterations

    def test_best_history_monotone_nonincreasing(self):
        result = nelder_mead(rosenbrock, [-1.2, 1.0])
        hist = result.best_history
        assert all(b <= a for a, b in zip(hist, hist[1:]))

    def test_probes_dominated_by_result(self):
        result = nelder_mead(rosenbrock, [-1.2, 1.0])
        assert result.objective <= min(f for _, f in result.probes)

    def test_dimension_check(self):
        with pytest.raises(ValidationError):
            nelder_mead(lambda x: 0.0, [])


class LineBundle:
    """Toy model y = a*x + b for synthetic round trips."""

    def evaluate(self, params, dataset, record):
        return params["a"] * record.inputs["x"] + params["b"]


def line_dataset(a, b, xs=(1.0, 2.0, 3.0, 4.0)):
    records = tuple(
        ReferenceRecord(inputs={"x": x}, target=a * x + b, unit="-",
                        tolerance=0.1, citation="synthetic")
        for x in xs
    )
    return ReferenceDataset(name="line", citation="synthetic", records=records)


class TestFitModelCoefficients:
    def test_synthetic_round_trip(self):
        ds = line_dataset(2.0, 5.0)
        free = [FreeParameter("a", 0.1, 10.0, 1.0), FreeParameter("b", 0.1, 10.0, 1.0)]
        result = fit_model_coefficients([ds], free, LineBundle())
        assert abs(result.parameters["a"] - 2.0) / 2.0 < 0.01
        assert abs(result.parameters["b"] - 5.0) / 5.0 < 0.01
        assert result.objective < 1e-8

    def test_wide_bounds_use_log_scale_and_still_recover(self):
        param = FreeParameter("a", 1e-4, 1e2, 1.0)
        assert param.log_scaled
        ds = line_dataset(0.05, 1.0)
        free = [param, FreeParameter("b", 0.5, 2.0, 1.0)]
        result = fit_model_coefficients([ds], free, LineBundle())
        assert abs(result.parameters["a"] - 0.05) / 0.05 < 0.01

    def test_empty_free_parameters_single_evaluation(self):
        class FixedBundle:
            calls = 0

            def evaluate(self, params, dataset, record):
                FixedBundle.calls += 1
                return 2.0 * record.inputs["x"] + 4.0

        ds = line_dataset(2.0, 5.0)
        result = fit_model_coefficients([ds], [], FixedBundle())
        assert result.iterations == 0
        assert result.converged
        assert FixedBundle.calls == len(ds.records)  # objective evaluated once
        assert result.objective > 0.0

    def test_unresolvable_record_is_configuration_error(self):
        class BrokenBundle:
            def evaluate(self, params, dataset, record):
                raise KeyError("no such scenario")

        ds = line_dataset(2.0, 5.0)
        with pytest.raises(ConfigurationError):
            fit_model_coefficients([ds], [FreeParameter("a", 0.1, 10.0, 1.0)],
                                   BrokenBundle())

    def test_objective_matches_aggregation_of_errors(self):
        ds = line_dataset(2.0, 5.0)
        free = [FreeParameter("a", 0.1, 10.0, 1.0), FreeParameter("b", 0.1, 10.0, 1.0)]
        result = fit_model_coefficients([ds], free, LineBundle())
        recomputed = aggregate_objective(result.per_record_errors)
        assert result.objective == pytest.approx(recomputed, rel=1e-12, abs=1e-300)

    def test_ordering_records_use_hinge(self):
        class GapBundle:
            def evaluate(self, params, dataset, record):
                return params["g"]  # violation when positive

        records = (ReferenceRecord(inputs={}, target=0.0, unit="N", tolerance=0.0,
                                   citation="synthetic", kind="ordering"),)
        ds = ReferenceDataset(name="gap", citation="synthetic", records=records)
        free = [FreeParameter("g", -1.0, 1.0, 0.5)]
        result = fit_model_coefficients([ds], free, GapBundle())
        assert result.parameters["g"] <= 0.0
        assert result.objective == pytest.approx(0.0, abs=1e-12)

    def test_bit_identical_reruns(self):
        ds = line_dataset(2.0, 5.0)
        free = [FreeParameter("a", 0.1, 10.0, 1.0), FreeParameter("b", 0.1, 10.0, 1.0)]
        r1 = fit_model_coefficients([ds], free, LineBundle())
        r2 = fit_model_coefficients([ds], free, LineBundle())
        assert r1.parameters == r2.parameters
        assert r1.objective == r2.objective


class TestBundledDatasets:
    def test_all_load_with_citations(self):
        for name in bundled_dataset_names():
            ds = load_dataset(name)
            assert ds.records
            for record in ds.records:
                assert record.citation

    def test_expected_shapes(self):
        assert len(load_dataset("voltage_frequency").records) == 2
        assert len(load_dataset("resonance_target").records) == 1
        assert len(load_dataset("locomotion_targets").records) == 14
        ordering = load_dataset("thrust_ordering")
        assert len(ordering.records) == 66
        assert all(r.kind == "ordering" for r in ordering.records)

    def test_unknown_dataset(self):
        with pytest.raises(ConfigurationError):
            load_dataset("nope")
