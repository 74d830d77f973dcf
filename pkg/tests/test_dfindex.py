import numpy as np
import pytest

from lfl.exceptions import NotPositiveError
from lfl.models.foliation import ModelKind, build_model
from lfl.models.metric import MetricPreset
from lfl.services.dfindex import (
    MEAN_TRACE_REASON,
    exponent_bisection_oracle,
    exponent_bound,
    exponent_of_metric,
    pointwise_s,
)
from lfl.services.forms import MetricField
from lfl.services.metric_generator import preset_metric, seeded_fourier_metric

from conftest import grid


@pytest.fixture
def patch5():
    return build_model(2, ModelKind.OPEN_PATCH, grid(9, n=2))


def perturbed_quadratic(model, seed, amplitude=0.01):
    base = preset_metric(model, MetricPreset.QUADRATIC).u
    return MetricField(base + seeded_fourier_metric(model, seed, 1, amplitude).u)


class TestAnalyticExponents:
    def test_patch_quadratic_n1(self, patch):
        report = exponent_of_metric(patch, preset_metric(patch, MetricPreset.QUADRATIC))
        assert report.feasible
        assert report.eta == pytest.approx(1 / 3, abs=1e-6)
        assert report.s_max == pytest.approx(2.0, abs=1e-9)
        assert report.argmax_point[:2] in {(0, 0), (0, 20), (20, 0), (20, 20)}

    def test_patch_quadratic_n2(self, patch5):
        report = exponent_of_metric(patch5, preset_metric(patch5, MetricPreset.QUADRATIC))
        assert report.eta == pytest.approx(1 / 5, abs=1e-6)

    def test_zero_metric_on_torus(self, torus, zero_metric):
        report = exponent_of_metric(torus, zero_metric(torus))
        assert not report.feasible
        assert report.eta == 0.0
        assert report.reason == MEAN_TRACE_REASON
        assert abs(report.mean_trace_theta) <= 1e-10

    @pytest.mark.parametrize("seed", range(5))
    def test_seeded_torus_metrics_are_infeasible(self, sheared_torus, seed):
        report = exponent_of_metric(sheared_torus, seeded_fourier_metric(sheared_torus, seed, 3, 0.5))
        assert report.eta == 0.0
        assert report.min_theta_eig < 0
        assert abs(report.mean_trace_theta) <= 1e-10

    def test_infeasible_patch_reason(self, patch):
        report = exponent_of_metric(patch, MetricField(-preset_metric(patch, MetricPreset.QUADRATIC).u))
        assert report.eta == 0.0
        assert report.reason != MEAN_TRACE_REASON


class TestBisectionOracle:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches_closed_form(self, patch, seed):
        m = perturbed_quadratic(patch, seed)
        closed = exponent_of_metric(patch, m)
        assert closed.feasible
        assert exponent_bisection_oracle(patch, m, tol=1e-8) == pytest.approx(closed.eta, abs=1e-6)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_closed_form_n2(self, patch5, seed):
        m = perturbed_quadratic(patch5, seed)
        closed = exponent_of_metric(patch5, m)
        assert exponent_bisection_oracle(patch5, m, tol=1e-8) == pytest.approx(closed.eta, abs=1e-6)

    def test_infeasible_gives_zero(self, torus, zero_metric):
        assert exponent_bisection_oracle(torus, zero_metric(torus)) == 0.0

    def test_patch_quadratic(self, patch):
        m = preset_metric(patch, MetricPreset.QUADRATIC)
        assert exponent_bisection_oracle(patch, m, tol=1e-9) == pytest.approx(1 / 3, abs=1e-6)

    def test_tolerance_must_be_positive(self, patch):
        with pytest.raises(ValueError):
            exponent_bisection_oracle(patch, preset_metric(patch, MetricPreset.QUADRATIC), tol=0.0)


class TestPointwiseS:
    def test_quadratic(self, patch):
        s = pointwise_s(patch, preset_metric(patch, MetricPreset.QUADRATIC))
        x, y, _ = patch.mesh()
        np.testing.assert_allclose(s, x**2 + y**2, atol=1e-12)

    def test_not_positive(self, torus, seeded_metric):
        with pytest.raises(NotPositiveError) as info:
            pointwise_s(torus, seeded_metric(torus))
        assert len(info.value.point) == 3
        assert info.value.value < 0


def test_exponent_bound(torus, torus5, patch):
    assert exponent_bound(torus) == 0.5
    assert exponent_bound(torus5) == pytest.approx(1 / 3)
    assert exponent_bound(patch) is None


@pytest.mark.parametrize("seed", range(3))
def test_leafwise_constant_gauge(patch, seed):
    m = perturbed_quadratic(patch, seed)
    t = patch.mesh()[2]
    shifted = MetricField(m.u + np.sin(3 * t) + 2.0)
    assert exponent_of_metric(patch, shifted).eta == pytest.approx(exponent_of_metric(patch, m).eta, abs=1e-12)


class TestMonotonicity:
    def test_equal_metrics_give_identical_reports(self, patch):
        m = perturbed_quadratic(patch, 4)
        again = MetricField(m.u.copy())
        assert exponent_of_metric(patch, again).model_dump() == exponent_of_metric(patch, m).model_dump()

    @pytest.mark.parametrize("factor", [0.25, 0.5, 0.9])
    def test_smaller_s_gives_larger_eta(self, patch, factor):
        m = preset_metric(patch, MetricPreset.QUADRATIC)
        scaled = MetricField(factor * m.u)
        s, s_scaled = pointwise_s(patch, m), pointwise_s(patch, scaled)
        assert np.all(s_scaled <= s + 1e-12)
        eta, eta_scaled = exponent_of_metric(patch, m).eta, exponent_of_metric(patch, scaled).eta
        assert eta_scaled >= eta
        assert eta_scaled == pytest.approx(1 / (1 + 2 * factor), abs=1e-9)
