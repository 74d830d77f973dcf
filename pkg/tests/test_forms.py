import math

import numpy as np
import pytest

from lfl.exceptions import GridMismatchError, NumericalError
from lfl.models.foliation import ModelKind, build_model
from lfl.models.metric import MetricPreset
from lfl.services.forms import (
    MetricField,
    alpha_form,
    alpha_vector,
    boundary_form,
    bulk_density_determinant,
    bulk_form,
    eta_form,
    theta_form,
    theta_matrix,
    transverse_coframe,
)
from lfl.services.metric_generator import preset_metric, seeded_fourier_metric

from conftest import GOLDEN_SHEAR, grid


class TestMetricField:
    def test_rejects_complex_and_non_finite(self):
        with pytest.raises(GridMismatchError):
            MetricField(np.zeros((4, 4, 4), dtype=complex))
        with pytest.raises(NumericalError):
            MetricField(np.full((4, 4, 4), np.inf))

    def test_off_grid(self, torus):
        with pytest.raises(GridMismatchError):
            alpha_vector(torus, MetricField(np.zeros((8, 8, 8))))

    def test_overflowing_h(self, torus):
        m = preset_metric(torus, MetricPreset.COSINE, epsilon=800.0)
        with pytest.raises(NumericalError):
            m.h
        with pytest.raises(NumericalError):
            eta_form(torus, m)


class TestAnalyticMetrics:
    def test_zero_metric(self, torus, zero_metric):
        m = zero_metric(torus)
        assert alpha_form(torus, m).sup_norm() == 0.0
        assert theta_form(torus, m)[0].sup_norm() == 0.0
        eta = eta_form(torus, m)
        assert eta.indices == [(2,)]
        np.testing.assert_array_equal(eta.components[(2,)], 1.0)

    def test_patch_quadratic(self, patch):
        m = preset_metric(patch, MetricPreset.QUADRATIC)
        x, y, _ = patch.mesh()
        np.testing.assert_allclose(alpha_vector(patch, m).values[0], -(x - 1j * y), atol=1e-12)
        np.testing.assert_allclose(theta_matrix(patch, m).values[0, 0], 1.0, atol=1e-12)

    def test_torus_cosine(self, torus):
        eps = 0.1
        m = preset_metric(torus, MetricPreset.COSINE, epsilon=eps)
        x = torus.mesh()[0]
        np.testing.assert_allclose(
            alpha_vector(torus, m).values[0], -eps * np.pi * np.sin(2 * np.pi * x), atol=1e-12
        )
        np.testing.assert_allclose(
            theta_matrix(torus, m).values[0, 0], eps * np.pi**2 * np.cos(2 * np.pi * x), atol=1e-11
        )

    def test_theta_form_is_i_theta_real(self, torus, seeded_metric):
        theta, matrix = theta_form(torus, seeded_metric(torus))
        # Theta dz ^ dzbar = -2i Theta dx ^ dy
        np.testing.assert_allclose(theta.components[(0, 1)], -2j * matrix.values[0, 0])

    def test_transverse_coframe_sheared(self, sheared_torus):
        dtau = transverse_coframe(sheared_torus)
        np.testing.assert_array_equal(dtau.components[(1,)], -GOLDEN_SHEAR)
        np.testing.assert_array_equal(dtau.components[(2,)], 1.0)


class TestThetaMatrix:
    def test_hermitian_n2(self, torus5, seeded_metric):
        theta = theta_matrix(torus5, seeded_metric(torus5, cutoff=1)).values
        np.testing.assert_array_equal(theta, np.conj(np.swapaxes(theta, 0, 1)))

    def test_min_eigenvalue_matches_dense_solver(self, torus5, seeded_metric):
        theta = theta_matrix(torus5, seeded_metric(torus5, seed=4, cutoff=1))
        dense = np.linalg.eigvalsh(np.moveaxis(theta.values, (0, 1), (-2, -1)))[..., 0]
        np.testing.assert_allclose(theta.min_eigenvalue(), dense, atol=1e-12)

    def test_mean_trace_vanishes_on_torus(self, torus, seeded_metric):
        theta = theta_matrix(torus, seeded_metric(torus, seed=9))
        assert abs(np.mean(theta.trace())) <= 1e-10


class TestBulkAndBoundary:
    @pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 3.0])
    def test_determinant_shortcut_n1(self, sheared_torus, seeded_metric, c):
        m = seeded_metric(sheared_torus, seed=2)
        top = bulk_form(sheared_torus, m, c).components[(0, 1, 2)]
        shortcut = bulk_density_determinant(sheared_torus, m, c)
        np.testing.assert_allclose(top.real, shortcut, atol=1e-12 * np.max(np.abs(shortcut)))
        assert np.max(np.abs(top.imag)) <= 1e-12 * np.max(np.abs(shortcut))

    def test_determinant_shortcut_n2(self, torus5, seeded_metric):
        m = seeded_metric(torus5, seed=5, cutoff=1)
        top = bulk_form(torus5, m, 0.5).components[tuple(range(5))]
        shortcut = bulk_density_determinant(torus5, m, 0.5)
        np.testing.assert_allclose(top.real, shortcut, atol=1e-11 * np.max(np.abs(shortcut)))

    def test_degrees(self, torus5, seeded_metric):
        m = seeded_metric(torus5, cutoff=1)
        assert bulk_form(torus5, m, 0.5).degree == 5
        assert boundary_form(torus5, m, 0.5).degree == 4

    def test_boundary_n1_is_i_alpha_wedge_eta(self, torus, seeded_metric):
        m = seeded_metric(torus, seed=6)
        boundary = boundary_form(torus, m, 1.0)
        alpha = alpha_vector(torus, m).values[0]
        # i alpha (dx + i dy) ^ h dt
        np.testing.assert_allclose(boundary.components[(0, 2)], 1j * alpha * m.h)
        np.testing.assert_allclose(boundary.components[(1, 2)], -alpha * m.h)

    def test_patch_quadratic_density(self):
        model = build_model(1, ModelKind.OPEN_PATCH, grid(11))
        m = preset_metric(model, MetricPreset.QUADRATIC)
        x, y, _ = model.mesh()
        # 2 (1 - c |z|^2) e^u with u = -|z|^2
        expected = 2 * (1 - 0.5 * (x**2 + y**2)) * np.exp(-(x**2 + y**2))
        np.testing.assert_allclose(bulk_density_determinant(model, m, 0.5), expected, atol=1e-12)

    def test_negative_c_rejected(self, torus, seeded_metric):
        with pytest.raises(ValueError):
            bulk_form(torus, seeded_metric(torus), -1.0)
        with pytest.raises(ValueError):
            bulk_form(torus, seeded_metric(torus), math.inf)


def test_seeded_metric_is_real(torus):
    m = seeded_fourier_metric(torus, 1, 3, 0.1)
    assert m.u.dtype == np.float64


@pytest.mark.parametrize("seed", range(3))
def test_leafwise_constant_gauge(torus, seeded_metric, seed):
    m = seeded_metric(torus, seed=seed)
    phi = 0.3 * np.sin(2 * np.pi * torus.mesh()[torus.t_axis]) + 0.5
    shifted = MetricField(m.u + phi)

    alpha, alpha_shifted = alpha_vector(torus, m).values, alpha_vector(torus, shifted).values
    theta, theta_shifted = theta_matrix(torus, m).values, theta_matrix(torus, shifted).values
    np.testing.assert_allclose(alpha_shifted, alpha, rtol=0, atol=1e-12 * (1 + np.max(np.abs(alpha))))
    np.testing.assert_allclose(theta_shifted, theta, rtol=0, atol=1e-12 * (1 + np.max(np.abs(theta))))

    eta, eta_shifted = eta_form(torus, m), eta_form(torus, shifted)
    assert eta_shifted.indices == eta.indices
    for index in eta.indices:
        np.testing.assert_allclose(eta_shifted.components[index], np.exp(phi) * eta.components[index], rtol=1e-13)
