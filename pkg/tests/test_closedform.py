import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import eval_genlaguerre

from blockcirc.closedform import (
    DensityModel,
    density,
    density_coefficients,
    phi,
    phi_derivatives,
    phi_numeric_transform_check,
    phi_ode_residual,
    phi_series,
    quadrature_moment,
    sup_distance_to_wigner,
    wigner_convergence,
    wigner_density,
)
from blockcirc.moments import limiting_moment


def test_phi_1_is_gaussian():
    t = np.linspace(-6, 6, 121)
    assert np.max(np.abs(phi(1, t) - np.exp(-t * t / 2))) <= 1e-12


@pytest.mark.parametrize("m", range(1, 33))
def test_phi_at_zero(m):
    assert phi(m, 0.0) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("m", [2, 3, 5, 8, 13])
def test_phi_matches_library_laguerre(m):
    t = np.linspace(0, 4, 41)
    ref = np.exp(-t * t / (2 * m)) * eval_genlaguerre(m - 1, 1, t * t / m) / m
    assert np.max(np.abs(phi(m, t) - ref)) < 1e-12


@pytest.mark.parametrize("m", [1, 2, 3, 8, 20])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_phi_ode(m, t):
    assert abs(phi_ode_residual(m, t)) <= 1e-6


def test_phi_derivatives_finite_difference():
    h = 1e-5
    for m in (2, 6):
        f0, f1, f2 = phi_derivatives(m, 1.3)
        assert f0 == pytest.approx(phi(m, 1.3), abs=1e-14)
        assert f1 == pytest.approx((phi(m, 1.3 + h) - phi(m, 1.3 - h)) / (2 * h), abs=1e-8)
        assert f2 == pytest.approx((phi(m, 1.3 + h) - 2 * f0 + phi(m, 1.3 - h)) / h**2, abs=1e-4)


@pytest.mark.parametrize("m", [2, 3, 4, 8, 16, 32])
def test_phi_series_form(m):
    t = np.linspace(-3, 3, 61)
    assert np.max(np.abs(phi_series(m, t, terms=20) - phi(m, t))) <= 1e-8


def test_phi_series_form_m1_needs_more_terms():
    t = np.linspace(-3, 3, 61)
    assert np.max(np.abs(phi_series(1, t, terms=30) - phi(1, t))) <= 1e-8


def test_density_m1_is_gaussian():
    x = np.linspace(-5, 5, 101)
    assert np.allclose(density(1, x), np.exp(-x * x / 2) / math.sqrt(2 * math.pi), atol=1e-15)
    assert density(1, 0.0) == pytest.approx(0.39894, abs=1e-5)


def test_density_coefficients_m2():
    # f_2(x) = e^{-x^2} (1 + 2 x^2) / (2 sqrt pi)
    assert density_coefficients(2) == (1, 1)
    x = np.linspace(-3, 3, 31)
    ref = np.exp(-x * x) * (1 + 2 * x * x) / (2 * math.sqrt(math.pi))
    assert np.allclose(density(2, x), ref, atol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 4, 8, 16])
def test_density_normalisation(m):
    assert quadrature_moment(m, 0) == pytest.approx(1.0, abs=1e-8)
    assert quadrature_moment(m, 2) == pytest.approx(1.0, abs=1e-8)


def test_fourth_moment_m2():
    assert quadrature_moment(2, 4) == pytest.approx(2.25, abs=1e-8)


@pytest.mark.parametrize("m", [1, 2, 5, 20, 64, 128])
def test_density_positive_and_even(m):
    x = np.arange(-500, 501) / 100
    f = density(m, x)
    assert np.all(f >= 0)
    assert np.array_equal(f, density(m, -x))


@pytest.mark.parametrize("m", [1, 2, 4, 16, 64, 128])
def test_unbounded_support(m):
    assert density(m, 4.0) > 0


def test_density_model_callable():
    model = DensityModel(3)
    assert model(0.7) == density(3, 0.7)
    assert len(model.coefficients) == 3


def test_density_rejects_bad_m():
    with pytest.raises(ValueError):
        density_coefficients(0)
    with pytest.raises(ValueError):
        phi(0, 1.0)


def test_wigner_density_values():
    assert wigner_density(0.0) == pytest.approx(1 / math.pi)
    assert wigner_density(2.0) == 0.0
    assert wigner_density(-2.0) == 0.0
    assert wigner_density(3.0) == 0.0


@pytest.mark.parametrize("n,expected", [(0, 1), (2, 1), (4, 2), (6, 5)])
def test_wigner_moments(n, expected):
    val = quad(lambda x: x**n * wigner_density(x), -2, 2, epsabs=1e-13, epsrel=1e-13)[0]
    assert val == pytest.approx(expected, abs=1e-8)


def test_sup_distance_m1():
    d = sup_distance_to_wigner(1)
    assert d >= 1 / math.sqrt(2 * math.pi) - 1 / math.pi - 1e-12
    assert d == pytest.approx(0.0812, abs=1e-3)


def test_sup_distance_grid_checked():
    with pytest.raises(ValueError):
        sup_distance_to_wigner(4, np.linspace(-2, 2, 401))
    with pytest.raises(ValueError):
        sup_distance_to_wigner(4, np.linspace(-3, 3, 61))


def test_wigner_convergence_decreasing():
    dist, slope = wigner_convergence()
    assert np.all(np.diff(dist) < 0)
    assert slope <= -0.15


@pytest.mark.parametrize("m,tol", [(1, 1e-6), (2, 1e-5), (16, 1e-4)])
def test_numeric_transform(m, tol):
    assert phi_numeric_transform_check(m) <= tol


def test_numeric_transform_range():
    with pytest.raises(ValueError):
        phi_numeric_transform_check(33)


@pytest.mark.parametrize("m", [3, 5, 7])
def test_quadrature_moments_other_m(m):
    for k in range(1, 5):
        assert quadrature_moment(m, 2 * k) == pytest.approx(float(limiting_moment(k, m)), abs=1e-6)
