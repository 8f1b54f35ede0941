"""
Tests de la función de onda exacta, el propagador y las formas asintóticas
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from app.core.exceptions import ParameterError, RegimeError
from app.schemas.field import ComplexField, GridSpec
from app.services.bound_states import psi_initial
from app.services.exact import (
    field_norm,
    free_gaussian,
    kernel,
    kernel_free,
    propagate_by_kernel,
    psi_exact,
    psi_exact_mu0,
    psi_farfield,
    psi_longtime,
    psi_shorttime,
    sample_field,
)


def test_identity_quench_is_stationary(figure_grid):
    """
    Test: con μ = 1 la solución es ψ_Bi(x, t) = e^{it − |x|}
    """
    x = figure_grid.points()
    for t in (0.1, 1.0, 10.0):
        assert np.max(np.abs(psi_exact(x, t, 1.0) - psi_initial(x, t))) <= 1e-12


def test_mu0_branch_matches_free_evolution(figure_grid):
    x = figure_grid.points()
    assert np.max(np.abs(psi_exact(x, 0.3, 0.0) - psi_exact_mu0(x, 0.3))) <= 1e-12


def test_small_time_recovers_initial_state():
    """
    Test: ψ(1, 1e-8; μ=3) ≈ e^{−1}
    """
    assert psi_exact(1.0, 1e-8, 3.0) == pytest.approx(math.exp(-1.0), abs=1e-6)


@given(
    st.floats(min_value=0.0, max_value=30.0),
    st.floats(min_value=1e-3, max_value=50.0),
    st.sampled_from([0.0, 0.5, 2.0, 3.0]),
)
@hypothesis_settings(max_examples=100, deadline=None)
def test_parity(x, t, mu):
    """
    Test: ψ(−x, t) = ψ(x, t)
    """
    assert psi_exact(-x, t, mu) == psi_exact(x, t, mu)


@pytest.mark.parametrize("mu", [0.0, 0.5, 3.0])
@pytest.mark.parametrize("t", [0.07, 0.7, 5.0])
def test_norm_is_conserved(mu, t):
    """
    Test: ∫|ψ(x, t)|² = 1 en una caja que contiene la parte dispersiva
    """
    half_width = max(40.0, 10.0 * math.sqrt(t), 60.0 * t)
    field = sample_field(psi_exact, GridSpec.symmetric(half_width, 0.0025), t, mu)
    assert field_norm(field) == pytest.approx(1.0, abs=1e-4)


def test_derivative_jump_at_origin():
    """
    Test: ψ'(0⁺) − ψ'(0⁻) = −2μ·ψ(0, t)
    """
    mu, t, delta = 3.0, 0.3, 1e-4
    psi0, psi1, psi2 = (psi_exact(k * delta, t, mu) for k in (0, 1, 2))
    jump = 2.0 * (-3.0 * psi0 + 4.0 * psi1 - psi2) / (2.0 * delta)
    assert abs(jump + 2.0 * mu * psi0) <= 1e-5


def test_values_stay_finite_for_large_times():
    x = np.array([0.0, 1.0, 10.0, 100.0])
    for mu in (0.0, 0.5, 3.0):
        assert np.all(np.isfinite(psi_exact(x, 1e5, mu)))


def test_non_positive_time_is_rejected():
    with pytest.raises(ParameterError):
        psi_exact(0.0, 0.0, 3.0)
    with pytest.raises(ParameterError):
        psi_exact(0.0, -1.0, 3.0)
    with pytest.raises(ParameterError):
        psi_exact(0.0, 1.0, -0.5)


def test_kernel_reduces_to_free_kernel():
    assert kernel(0.3, -0.2, 0.5, 0.0) == kernel_free(0.3, -0.2, 0.5)
    # K es simétrico en x ↔ x'
    assert kernel(0.3, -1.2, 0.5, 3.0) == pytest.approx(kernel(-1.2, 0.3, 0.5, 3.0), abs=1e-15)


@pytest.mark.parametrize("x", [0.0, 0.5, 2.0])
def test_kernel_propagation_matches_closed_form(x):
    """
    Test: ∫K·ψ_Bi por cuadratura coincide con la forma cerrada
    """
    assert abs(propagate_by_kernel(psi_initial, x, 0.3, 3.0) - psi_exact(x, 0.3, 3.0)) <= 1e-6


def test_kernel_propagation_of_sampled_field():
    """
    Test: el estado inicial como ComplexField se interpola y propaga igual
    """
    grid = GridSpec.symmetric(20.0, 0.01)
    field = ComplexField(grid=grid, values=psi_initial(grid.points()), time=0.0, mu=1.0)
    assert abs(propagate_by_kernel(field, 0.5, 0.3, 3.0) - psi_exact(0.5, 0.3, 3.0)) <= 1e-5


def test_semigroup_with_callable_source():
    """
    Test: propagar ψ(·, 0.1) durante 0.2 da ψ(·, 0.3)
    """
    for x in (0.0, 0.5):
        evolved = propagate_by_kernel(lambda xp: psi_exact(xp, 0.1, 3.0), x, 0.2, 3.0)
        assert abs(evolved - psi_exact(x, 0.3, 3.0)) <= 1e-5


def test_semigroup_with_evolved_field():
    """
    Test: el mismo semigrupo partiendo de ψ(·, 0.1) muestreada en [−50, 50] con h = 0.005
    """
    field = sample_field(psi_exact, GridSpec.symmetric(50.0, 0.005), 0.1, 3.0)
    evolved = propagate_by_kernel(field, 0.5, 0.2, 3.0)
    assert abs(evolved - psi_exact(0.5, 0.3, 3.0)) <= 1e-5


def test_farfield_form():
    """
    Test: forma lejana en x = 20, t = 1 y decaimiento |ψ| ∝ x⁻²
    """
    for mu in (0.0, 3.0):
        assert abs(psi_farfield(20.0, 1.0, mu) / psi_exact(20.0, 1.0, mu) - 1.0) <= 2e-2
    scaled = np.array([abs(psi_exact(x, 1.0, 0.0)) * x**2 for x in (20.0, 40.0, 80.0)])
    assert np.ptp(scaled) / np.mean(scaled) <= 2e-2
    ratio = abs(psi_exact(30.0, 1.0, 0.0)) ** 2 / abs(psi_exact(60.0, 1.0, 0.0)) ** 2
    assert ratio == pytest.approx(16.0, rel=0.05)


def test_asymptotic_forms_guard_their_domain(figure_grid):
    """
    Test: fuera de dominio, strict levanta RegimeError y sample_field deja NaN
    """
    with pytest.raises(RegimeError):
        psi_farfield(1.0, 1.0, 3.0)
    with pytest.raises(RegimeError):
        psi_shorttime(0.1, 0.01, 3.0)
    with pytest.raises(RegimeError):
        psi_longtime(5.0, 20.0, 3.0)

    field = sample_field(psi_farfield, figure_grid, 1.0, 3.0)
    x = figure_grid.points()
    outside = x**2 <= 25.0
    assert np.all(np.isnan(field.values[outside]))
    assert np.all(np.isfinite(field.values[~outside]))


@pytest.mark.parametrize("mu", [0.0, 3.0])
def test_shorttime_form(mu):
    assert abs(psi_shorttime(10.0, 0.01, mu) / psi_exact(10.0, 0.01, mu) - 1.0) <= 1e-2


def test_longtime_form():
    """
    Test: a t = 500 queda el estado ligado final con coeficiente 2μ/(1+μ)
    """
    assert abs(psi_longtime(0.0, 500.0, 3.0) - psi_exact(0.0, 500.0, 3.0)) <= 1e-4
    assert abs(psi_exact(0.0, 500.0, 3.0)) == pytest.approx(1.5, abs=1e-3)
    with pytest.raises(ParameterError):
        psi_longtime(0.0, 500.0, 0.0)


def test_sample_field_at_time_zero_is_initial_state(figure_grid):
    field = sample_field(psi_exact, figure_grid, 0.0, 3.0)
    assert np.array_equal(field.values, psi_initial(figure_grid.points(), 0.0))
    assert field.time == 0.0 and field.mu == 3.0


def test_free_gaussian(gaussian_scale):
    """
    Test: la gaussiana libre cerrada parte de e^{−x²} y conserva la norma
    """
    grid = GridSpec.symmetric(60.0, 0.01)
    x = grid.points()
    assert np.max(np.abs(free_gaussian(x, 0.0) - np.exp(-(x**2)))) <= 1e-15
    norms = [
        field_norm(ComplexField(grid=grid, values=gaussian_scale * free_gaussian(x, t, 1.0), time=t, mu=0.0))
        for t in (0.0, 2.0)
    ]
    assert norms[0] == pytest.approx(1.0, abs=1e-10)
    assert norms[1] == pytest.approx(norms[0], abs=1e-10)
