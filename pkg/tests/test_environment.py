import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from primordial_qg.environment import (CouplingKernel, Species, ThermalEnvironment, dispersion,
                                       occupation, potential_fourier, potential_fourier_numeric,
                                       radial_weight)
from primordial_qg.errors import DomainError

PHOTON = ThermalEnvironment.photon(1.0)
FERMION = ThermalEnvironment.fermion(1.0, 1.0)
UNIT = CouplingKernel(1.0)


def test_photon_occupation_spot_value():
    expected = 1.0 / (math.pi**2 * (math.e - 1.0))
    assert occupation(PHOTON, 1.0) == pytest.approx(expected, rel=1e-15)
    assert occupation(PHOTON, 1.0) == pytest.approx(0.0589665688, rel=1e-9)


@pytest.mark.parametrize("q", [1e-3, 1e-6, 1e-9])
def test_photon_occupation_small_q(q):
    series = q / math.pi**2 * (1.0 - q / 2 + q * q / 12)
    assert occupation(PHOTON, q) == pytest.approx(series, rel=1e-9)


def test_fermion_occupation_limits():
    assert occupation(FERMION, 1e-12) == pytest.approx(0.5, abs=1e-12)
    assert occupation(FERMION, 2.0) == pytest.approx(1.0 / (1.0 + math.e**2), rel=1e-15)
    assert occupation(FERMION, 1e3) == 0.0


def test_occupation_large_argument_is_finite():
    assert occupation(PHOTON, 1e4) == 0.0
    assert np.all(np.isfinite(occupation(PHOTON, np.array([1e-300, 1.0, 1e300]))))


@pytest.mark.parametrize("env", [PHOTON, FERMION])
@pytest.mark.parametrize("q", [0.0, -1.0])
def test_non_positive_momentum_rejected(env, q):
    with pytest.raises(DomainError):
        occupation(env, q)
    with pytest.raises(DomainError):
        radial_weight(env, UNIT, q)


def test_dispersion_laws():
    assert dispersion(PHOTON, 2.5) == 2.5
    assert np.all(dispersion(FERMION, np.array([0.1, 3.0])) == 1.0)


def test_environment_invariants():
    with pytest.raises(DomainError):
        ThermalEnvironment.photon(0.0)
    with pytest.raises(DomainError):
        ThermalEnvironment(Species.FERMION, 1.0)
    with pytest.raises(DomainError):
        ThermalEnvironment(Species.PHOTON, 1.0, 2.0)
    with pytest.raises(DomainError):
        CouplingKernel(0.0)
    with pytest.raises(DomainError):
        CouplingKernel(1.0, -1.0)
    assert ThermalEnvironment.photon_at(2.7).beta == pytest.approx(1.416784e32 / 2.7, rel=1e-6)


def test_potential_fourier_values():
    assert potential_fourier(UNIT, 2.0) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-15)
    assert potential_fourier(CouplingKernel(1.0, 1.0), 1.0) == pytest.approx(1.0 / (2.0 * math.pi))
    with pytest.raises(DomainError):
        potential_fourier(UNIT, 0.0)


@pytest.mark.parametrize("k, lam", [(1.3, 0.5), (0.2, 1.0), (3.0, 0.1)])
def test_potential_fourier_against_radial_quadrature(k, lam):
    kernel = CouplingKernel(1.0, lam)
    assert potential_fourier_numeric(kernel, k) == pytest.approx(potential_fourier(kernel, k), rel=1e-8)


def test_numeric_transform_needs_damping():
    with pytest.raises(DomainError):
        potential_fourier_numeric(UNIT, 1.0)


def test_radial_weight_spot_value():
    n = 1.0 / (math.pi**2 * (math.e - 1.0))
    expected = 4.0 / math.pi**2 * n * (n + 1.0)
    assert radial_weight(PHOTON, UNIT, 1.0) == pytest.approx(expected, rel=1e-14)
    assert radial_weight(PHOTON, UNIT, 1.0) == pytest.approx(0.025307448, rel=1e-8)


@given(st.floats(1e-4, 50.0), st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_photon_weight_cancellation(q, beta, mass):
    env = ThermalEnvironment.photon(beta)
    n = occupation(env, q)
    w = radial_weight(env, CouplingKernel(mass), q)
    assert w * math.pi**2 / (4 * mass**2) == pytest.approx(n * (n + 1), rel=1e-13)


@given(st.floats(1e-3, 30.0))
def test_weights_positive(q):
    assert radial_weight(PHOTON, UNIT, q) > 0
    assert radial_weight(FERMION, UNIT, q) > 0


def test_weights_vanish_at_large_q():
    assert radial_weight(PHOTON, UNIT, 200.0) < 1e-80
    assert radial_weight(FERMION, UNIT, 60.0) < 1e-300


def test_fermion_weight_diverges_as_inverse_square():
    q = np.array([1e-3, 1e-5, 1e-7])
    scaled = q**2 * radial_weight(FERMION, UNIT, q)
    assert np.allclose(scaled, 4.0 / math.pi**2 * 0.75, rtol=1e-5)


@given(st.floats(0.01, 20.0), st.floats(0.1, 5.0))
def test_photon_weight_increases_with_temperature(q, beta):
    hot = ThermalEnvironment.photon(beta / 2)
    cold = ThermalEnvironment.photon(beta)
    assert radial_weight(hot, UNIT, q) > radial_weight(cold, UNIT, q)


def test_array_input_preserves_shape():
    q = np.linspace(0.1, 2.0, 7).reshape(7, 1)
    assert np.shape(radial_weight(PHOTON, UNIT, q)) == (7, 1)
    assert isinstance(radial_weight(PHOTON, UNIT, 1.0), float)
