"""
Thermal baths and the gravitational coupling kernel.

Everything in this module is in natural units (hbar = c = G = k_B = 1).
Functions accept scalars or numpy arrays of momenta.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import units
from .errors import DomainError
from .quadrature import integrate


class Species(enum.Enum):
    PHOTON = "photon"
    FERMION = "fermion"


@dataclass(frozen=True)
class ThermalEnvironment:
    """A thermal bath at inverse temperature ``beta``.

    Photons use the Planck occupation with dispersion eps_q = q.
    Non-relativistic fermions of mass ``fermion_mass`` use the Fermi-Dirac
    occupation with eps_q = m.
    """

    species: Species
    beta: float
    fermion_mass: Optional[float] = None

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if self.species is Species.FERMION:
            if self.fermion_mass is None or not self.fermion_mass > 0:
                raise DomainError("a fermion bath needs a positive fermion_mass")
        elif self.fermion_mass is not None:
            raise DomainError("fermion_mass only applies to fermion baths")

    @classmethod
    def photon(cls, beta):
        return cls(Species.PHOTON, float(beta))

    @classmethod
    def fermion(cls, beta, mass):
        return cls(Species.FERMION, float(beta), float(mass))

    @classmethod
    def photon_at(cls, temperature_k):
        return cls.photon(units.beta_from_kelvin(temperature_k))


@dataclass(frozen=True)
class CouplingKernel:
    """Newtonian coupling of a system of mass M, with optional Yukawa damping."""

    system_mass: float
    yukawa_lambda: float = 0.0

    def __post_init__(self):
        if not self.system_mass > 0:
            raise DomainError(f"system_mass must be positive, got {self.system_mass}")
        if self.yukawa_lambda < 0:
            raise DomainError("yukawa_lambda must be non-negative")


def _positive(q, name="q"):
    q = np.asarray(q, dtype=float)
    if np.any(~(q > 0)):
        raise DomainError(f"{name} must be positive")
    return q


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def occupation(env, q):
    """Thermal occupation n_q of the bath at momentum ``q``.

    Photon: q^2 / (pi^2 (exp(beta q) - 1)), the Planck number density.
    Fermion: 1 / (1 + exp(beta q^2 / 2m)).
    """
    q = _positive(q)
    if env.species is Species.PHOTON:
        x = env.beta * q
        # log form keeps q^2 and exp(-x) from overflowing separately
        log_n = 2.0 * np.log(q) - x - np.log(math.pi**2 * -np.expm1(-x))
        n = np.exp(log_n)
    else:
        x = env.beta * q**2 / (2.0 * env.fermion_mass)
        n = np.exp(-np.logaddexp(0.0, x))
    return _scalar_or_array(n)


def dispersion(env, q):
    """Energy eps_q carried into the coupling."""
    q = _positive(q)
    if env.species is Species.PHOTON:
        return _scalar_or_array(q)
    return _scalar_or_array(np.full_like(q, env.fermion_mass))


def potential_fourier(kernel, k):
    """Fourier transform nu(k) = M / (pi (k^2 + lambda^2)) of the potential."""
    k = _positive(k, "k")
    nu = kernel.system_mass / (math.pi * (k**2 + kernel.yukawa_lambda**2))
    return _scalar_or_array(nu)


def potential_fourier_numeric(kernel, k, rel_tol=1e-10):
    """Radial quadrature of the Yukawa-damped transform.

    Evaluates (M / 2 pi) int_0^inf dx x int_{-1}^{1} dt exp(-i k x t - lambda x)
    with the angular integral done analytically, i.e.
    (M / pi k) int_0^inf sin(k x) exp(-lambda x) dx.  Requires lambda > 0.
    """
    k = float(k)
    lam = kernel.yukawa_lambda
    if not k > 0:
        raise DomainError("k must be positive")
    if not lam > 0:
        raise DomainError("the radial integral only converges for yukawa_lambda > 0")
    upper = 60.0 / lam
    zeros = np.arange(1, int(k * upper / math.pi) + 1) * (math.pi / k)
    result = integrate(lambda x: np.sin(k * x) * np.exp(-lam * x), 0.0, upper,
                       rel_tol=rel_tol, breakpoints=zeros, vectorized=True,
                       max_evaluations=2_000_000)
    return kernel.system_mass / (math.pi * k) * result.value


def radial_weight(env, kernel, q):
    """Spectral weight w(q) = (4 M^2 / pi^2) (eps_q^2 / q^2) n_q (n_q + 1).

    Integrating w over q in (0, inf) gives the purity-decay bound Gamma_0.
    For photons eps_q = q cancels the 1/q^2; for fermions w ~ q^-2 at small q.
    """
    q = _positive(q)
    n = np.asarray(occupation(env, q))
    eps = np.asarray(dispersion(env, q))
    w = 4.0 * kernel.system_mass**2 / math.pi**2 * (eps / q) ** 2 * n * (n + 1.0)
    return _scalar_or_array(w)
