"""
Upper bounds on the purity-decay rate of a massive particle in a thermal bath.

Masses and temperatures are accepted either as plain SI numbers (kg, K) or
as :class:`~primordial_qg.units.PhysicalQuantity` objects in either unit
system; everything is converted to natural units at the boundary.
"""
from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import units
from .environment import CouplingKernel, ThermalEnvironment, radial_weight
from .errors import DomainError
from .quadrature import integrate, integrate_semi_infinite, riemann_zeta
from .units import Dimension

SWEEP_HEADER = ("temperature_K", "gamma0_per_s", "t001_s")


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    FERMION_CUTOFF = "fermion_cutoff"


@dataclass(frozen=True)
class DecoherenceSummary:
    gamma0: float        # natural units
    gamma0_si: float     # s^-1
    t_fraction: float    # s, time for the purity to drop by purity_drop
    purity_drop: float
    method: Method


@dataclass(frozen=True)
class SpreadBound:
    """D = <x^2>_rho tr(rho^2), in natural units of length squared."""

    D: float

    def __post_init__(self):
        if not self.D > 0:
            raise DomainError(f"D must be positive, got {self.D}")

    @classmethod
    def from_moments(cls, second_moment, purity):
        return cls(second_moment * purity)

    @property
    def cutoff(self):
        """Momentum 1/sqrt(D) separating the small-q and large-q regimes."""
        return 1.0 / math.sqrt(self.D)


class SweepRow(NamedTuple):
    temperature_K: float
    gamma0_per_s: float
    t001_s: float


def decoherence_time(rate, purity_drop=0.01):
    """Time for tr(rho^2) to fall by the fraction ``purity_drop`` at ``rate``.

    Returns -ln(1 - purity_drop) / rate, in the reciprocal units of ``rate``.
    """
    if not rate > 0:
        raise DomainError(f"rate must be positive, got {rate}")
    if not 0.0 < purity_drop < 1.0:
        raise DomainError(f"purity_drop must lie in (0, 1), got {purity_drop}")
    return -math.log1p(-purity_drop) / rate


def _mass(mass):
    m = units.natural_value(mass, Dimension.MASS)
    if m < 0 or not math.isfinite(m):
        raise DomainError(f"mass must be non-negative, got {mass!r}")
    return m


def _beta(temperature):
    t = units.natural_value(temperature, Dimension.TEMPERATURE)
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"temperature must be positive, got {temperature!r}")
    return 1.0 / t


def _summary(gamma0, purity_drop, method):
    gamma0_si = units.rate_to_si(gamma0)
    if gamma0_si > 0:
        t = decoherence_time(gamma0_si, purity_drop)
    else:
        if not 0.0 < purity_drop < 1.0:
            raise DomainError(f"purity_drop must lie in (0, 1), got {purity_drop}")
        t = math.inf
    return DecoherenceSummary(gamma0, gamma0_si, t, purity_drop, method)


def photon_gamma0_natural(M, beta):
    """Closed-form photon-bath bound in natural units."""
    zeta3 = riemann_zeta(3)
    zeta5 = riemann_zeta(5)
    c5 = 16.0 / (15.0 * math.pi**2) - 96.0 * zeta5 / math.pi**6
    c3 = 8.0 * zeta3 / math.pi**4
    return (c5 / beta**5 + c3 / beta**3) * M**2


def gamma0_photon_closed(mass, temperature, purity_drop=0.01):
    """Photon-bath bound Gamma_0 from its closed form in zeta(3), zeta(5)."""
    M = _mass(mass)
    beta = _beta(temperature)
    return _summary(photon_gamma0_natural(M, beta), purity_drop, Method.CLOSED_FORM)


def gamma0_photon_quadrature(mass, temperature, rel_tol=1e-10, purity_drop=0.01):
    """Photon-bath bound Gamma_0 by direct quadrature of the spectral weight."""
    M = _mass(mass)
    beta = _beta(temperature)
    if M == 0:
        return _summary(0.0, purity_drop, Method.QUADRATURE)
    env = ThermalEnvironment.photon(beta)
    kernel = CouplingKernel(M)
    result = integrate_semi_infinite(lambda q: radial_weight(env, kernel, q),
                                     rel_tol=rel_tol, scale=1.0 / beta, vectorized=True)
    return _summary(result.value, purity_drop, Method.QUADRATURE)


def fermion_integrand(env, kernel, bound, q):
    """Integrand of the IR-regulated fermion bound.

    Below the cutoff 1/sqrt(D) the 1/q^2 of the spectral weight is replaced
    by D, which removes the infrared divergence; the two branches agree at
    the cutoff.
    """
    q = np.asarray(q, dtype=float)
    w = np.asarray(radial_weight(env, kernel, q))
    return np.where(q <= bound.cutoff, bound.D * q**2 * w, w)


def fermion_gamma0_natural(M, m, beta, bound, rel_tol=1e-10):
    env = ThermalEnvironment.fermion(beta, m)
    kernel = CouplingKernel(M)
    cut = bound.cutoff
    thermal = math.sqrt(2.0 * m / beta)

    def infrared(q):
        return bound.D * q**2 * radial_weight(env, kernel, q)

    def ultraviolet(q):
        return radial_weight(env, kernel, q)

    low = integrate(infrared, 0.0, cut, rel_tol=rel_tol, vectorized=True)
    high = integrate_semi_infinite(ultraviolet, rel_tol=rel_tol, lower=cut,
                                   scale=math.sqrt(cut * thermal), vectorized=True)
    return low.value + high.value


def gamma0_fermion(mass, fermion_mass, temperature, bound, rel_tol=1e-10, purity_drop=0.01):
    """Bound Gamma_0 for a bath of non-relativistic fermions of mass ``fermion_mass``.

    ``bound`` carries D = <x^2> tr(rho^2) of the system state, which sets the
    infrared cutoff.
    """
    M = _mass(mass)
    m = _mass(fermion_mass)
    if m == 0:
        raise DomainError("fermion_mass must be positive")
    beta = _beta(temperature)
    if M == 0:
        return _summary(0.0, purity_drop, Method.FERMION_CUTOFF)
    gamma0 = fermion_gamma0_natural(M, m, beta, bound, rel_tol)
    return _summary(gamma0, purity_drop, Method.FERMION_CUTOFF)


def temperature_sweep(mass, t_min, t_max, points, workers=None):
    """Closed-form Gamma_0 and 1% decoherence time on a log temperature grid.

    ``t_min`` and ``t_max`` are in kelvin.  Rows come back ordered by
    temperature regardless of ``workers``.
    """
    if not 0 < t_min < t_max:
        raise DomainError("need 0 < t_min < t_max")
    if int(points) != points or points < 2:
        raise DomainError("points must be an integer >= 2")
    M = _mass(mass)
    temperatures = np.geomspace(t_min, t_max, int(points))

    def row(temperature):
        temperature = float(temperature)
        s = _summary(photon_gamma0_natural(M, units.beta_from_kelvin(temperature)),
                     0.01, Method.CLOSED_FORM)
        return SweepRow(float(temperature), s.gamma0_si, s.t_fraction)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, temperatures))
    return [row(t) for t in temperatures]


def write_sweep_csv(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([repr(float(v)) for v in r])
