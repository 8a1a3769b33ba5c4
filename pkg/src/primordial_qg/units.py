"""
SI <-> Planck-unit conversion.

Natural units here means hbar = c = G = k_B = 1.  Every quantity is then a
pure number measured in the matching Planck unit (Planck mass, Planck time,
...).  Constants are CODATA 2018 recommended values; the Planck units are
derived from hbar, c and G rather than stored separately so that the
conversions stay mutually consistent to the last bit.

Only the handful of dimensions the physics modules need is supported.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DimensionMismatch, UnsupportedDimension

# CODATA 2018 (exact where the SI fixes them)
HBAR = 1.054571817e-34          # J s
C = 299792458.0                 # m / s
G = 6.67430e-11                 # m^3 kg^-1 s^-2
K_B = 1.380649e-23              # J / K
ELECTRON_VOLT = 1.602176634e-19  # J

PLANCK_MASS = math.sqrt(HBAR * C / G)             # kg
PLANCK_LENGTH = math.sqrt(HBAR * G / C**3)        # m
PLANCK_TIME = math.sqrt(HBAR * G / C**5)          # s
PLANCK_ENERGY = PLANCK_MASS * C**2                # J
PLANCK_TEMPERATURE = PLANCK_ENERGY / K_B          # K

GEV_PER_C2_KG = 1e9 * ELECTRON_VOLT / C**2        # kg
JULIAN_YEAR_S = 365.25 * 86400.0
GYR_S = 1e9 * JULIAN_YEAR_S
AGE_OF_UNIVERSE_S = 13.8 * GYR_S


class Dimension(enum.Enum):
    MASS = "mass"
    ENERGY = "energy"
    TEMPERATURE = "temperature"
    TIME = "time"
    LENGTH = "length"
    RATE = "rate"
    FREQUENCY = "frequency"
    VELOCITY = "velocity"


class System(enum.Enum):
    SI = "SI"
    NATURAL = "natural"


# SI value of one Planck unit of each dimension.
_PLANCK_UNIT = {
    Dimension.MASS: PLANCK_MASS,
    Dimension.ENERGY: PLANCK_ENERGY,
    Dimension.TEMPERATURE: PLANCK_TEMPERATURE,
    Dimension.TIME: PLANCK_TIME,
    Dimension.LENGTH: PLANCK_LENGTH,
    Dimension.RATE: 1.0 / PLANCK_TIME,
    Dimension.FREQUENCY: 1.0 / PLANCK_TIME,
    Dimension.VELOCITY: C,
}

# With hbar = c = k_B = 1 these dimensions collapse onto each other.
_NATURAL_CLASS = {
    Dimension.MASS: "energy",
    Dimension.ENERGY: "energy",
    Dimension.TEMPERATURE: "energy",
    Dimension.RATE: "energy",
    Dimension.FREQUENCY: "energy",
    Dimension.TIME: "length",
    Dimension.LENGTH: "length",
    Dimension.VELOCITY: "velocity",
}


def _check_dimension(dimension):
    if not isinstance(dimension, Dimension) or dimension not in _PLANCK_UNIT:
        raise UnsupportedDimension(f"unsupported dimension: {dimension!r}")


@dataclass(frozen=True)
class PhysicalQuantity:
    """A real value tagged with its dimension and unit system.

    Arithmetic and comparisons are only defined between quantities of the
    same dimension and system; anything else raises DimensionMismatch.
    """

    value: float
    dimension: Dimension
    system: System = System.SI

    def __post_init__(self):
        _check_dimension(self.dimension)
        if not isinstance(self.system, System):
            raise TypeError(f"system must be a System, got {self.system!r}")

    def _compatible(self, other):
        if not isinstance(other, PhysicalQuantity):
            raise DimensionMismatch(f"cannot combine {self!r} with {other!r}")
        if other.dimension is not self.dimension or other.system is not self.system:
            raise DimensionMismatch(
                f"{self.dimension.value}/{self.system.value} vs "
                f"{other.dimension.value}/{other.system.value}")
        return other

    def __add__(self, other):
        other = self._compatible(other)
        return PhysicalQuantity(self.value + other.value, self.dimension, self.system)

    def __sub__(self, other):
        other = self._compatible(other)
        return PhysicalQuantity(self.value - other.value, self.dimension, self.system)

    def __mul__(self, factor):
        if isinstance(factor, PhysicalQuantity):
            raise DimensionMismatch("products of quantities are not supported")
        return PhysicalQuantity(self.value * factor, self.dimension, self.system)

    __rmul__ = __mul__

    def __lt__(self, other):
        return self.value < self._compatible(other).value

    def __le__(self, other):
        return self.value <= self._compatible(other).value

    def __gt__(self, other):
        return self.value > self._compatible(other).value

    def __ge__(self, other):
        return self.value >= self._compatible(other).value


def to_natural(q):
    """Express an SI quantity in Planck units."""
    if q.system is not System.SI:
        raise ValueError("to_natural expects an SI quantity")
    _check_dimension(q.dimension)
    return PhysicalQuantity(q.value / _PLANCK_UNIT[q.dimension], q.dimension, System.NATURAL)


def from_natural(q, target_dimension=None):
    """Express a Planck-unit quantity in SI.

    ``target_dimension`` may reinterpret the value within its natural
    dimension class, e.g. a natural energy read back as a temperature in
    kelvin or a natural time read back as a length in metres.
    """
    if q.system is not System.NATURAL:
        raise ValueError("from_natural expects a natural-unit quantity")
    target = q.dimension if target_dimension is None else target_dimension
    _check_dimension(target)
    if _NATURAL_CLASS[target] != _NATURAL_CLASS[q.dimension]:
        raise UnsupportedDimension(
            f"cannot read a natural {q.dimension.value} as {target.value}")
    return PhysicalQuantity(q.value * _PLANCK_UNIT[target], target, System.SI)


def natural_value(x, dimension):
    """Return the Planck-unit magnitude of ``x``.

    Plain numbers are taken to be SI values of ``dimension``; a
    PhysicalQuantity may be given in either system provided its dimension
    is interchangeable with ``dimension`` in natural units.
    """
    _check_dimension(dimension)
    if not isinstance(x, PhysicalQuantity):
        return float(x) / _PLANCK_UNIT[dimension]
    if _NATURAL_CLASS[x.dimension] != _NATURAL_CLASS[dimension]:
        raise DimensionMismatch(f"expected a {dimension.value}, got {x.dimension.value}")
    if x.system is System.NATURAL:
        return float(x.value)
    return float(x.value) / _PLANCK_UNIT[x.dimension]


def kilograms(value):
    return PhysicalQuantity(value, Dimension.MASS)


def kelvin(value):
    return PhysicalQuantity(value, Dimension.TEMPERATURE)


def natural(value, dimension):
    return PhysicalQuantity(value, dimension, System.NATURAL)


def beta_from_kelvin(temperature_k):
    """Inverse temperature 1/(k_B T) in Planck units."""
    return PLANCK_TEMPERATURE / temperature_k


def gev_to_kg(mass_gev):
    return mass_gev * GEV_PER_C2_KG


def kg_to_gev(mass_kg):
    return mass_kg / GEV_PER_C2_KG


def rate_to_si(rate_natural):
    """Natural-unit rate -> s^-1."""
    return rate_natural / PLANCK_TIME
