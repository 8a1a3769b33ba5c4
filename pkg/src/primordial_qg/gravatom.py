"""
Bohr-type spectrum of two equal masses bound by Newtonian gravity.

Masses are given in GeV/c^2 and results are returned in SI.  The level
formulas carry the two-body factors exactly as quoted in the literature
for this system (the 1/4 in E_n, the bare M in v_n); nothing is re-derived
with a reduced mass.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations
from typing import List, NamedTuple

from . import units
from .errors import DomainError, RelativisticRegime

VELOCITY_LIMIT = 0.1 * units.C


class Level(NamedTuple):
    n: int
    E_J: float
    r_m: float
    v_mps: float


class Line(NamedTuple):
    m: int
    n: int
    nu_Hz: float


@dataclass(frozen=True)
class BoundStateSpectrum:
    mass: float            # GeV/c^2
    levels: List[Level]
    lines: List[Line]
    cycles: bool = False


def _kg(mass_gev):
    if not mass_gev > 0 or not math.isfinite(mass_gev):
        raise DomainError(f"mass must be positive, got {mass_gev}")
    return units.gev_to_kg(mass_gev)


def _level_index(n, name="n"):
    if int(n) != n or n < 1:
        raise DomainError(f"{name} must be an integer >= 1, got {n}")
    return int(n)


def energy_level(mass_gev, n):
    """E_n = -G^2 M^5 / (4 hbar^2 n^2), in joules."""
    M = _kg(mass_gev)
    n = _level_index(n)
    return -units.G**2 * M**5 / (4.0 * units.HBAR**2 * n**2)


def orbit_radius(mass_gev, n):
    """r_n = hbar^2 n^2 / (G M^3), in metres."""
    M = _kg(mass_gev)
    n = _level_index(n)
    return units.HBAR**2 * n**2 / (units.G * M**3)


def orbit_velocity(mass_gev, n):
    """v_n = G M^2 / (2 n hbar), in m/s.

    Raises RelativisticRegime above 0.1 c, where the non-relativistic
    treatment stops being meaningful.
    """
    M = _kg(mass_gev)
    n = _level_index(n)
    v = units.G * M**2 / (2.0 * n * units.HBAR)
    if v > VELOCITY_LIMIT:
        raise RelativisticRegime(f"v_{n} = {v:.3e} m/s exceeds 0.1 c")
    return v


def line_prefactor(mass_gev, cycles=False):
    """|E_1| / hbar, optionally divided by 2 pi."""
    nu = -energy_level(mass_gev, 1) / units.HBAR
    return nu / (2.0 * math.pi) if cycles else nu


def transition_frequency(mass_gev, m_level, n_level, cycles=False):
    """nu_nm = (|E_1| / hbar)(1/m^2 - 1/n^2).

    With ``cycles=False`` this is |E_1|/hbar taken literally, which is an
    angular frequency; ``cycles=True`` divides by 2 pi.
    """
    m = _level_index(m_level, "m_level")
    n = _level_index(n_level, "n_level")
    if not m < n:
        raise DomainError(f"need m_level < n_level, got {m} >= {n}")
    return line_prefactor(mass_gev, cycles) * (1.0 / m**2 - 1.0 / n**2)


def spectrum(mass_gev, n_max, cycles=False):
    """Levels 1..n_max and all lines between them, lines sorted by frequency."""
    n_max = _level_index(n_max, "n_max")
    if n_max < 2:
        raise DomainError("n_max must be at least 2")
    levels = [Level(n, energy_level(mass_gev, n), orbit_radius(mass_gev, n),
                    orbit_velocity(mass_gev, n)) for n in range(1, n_max + 1)]
    lines = [Line(m, n, transition_frequency(mass_gev, m, n, cycles))
             for m, n in combinations(range(1, n_max + 1), 2)]
    lines.sort(key=lambda line: line.nu_Hz)
    return BoundStateSpectrum(float(mass_gev), levels, lines, cycles)


def write_levels_csv(spec, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(Level._fields)
    for lv in spec.levels:
        writer.writerow((lv.n, repr(lv.E_J), repr(lv.r_m), repr(lv.v_mps)))


def write_lines_csv(spec, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(Line._fields)
    for ln in spec.lines:
        writer.writerow((ln.m, ln.n, repr(ln.nu_Hz)))
