"""Free spreading of a Gaussian wavepacket, in SI units (kg, s, m)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import units
from .errors import DomainError, MissingInitialSpread


@dataclass(frozen=True)
class SpreadQuery:
    mass: float                               # kg
    elapsed: float                            # s
    initial_spread: Optional[float] = None    # m

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if not self.elapsed >= 0:
            raise DomainError(f"elapsed must be non-negative, got {self.elapsed}")
        if self.initial_spread is not None and not self.initial_spread > 0:
            raise DomainError(f"initial_spread must be positive, got {self.initial_spread}")


def spread_at(query: SpreadQuery) -> float:
    """Width s(t) = sqrt(s0^2 + (hbar t / (m s0))^2) of a freely spreading packet."""
    s0 = query.initial_spread
    if s0 is None:
        raise MissingInitialSpread("spread_at needs an initial_spread")
    growth = units.HBAR * query.elapsed / (query.mass * s0)
    return math.hypot(s0, growth)


def minimal_spread(mass: float, elapsed: float) -> float:
    """Smallest s(t) over all initial widths: sqrt(2 hbar t / m), reached at s0 = sqrt(hbar t / m)."""
    if not mass > 0:
        raise DomainError(f"mass must be positive, got {mass}")
    if not elapsed > 0:
        raise DomainError(f"elapsed must be positive, got {elapsed}")
    return math.sqrt(2.0 * units.HBAR * elapsed / mass)


def optimal_initial_spread(mass: float, elapsed: float) -> float:
    if not mass > 0 or not elapsed > 0:
        raise DomainError("mass and elapsed must be positive")
    return math.sqrt(units.HBAR * elapsed / mass)


def minimal_spread_gev(mass_gev: float, elapsed_gyr: float) -> float:
    """s_min for a mass in GeV/c^2 after ``elapsed_gyr`` billion Julian years."""
    return minimal_spread(units.gev_to_kg(mass_gev), elapsed_gyr * units.GYR_S)
