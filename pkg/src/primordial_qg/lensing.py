"""
Wave-optics lensing by a lens whose centre is in a spatial superposition.

The model is a 1-D scalar Kirchhoff integral in dimensionless units.  Lens
plane coordinates u are measured in units of a reference Einstein radius,
``lens_mass`` is the mass in units of the reference mass, and ``omega`` is
the wave-optics parameter w = 4 G M_ref omega.  For a point lens at x_L the
amplitude seen along the (dimensionless) angle theta is

    alpha = sqrt(w a / 2 pi i) int du exp(i w [a (u - y)^2 / 2 - mu ln|u - x_L|])

with y = theta d_lo the projected line of sight and a = 1 / d_eff the
geometric curvature (d_lo lens-observer, d_eff = d_lo d_sl / (d_lo + d_sl)).
Without a lens alpha = 1.

Two intensities are compared.  ``intensity_classical`` lenses with the
potential smeared by |psi|^2; ``intensity_quantum`` adds the amplitudes of
all branch positions coherently, weighted by psi.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError, GridResolutionError, InsufficientGrid, InvalidState

_MARGIN = 2.0        # plateau beyond the outermost stationary point
_ROLLOFF = 2.0       # width of the smooth window edge
_SAMPLES = 4.0       # samples per pi of chirp phase at the window edge
_BLOCK = 32          # amplitudes evaluated per vectorised block


class AmplitudeModel(enum.Enum):
    KIRCHHOFF_1D = "kirchhoff_1d"


@dataclass(frozen=True, eq=False)
class LensingScene:
    """Lens with a sampled centre-of-mass wavefunction and an angle grid.

    ``positions`` must be uniform; ``psi`` is normalised so that
    sum |psi|^2 dx = 1.  ``distances`` are (source-lens, lens-observer).
    ``lens_plane_step`` fixes the lens-plane sample spacing; by default it
    is chosen from the chirp bandwidth.
    """

    lens_mass: float
    positions: np.ndarray
    psi: np.ndarray
    omega: float
    theta_grid: np.ndarray
    distances: Tuple[float, float] = (2.0, 2.0)
    model: AmplitudeModel = AmplitudeModel.KIRCHHOFF_1D
    lens_plane_step: Optional[float] = None

    def __post_init__(self):
        x = np.array(self.positions, dtype=float)
        psi = np.array(self.psi, dtype=complex)
        theta = np.array(self.theta_grid, dtype=float)
        if x.ndim != 1 or x.size < 2 or psi.shape != x.shape:
            raise InvalidState("positions and psi must be 1-D arrays of equal length >= 2")
        dx = (x[-1] - x[0]) / (x.size - 1)
        if not dx > 0 or not np.allclose(np.diff(x), dx, rtol=1e-9, atol=0.0):
            raise InvalidState("positions must be increasing and uniform")
        norm = float(np.sum(np.abs(psi) ** 2)) * dx
        if abs(norm - 1.0) > 1e-10:
            raise InvalidState(f"psi has norm {norm!r}, expected 1")
        if not self.lens_mass >= 0:
            raise DomainError("lens_mass must be non-negative")
        if not self.omega > 0:
            raise DomainError("omega must be positive")
        if len(self.distances) != 2 or not all(d > 0 for d in self.distances):
            raise DomainError("distances must be two positive numbers")
        if theta.ndim != 1 or theta.size < 1:
            raise DomainError("theta_grid must be a non-empty 1-D array")
        if self.lens_plane_step is not None and not self.lens_plane_step > 0:
            raise DomainError("lens_plane_step must be positive")
        for name, arr in (("positions", x), ("psi", psi), ("theta_grid", theta)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))

    @property
    def dx(self):
        return float((self.positions[-1] - self.positions[0]) / (self.positions.size - 1))

    @property
    def curvature(self):
        d_sl, d_lo = self.distances
        return (d_lo + d_sl) / (d_lo * d_sl)

    def line_of_sight(self, theta):
        return np.asarray(theta, dtype=float) * self.distances[1]

    def branch_weights(self):
        """Occupied positions x_i, probabilities p_i and amplitudes c_i = psi_i sqrt(dx)."""
        p = np.abs(self.psi) ** 2 * self.dx
        keep = p > 0
        return self.positions[keep], p[keep], self.psi[keep] * math.sqrt(self.dx)


@dataclass(frozen=True, eq=False)
class IntensityProfile:
    theta_grid: np.ndarray
    values: np.ndarray = field()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise DomainError("intensities must be finite and non-negative")
        if values.shape != np.shape(self.theta_grid):
            raise DomainError("values and theta_grid differ in shape")
        object.__setattr__(self, "values", values)


def _smooth_step(t):
    # C-infinity step from 0 (t <= 0) to 1 (t >= 1)
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f0 = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        f1 = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return f0 / (f0 + f1)


def _lens_plane(offsets, weights, mu, w, a, ys, step):
    """Midpoint grid, window and cell-averaged lens factor g = exp(-i w mu phi).

    ``offsets`` are lens positions relative to the grid centre; the grid is
    symmetric about 0 so mirror-image configurations are sampled exactly.
    """
    reach = max(float(np.max(np.abs(ys))), float(np.max(np.abs(offsets))))
    plateau = reach + math.sqrt(mu / a) + _MARGIN
    half = plateau + _ROLLOFF
    spread = half + float(np.max(np.abs(ys)))
    auto = math.pi / (_SAMPLES * w * a * spread)
    du = auto if step is None else float(step)
    if w * a * spread * du > math.pi:
        raise GridResolutionError(
            f"lens-plane step {du:.3g} under-samples the chirp (need <= {math.pi / (w * a * spread):.3g})")
    n = 2 * int(math.ceil(half / du))
    u = (np.arange(n) + 0.5 - n / 2) * du
    window = _smooth_step((half - np.abs(u)) / _ROLLOFF)

    if mu == 0:
        return u, du, window, np.ones_like(u, dtype=complex)

    # phase of all lenses at cell centres, with each cell's nearest lens
    # replaced by its exact cell average (the log phase is unresolved there)
    nearest = np.abs(u[:, None] - offsets[None, :]).argmin(axis=1)
    phase = np.zeros_like(u)
    for i, (x, p) in enumerate(zip(offsets, weights)):
        far = nearest != i
        phase[far] += p * np.log(np.abs(u[far] - x))
    g = np.exp(-1j * w * mu * phase)
    kappa = w * mu * weights[nearest]
    lo = u - 0.5 * du - offsets[nearest]
    hi = u + 0.5 * du - offsets[nearest]
    g *= (_antiderivative(hi, kappa) - _antiderivative(lo, kappa)) / du
    return u, du, window, g


def _antiderivative(v, kappa):
    # d/dv [sign(v) |v|^(1 - i kappa) / (1 - i kappa)] = |v|^(-i kappa)
    mag = np.abs(v)
    with np.errstate(divide="ignore"):
        logm = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), 0.0)
    return np.sign(v) * mag * np.exp(-1j * kappa * logm) / (1.0 - 1j * kappa)


def _amplitudes(ys, offsets, weights, mu, w, a, step=None):
    """alpha(y) for every y in ``ys`` through the lens configuration."""
    ys = np.asarray(ys, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    weights = np.asarray(weights, dtype=float)
    u, du, window, g = _lens_plane(offsets, weights, mu, w, a, ys, step)
    if mu == 0:
        return np.ones(ys.shape, dtype=complex)
    # alpha = 1 + (tapered integral of chirp * (g - 1)); the free part is exact
    h = window * (g - 1.0) * du
    support = np.nonzero(h)[0]
    u, h = u[support], h[support]
    prefactor = np.sqrt(w * a / (2j * np.pi))
    out = np.empty(ys.size, dtype=complex)
    for start in range(0, ys.size, _BLOCK):
        y = ys[start:start + _BLOCK]
        chirp = np.exp(0.5j * w * a * (u[None, :] - y[:, None]) ** 2)
        out[start:start + _BLOCK] = 1.0 + prefactor * (chirp @ h)
    return out


def amplitude(scene, theta, lens_center_offset=0.0):
    """Amplitude along ``theta`` for the whole lens mass placed at one position."""
    y = scene.line_of_sight(np.atleast_1d(theta)) - lens_center_offset
    alpha = _amplitudes(y, np.zeros(1), np.ones(1), scene.lens_mass, scene.omega,
                        scene.curvature, scene.lens_plane_step)
    return complex(alpha[0]) if np.ndim(theta) == 0 else alpha


def intensity_classical(scene):
    """|alpha|^2 for the lens potential averaged over |psi|^2."""
    x, p, _ = scene.branch_weights()
    p = p / p.sum()
    centre = float(np.dot(p, x))
    y = scene.line_of_sight(scene.theta_grid) - centre
    alpha = _amplitudes(y, x - centre, p, scene.lens_mass, scene.omega,
                        scene.curvature, scene.lens_plane_step)
    return IntensityProfile(scene.theta_grid, np.abs(alpha) ** 2)


def intensity_quantum(scene):
    """|sum_i c_i alpha(theta; x_i)|^2, the coherent sum over branch positions.

    A point lens amplitude depends on the lens position only through
    y - x_i, so all branches share one lens-plane evaluation.
    """
    x, _, c = scene.branch_weights()
    y = scene.line_of_sight(scene.theta_grid)
    rel = (y[None, :] - x[:, None]).ravel()
    unique, inverse = np.unique(rel, return_inverse=True)
    alpha = _amplitudes(unique, np.zeros(1), np.ones(1), scene.lens_mass, scene.omega,
                        scene.curvature, scene.lens_plane_step)
    alpha = alpha[inverse].reshape(x.size, y.size)
    total = c @ alpha
    return IntensityProfile(scene.theta_grid, np.abs(total) ** 2)


def fringe_contrast(profile):
    """(max - min) / (max + min) over the central half of the angle grid."""
    values = np.asarray(profile.values, dtype=float)
    n = values.size
    if n < 8:
        raise InsufficientGrid(f"need at least 8 samples, got {n}")
    central = values[n // 4: n - n // 4]
    hi, lo = float(central.max()), float(central.min())
    if hi + lo == 0:
        return 0.0
    return (hi - lo) / (hi + lo)


def fringe_maxima(profile, smoothing):
    """Angles of the local maxima after Gaussian smoothing of width ``smoothing``.

    Smoothing removes the fast ripple from secondary images so that only the
    interference fringes remain.  Maxima within 3 widths of either end of
    the grid are dropped.
    """
    theta = np.asarray(profile.theta_grid, dtype=float)
    step = (theta[-1] - theta[0]) / (theta.size - 1)
    half = int(math.ceil(3.0 * smoothing / step))
    if theta.size < 2 * half + 3:
        raise InsufficientGrid("angle grid too short for the requested smoothing")
    kernel = np.exp(-0.5 * (np.arange(-half, half + 1) * step / smoothing) ** 2)
    smooth = np.convolve(profile.values, kernel / kernel.sum(), mode="valid")
    inner = smooth[1:-1]
    peaks = np.nonzero((inner > smooth[:-2]) & (inner >= smooth[2:]))[0] + 1
    return theta[half:-half][peaks]


def image_positions(y, mu, a=1.0):
    """Offsets v = u - x_L of the two geometric images, primary (v y > 0) first."""
    y = float(y)
    disc = math.sqrt(y * y + 4.0 * mu / a)
    if y >= 0:
        return 0.5 * (y + disc), 0.5 * (y - disc)
    return 0.5 * (y - disc), 0.5 * (y + disc)


def image_delay(v, y, mu, a=1.0):
    """Fermat potential and its curvature at image offset ``v``."""
    delay = 0.5 * a * (v - y) ** 2 - mu * math.log(abs(v))
    return delay, a + mu / v**2


def stationary_phase_amplitude(y, mu, w, a=1.0, images="both"):
    """Geometric-optics amplitude sum_j sqrt(a / T''_j) exp(i w T_j)."""
    chosen = image_positions(y, mu, a)
    if images == "primary":
        chosen = chosen[:1]
    total = 0j
    for v in chosen:
        delay, curvature = image_delay(v, y, mu, a)
        total += math.sqrt(a / curvature) * np.exp(1j * w * delay)
    return complex(total)


def two_path_phase(y, branches, mu, w, a=1.0):
    """Phase difference between the primary images of two lens branches."""
    phases = []
    for x in branches:
        v = image_positions(y - x, mu, a)[0]
        phases.append(w * image_delay(v, y - x, mu, a)[0])
    return phases[0] - phases[1]


def gaussian_branches(positions, centres, width, weights=None):
    """Normalised superposition of Gaussian packets (zero width = one grid point)."""
    x = np.asarray(positions, dtype=float)
    dx = (x[-1] - x[0]) / (x.size - 1)
    weights = np.ones(len(centres)) if weights is None else np.asarray(weights, dtype=complex)
    psi = np.zeros(x.size, dtype=complex)
    for c, wgt in zip(centres, weights):
        if width == 0:
            psi[np.abs(x - c).argmin()] += wgt
        else:
            psi += wgt * np.exp(-((x - c) ** 2) / (4.0 * width**2))
    return psi / math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dx)


DEFAULT_MASS = 0.1
DEFAULT_OMEGA = 300.0
DEFAULT_SEPARATION = 6.0


def default_scene(separation=DEFAULT_SEPARATION, lens_mass=DEFAULT_MASS, omega=DEFAULT_OMEGA,
                  theta_max=0.385, points=771, branches=2, width=0.0):
    """Lens split into point-like branches at +-separation/2 (or one branch at 0)."""
    positions = np.linspace(-4.0, 4.0, 161)
    centres = [-separation / 2, separation / 2] if branches == 2 else [0.0]
    psi = gaussian_branches(positions, centres, width)
    theta = np.linspace(-theta_max, theta_max, points)
    return LensingScene(lens_mass, positions, psi, omega, theta)


def write_profiles_csv(classical, quantum, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("theta", "I_cl", "I_qg"))
    for t, a, b in zip(classical.theta_grid, classical.values, quantum.values):
        writer.writerow((repr(float(t)), repr(float(a)), repr(float(b))))
