"""
One-particle reduced density matrix on a periodic 1-D momentum grid.

The matrix ``rho[i, j]`` samples the kernel rho(k_i, k_j), so operator
products carry a factor ``dk`` per contracted index: tr(rho) = sum(diag) * dk
and tr(rho^2) = sum(rho * rho.T) * dk^2.  ``DensityMatrixGrid.operator``
returns the dimensionless matrix rho * dk whose eigenvalues are the
occupation probabilities.

Momentum shifts wrap around the grid.  This keeps the shift operator
unitary, so traces and spectra are preserved exactly by ``displaced``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .decoherence import SpreadBound
from .environment import radial_weight
from .errors import (GridResolutionError, InsufficientData, InvalidState,
                     NonCommensurateShift, StabilityError)

STABILITY_LIMIT = 0.1


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrixGrid:
    k_values: np.ndarray
    rho: np.ndarray
    dk: float

    def __post_init__(self):
        k = _frozen(self.k_values, float)
        rho = _frozen(self.rho, complex)
        if k.ndim != 1 or rho.shape != (k.size, k.size):
            raise InvalidState(f"rho must be {k.size}x{k.size}, got {rho.shape}")
        if not self.dk > 0:
            raise InvalidState("dk must be positive")
        object.__setattr__(self, "k_values", k)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "dk", float(self.dk))

    @property
    def n(self):
        return self.k_values.size

    @property
    def operator(self):
        return self.rho * self.dk

    def trace(self):
        return float(np.real(np.trace(self.rho)) * self.dk)

    def hermiticity_error(self):
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def eigenvalues(self):
        h = 0.5 * (self.operator + self.operator.conj().T)
        return np.linalg.eigvalsh(h)

    def validate(self, hermitian_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10):
        """Raise InvalidState unless rho is Hermitian, unit-trace and PSD."""
        if self.hermiticity_error() > hermitian_tol:
            raise InvalidState(f"rho is not Hermitian (error {self.hermiticity_error():.2e})")
        if abs(self.trace() - 1.0) > trace_tol:
            raise InvalidState(f"trace is {self.trace()!r}, expected 1")
        smallest = self.eigenvalues()[0]
        if smallest < -psd_tol:
            raise InvalidState(f"rho has a negative eigenvalue {smallest:.3e}")
        return self

    def with_rho(self, rho):
        return DensityMatrixGrid(self.k_values, rho, self.dk)


def momentum_grid(n=64, dk=1.0, center=0.0):
    """Uniform grid k_i = center + (i - n//2) dk, i = 0..n-1."""
    if n < 2:
        raise GridResolutionError("a grid needs at least two points")
    return center + (np.arange(n) - n // 2) * float(dk)


def default_grid(sigma_k, n=64, center=0.0):
    """Grid spanning +-8 sigma_k around ``center`` with ``n`` points."""
    return momentum_grid(n, 16.0 * sigma_k / n, center)


def _spacing(k_values):
    k_values = np.asarray(k_values, dtype=float)
    dk = (k_values[-1] - k_values[0]) / (k_values.size - 1)
    if not np.allclose(np.diff(k_values), dk, rtol=1e-9, atol=0.0):
        raise GridResolutionError("momentum grid must be uniform")
    return dk


def pure_state(k_values, psi):
    """rho = |psi><psi| with psi normalised so that sum |psi|^2 dk = 1."""
    dk = _spacing(k_values)
    psi = np.asarray(psi, dtype=complex)
    norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dk)
    if norm == 0:
        raise InvalidState("zero wavefunction")
    psi = psi / norm
    return DensityMatrixGrid(k_values, np.outer(psi, psi.conj()), dk)


def gaussian_wavefunction(k_values, k0, sigma_k):
    k_values = np.asarray(k_values, dtype=float)
    return np.exp(-((k_values - k0) ** 2) / (4.0 * sigma_k**2)).astype(complex)


def gaussian_state(k_values, k0, sigma_k):
    """Pure Gaussian wavepacket with |psi(k)|^2 of standard deviation sigma_k.

    Its position variance is 1 / (4 sigma_k^2).
    """
    dk = _spacing(k_values)
    span = len(k_values) * dk
    if not 3.0 * dk < sigma_k < span / 6.0:
        raise GridResolutionError(
            f"sigma_k={sigma_k} is not resolvable: need 3*dk={3 * dk} < sigma_k < span/6={span / 6}")
    return pure_state(k_values, gaussian_wavefunction(k_values, k0, sigma_k))


def mixed_state(k_values, weights, wavefunctions):
    """Statistical mixture sum_i p_i |psi_i><psi_i| with each psi_i normalised."""
    dk = _spacing(k_values)
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, rel_tol=1e-12):
        raise InvalidState("weights must be a probability vector")
    rho = np.zeros((len(k_values), len(k_values)), dtype=complex)
    for p, psi in zip(weights, wavefunctions):
        rho += p * pure_state(k_values, psi).rho
    return DensityMatrixGrid(k_values, rho, dk)


def random_density_matrix(k_values, rng, rank=None):
    """Random mixed state from a Ginibre matrix of the given rank."""
    dk = _spacing(k_values)
    n = len(k_values)
    rank = n if rank is None else rank
    a = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    op = a @ a.conj().T
    op /= np.real(np.trace(op))
    op = 0.5 * (op + op.conj().T)
    return DensityMatrixGrid(k_values, op / dk, dk)


def _overlap(a, b, dk):
    # Re tr(a b) with the dk^2 measure
    return float(np.real(np.sum(a * b.T))) * dk * dk


def purity(state):
    """tr(rho^2)."""
    return _overlap(state.rho, state.rho, state.dk)


def shift_steps(state, q):
    """Number of grid steps corresponding to the momentum shift ``q``."""
    steps = round(q / state.dk)
    if abs(steps * state.dk - q) > 1e-9 * state.dk:
        raise NonCommensurateShift(f"shift {q} is not a multiple of dk={state.dk}")
    return int(steps)


def displaced(state, q):
    """The displaced matrix rho_q(s, k) = rho(s - q, k - q), periodic in k."""
    m = shift_steps(state, q)
    return state.with_rho(np.roll(state.rho, (m, m), axis=(0, 1)))


def alpha_of_q(state, q):
    """Re tr(rho rho_q): overlap between rho and its displaced copy."""
    return _overlap(state.rho, displaced(state, q).rho, state.dk)


def lambda_of_q(state, q):
    """Purity deficit Lambda(q) = tr(rho^2) - Re tr(rho rho_q)."""
    return purity(state) - alpha_of_q(state, q)


def position_operator(n, dk):
    """Position operator X conjugate to the periodic momentum grid.

    Defined through the shift S (one step up in k) as S = exp(i dk X), with
    eigenvalues taken in [-pi/dk, pi/dk).
    """
    f = np.fft.fft(np.eye(n), axis=0, norm="ortho")
    x = -2.0 * np.pi * np.fft.fftfreq(n) / dk
    return f.conj().T @ np.diag(x) @ f


def position_second_moment(state):
    """<x^2> = tr(rho X^2)."""
    x = position_operator(state.n, state.dk)
    return float(np.real(np.trace(state.operator @ x @ x)))


def spread_bound(state):
    """SpreadBound D = <x^2> tr(rho^2) of the state."""
    return SpreadBound.from_moments(position_second_moment(state), purity(state))


def lambda_curvature(state):
    """d^2 Lambda / dq^2 at q = 0 from a five-point stencil of ``lambda_of_q``."""
    h = state.dk
    values = [lambda_of_q(state, s * h) for s in (-2, -1, 0, 1, 2)]
    return (-values[0] + 16 * values[1] - 30 * values[2] + 16 * values[3] - values[4]) / (12 * h * h)


def lambda_curvature_operator(state):
    """Exact curvature 2 (tr(rho^2 X^2) - tr(rho X rho X)) on the grid."""
    x = position_operator(state.n, state.dk)
    r = state.operator
    return float(2.0 * np.real(np.trace(r @ r @ x @ x) - np.trace(r @ x @ r @ x)))


class SmallQExpansion(NamedTuple):
    off_diagonal: float  # (1/2) q^2 sum_{i != j} l_i l_j |<i|Z|j>|^2
    direct: float        # (1/2) q^2 d^2Lambda/dq^2 from lambda_of_q
    bound: float         # (1/2) q^2 <x^2>


def lambda_small_q_offdiagonal(state, q):
    """Small-q expansion of Lambda(q) evaluated two ways.

    ``off_diagonal`` is the eigen-expansion with only the off-diagonal (i != j)
    terms retained, exactly as it is usually quoted.  ``direct`` is the
    quadratic term obtained numerically from ``lambda_of_q``.  The two do
    not agree in general: for a pure state ``off_diagonal`` vanishes while the
    direct expansion is q^2 <x^2>, because the diagonal variance terms are
    missing from the quoted form.
    """
    lam, vecs = np.linalg.eigh(0.5 * (state.operator + state.operator.conj().T))
    x = position_operator(state.n, state.dk)
    z = vecs.conj().T @ x @ vecs
    weights = np.outer(lam, lam) * np.abs(z) ** 2
    cross = float(np.sum(weights) - np.sum(np.diag(weights)))
    off_diagonal = 0.5 * q * q * cross
    direct = 0.5 * q * q * lambda_curvature(state)
    bound = 0.5 * q * q * position_second_moment(state)
    return SmallQExpansion(off_diagonal, direct, bound)


def collision_weights(k_values, env, kernel):
    """Shift steps m = 1..N/2 and their weights w(m dk) dk."""
    dk = _spacing(k_values)
    steps = np.arange(1, len(k_values) // 2 + 1)
    weights = np.asarray(radial_weight(env, kernel, steps * dk)) * dk
    return steps, weights


def discrete_gamma0(k_values, env, kernel):
    """Grid analogue of Gamma_0: sum over shifts of w(q) dq."""
    return float(np.sum(collision_weights(k_values, env, kernel)[1]))


class MasterEquation:
    """Propagator for the one-particle master equation on a fixed grid.

    Each step applies the free phase exp(-i (k^2 - k'^2) dt / 2M) and then
    the collision term exactly.  The collision term is a sum of momentum
    kicks by +-q with rate w(q) dq / 2 each; kicks are diagonal in the
    position basis, where they damp rho(x, x') by
    exp(dt sum_m c_m (cos(m dk (x - x')) - 1)).
    """

    def __init__(self, k_values, env, kernel):
        self.k_values = np.asarray(k_values, dtype=float)
        self.dk = _spacing(self.k_values)
        self.env = env
        self.kernel = kernel
        n = self.k_values.size
        steps, weights = collision_weights(self.k_values, env, kernel)
        self.gamma0 = float(np.sum(weights))
        rates = 0.5 * weights
        # exponent depends only on the DFT index difference a - b
        diff = np.arange(n)
        phase = 2.0 * np.pi * np.outer(diff, steps) / n
        self._exponent_by_diff = (np.cos(phase) - 1.0) @ rates
        idx = np.arange(n)
        self._exponent = self._exponent_by_diff[(idx[:, None] - idx[None, :]) % n]
        self._dft = np.fft.fft(np.eye(n), axis=0, norm="ortho")
        k2 = self.k_values**2
        self._energy_gap = (k2[:, None] - k2[None, :]) / (2.0 * kernel.system_mass)
        self._cache = {}

    def _factors(self, dt):
        if dt not in self._cache:
            self._cache[dt] = (np.exp(-1j * self._energy_gap * dt),
                               np.exp(self._exponent * dt))
        return self._cache[dt]

    def step(self, state, dt):
        if not dt > 0:
            raise StabilityError("dt must be positive")
        if dt * self.gamma0 >= STABILITY_LIMIT:
            raise StabilityError(
                f"dt * Gamma0_d = {dt * self.gamma0:.3g} exceeds {STABILITY_LIMIT}")
        phase, damping = self._factors(dt)
        rho = state.rho * phase
        f = self._dft
        rho_hat = f @ rho @ f.conj().T
        rho = f.conj().T @ (rho_hat * damping) @ f
        rho = 0.5 * (rho + rho.conj().T)
        return state.with_rho(rho)

    def evolve(self, state, dt, steps):
        """Return (times, purities, final_state) over ``steps`` steps."""
        times = [0.0]
        purities = [purity(state)]
        for i in range(steps):
            state = self.step(state, dt)
            times.append((i + 1) * dt)
            purities.append(purity(state))
        return np.array(times), np.array(purities), state


def evolve_step(state, env, kernel, dt):
    """Advance ``state`` by one time step of the master equation."""
    return MasterEquation(state.k_values, env, kernel).step(state, dt)


def measured_decay_rate(times, purities):
    """Negated least-squares slope of ln(purity) against time."""
    times = np.asarray(times, dtype=float)
    purities = np.asarray(purities, dtype=float)
    if times.size < 3 or times.size != purities.size:
        raise InsufficientData("need at least three (t, purity) samples")
    if np.any(purities <= 0):
        raise InsufficientData("purities must be positive")
    t = times - times.mean()
    y = np.log(purities)
    slope = float(np.dot(t, y - y.mean()) / np.dot(t, t))
    return -slope


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    """Pure two-particle state psi(k1, k2) on a shared momentum grid."""

    k_values: np.ndarray
    psi: np.ndarray
    dk: float

    def __post_init__(self):
        k = _frozen(self.k_values, float)
        psi = _frozen(self.psi, complex)
        if psi.shape != (k.size, k.size):
            raise InvalidState(f"psi must be {k.size}x{k.size}, got {psi.shape}")
        norm = float(np.sum(np.abs(psi) ** 2)) * self.dk**2
        if abs(norm - 1.0) > 1e-10:
            raise InvalidState(f"psi has norm {norm!r}, expected 1")
        object.__setattr__(self, "k_values", k)
        object.__setattr__(self, "psi", psi)

    @property
    def n(self):
        return self.k_values.size

    @classmethod
    def normalized(cls, k_values, psi):
        dk = _spacing(k_values)
        psi = np.asarray(psi, dtype=complex)
        return cls(k_values, psi / math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dk * dk), dk)


def product_state(k_values, phi1, phi2):
    return TwoParticleState.normalized(k_values, np.outer(phi1, phi2))


def schmidt_state(k_values, coefficients, first, second):
    """sum_i c_i |a_i>|b_i> for orthogonal families ``first`` and ``second``."""
    psi = sum(c * np.outer(a, b) for c, a, b in zip(coefficients, first, second))
    return TwoParticleState.normalized(k_values, psi)


def correlated_gaussian(k_values, sigma_k, correlation):
    """Gaussian psi(k1, k2) whose |psi|^2 has marginal width sigma_k and
    correlation coefficient ``correlation`` between k1 and k2."""
    k = np.asarray(k_values, dtype=float)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    r = correlation
    exponent = -(k1**2 - 2 * r * k1 * k2 + k2**2) / (4.0 * sigma_k**2 * (1.0 - r * r))
    return TwoParticleState.normalized(k, np.exp(exponent))


def reduced_density_matrix(state):
    """rho_1(k1, k1') = sum_k2 psi(k1, k2) psi*(k1', k2) dk."""
    rho = state.psi @ state.psi.conj().T * state.dk
    return DensityMatrixGrid(state.k_values, rho, state.dk)


def reduced_purity(state):
    """tr(rho_1^2) from the Schmidt coefficients of psi."""
    s = np.linalg.svd(state.psi * state.dk, compute_uv=False)
    p = s**2
    return float(np.sum(p**2))


def write_snapshot(state, path):
    """Write rho as CSV rows (i, j, re, im) plus a JSON sidecar with N, dk, k0."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("i", "j", "re", "im"))
        for i in range(state.n):
            for j in range(state.n):
                z = state.rho[i, j]
                writer.writerow((i, j, repr(float(z.real)), repr(float(z.imag))))
    meta = {"N": state.n, "dk": state.dk, "k0": float(state.k_values[0])}
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps(meta, indent=2) + "\n")
    return path, sidecar


def read_snapshot(path):
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    n = int(meta["N"])
    rho = np.zeros((n, n), dtype=complex)
    with path.open() as fh:
        for row in csv.DictReader(fh):
            rho[int(row["i"]), int(row["j"])] = complex(float(row["re"]), float(row["im"]))
    k = float(meta["k0"]) + np.arange(n) * float(meta["dk"])
    return DensityMatrixGrid(k, rho, float(meta["dk"]))
