"""Amplitude/phase decomposition and the hydrodynamic fields it generates.

Splits psi = R exp(i S / hbar) into amplitude R, unwrapped phase-action S,
the curvature potential Q = -(hbar^2/2m) lap(R)/R, and the flow velocity
v = (hbar/m) Im(psi'/psi). Q and v are regularized at amplitude nodes by
flooring denominators at epsilon * max(R); affected points are reported in
node_mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateStateError, ShapeError
from .fields import PhysicalParams, SpatialGrid, WaveState

DEFAULT_EPSILON = 1e-8


# ---------- spectral operators ----------

def spectral_derivative(values: np.ndarray, grid: SpatialGrid, axis: int = 0) -> np.ndarray:
    """First derivative by FFT; the Nyquist mode is dropped (odd operator)."""
    k = grid.wavenumbers.copy()
    n = grid.n_points
    if n % 2 == 0:
        k[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    fhat = np.fft.fft(values, axis=axis)
    return np.fft.ifft(1j * k.reshape(shape) * fhat, axis=axis)


def spectral_laplacian(values: np.ndarray, grid: SpatialGrid, axis: int = 0) -> np.ndarray:
    """Second derivative by FFT along one axis."""
    k = grid.wavenumbers
    shape = [1] * values.ndim
    shape[axis] = grid.n_points
    fhat = np.fft.fft(values, axis=axis)
    out = np.fft.ifft(-(k.reshape(shape) ** 2) * fhat, axis=axis)
    return out.real if np.isrealobj(values) else out


def quantum_potential(
    R: np.ndarray,
    grid: SpatialGrid,
    params: PhysicalParams,
    epsilon: float,
    axis: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Curvature potential -(hbar^2/2m) lap(R)/R with a floored denominator.

    Returns (Q, node_mask); node_mask marks points where R fell below
    epsilon * max(R) and the floor was active.
    """
    r_max = float(R.max())
    if r_max == 0.0:
        raise DegenerateStateError("all-zero amplitude has no polar decomposition")
    floor = epsilon * r_max
    node_mask = R < floor
    denom = np.maximum(R, floor)
    lap = spectral_laplacian(R, grid, axis=axis)
    Q = -(params.hbar**2 / (2.0 * params.mass)) * lap / denom
    return Q, node_mask


def velocity_field(
    values: np.ndarray,
    grid: SpatialGrid,
    params: PhysicalParams,
    epsilon: float,
    axis: int = 0,
) -> np.ndarray:
    """Flow velocity (hbar/m) Im(psi' / psi) with the node floor on |psi|."""
    R = np.abs(values)
    r_max = float(R.max())
    if r_max == 0.0:
        raise DegenerateStateError("all-zero amplitude has no velocity field")
    floored = np.maximum(R, epsilon * r_max)
    dpsi = spectral_derivative(values, grid, axis=axis)
    return (params.hbar / params.mass) * np.imag(dpsi * np.conj(values)) / floored**2


# ---------- polar fields ----------

@dataclass(frozen=True)
class PolarFields:
    """Madelung fields of a one-particle state at time t."""

    grid: SpatialGrid
    t: float
    R: np.ndarray
    S: np.ndarray
    Q: np.ndarray
    v: np.ndarray
    node_mask: np.ndarray

    @property
    def node_fraction(self) -> float:
        return float(self.node_mask.mean())


def decompose(
    psi: WaveState, params: PhysicalParams, epsilon: float = DEFAULT_EPSILON
) -> PolarFields:
    """Polar-decompose a one-particle state.

    R = |psi| exactly; S = hbar * unwrapped arg(psi) (single left-to-right
    2 pi correction, defined up to one global constant); Q and v carry the
    epsilon node floor.
    """
    if psi.is_two_particle:
        raise ShapeError("decompose handles one-particle states only")
    if not 0.0 < epsilon <= 1e-3:
        raise ConfigurationError(f"epsilon must lie in (0, 1e-3], got {epsilon}")
    R = np.abs(psi.values)
    Q, node_mask = quantum_potential(R, psi.grid, params, epsilon)
    S = params.hbar * np.unwrap(np.angle(psi.values))
    v = velocity_field(psi.values, psi.grid, params, epsilon)
    return PolarFields(grid=psi.grid, t=psi.t, R=R, S=S, Q=Q, v=v, node_mask=node_mask)


def continuity_residual(
    psi_t1: WaveState, psi_t2: WaveState, params: PhysicalParams
) -> float:
    """L2 norm of d(rho)/dt + div(rho_bar v_bar) between two nearby states.

    Time derivative is the finite difference across t2 - t1; rho and v are
    midpoint averages of the two snapshots. Small values certify that the
    numerical evolution transports density along the flow.
    """
    if psi_t1.grid != psi_t2.grid or psi_t1.grid2 != psi_t2.grid2:
        raise ShapeError("continuity residual requires identical grids")
    dt = psi_t2.t - psi_t1.t
    if not dt > 0:
        raise ShapeError(f"need t2 > t1, got t1={psi_t1.t}, t2={psi_t2.t}")

    rho1, rho2 = psi_t1.density(), psi_t2.density()
    rho_bar = 0.5 * (rho1 + rho2)
    drho_dt = (rho2 - rho1) / dt

    if psi_t1.is_two_particle:
        div = np.zeros_like(rho_bar)
        for axis, grid in ((0, psi_t1.grid), (1, psi_t1.grid2)):
            v1 = velocity_field(psi_t1.values, grid, params, DEFAULT_EPSILON, axis=axis)
            v2 = velocity_field(psi_t2.values, grid, params, DEFAULT_EPSILON, axis=axis)
            flux = rho_bar * 0.5 * (v1 + v2)
            div += spectral_derivative(flux, grid, axis=axis).real
        cell = psi_t1.grid.dx * psi_t1.grid2.dx
    else:
        v1 = velocity_field(psi_t1.values, psi_t1.grid, params, DEFAULT_EPSILON)
        v2 = velocity_field(psi_t2.values, psi_t2.grid, params, DEFAULT_EPSILON)
        flux = rho_bar * 0.5 * (v1 + v2)
        div = spectral_derivative(flux, psi_t1.grid).real
        cell = psi_t1.grid.dx

    resid = drho_dt + div
    return float(np.sqrt(np.sum(resid**2) * cell))
