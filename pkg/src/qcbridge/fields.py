"""Grids, wavefunction states, potentials, and initial-condition constructors.

All wave dynamics run in natural units (hbar = m = 1 by default); SI values
enter only through the decoherence-timescale calculator in `coupling`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.constants import k as BOLTZMANN_SI

from .errors import ConfigurationError, DegenerateStateError, DomainError, ShapeError

# Fraction of the domain on each side counted as "edge" by the leakage check.
EDGE_FRACTION = 0.05
NORM_TOL = 1e-8


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic 1D grid with points x_j = x_min + j*dx, j = 0..n-1."""

    x_min: float
    x_max: float
    n_points: int

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def points(self) -> np.ndarray:
        x = self.x_min + self.dx * np.arange(self.n_points)
        x.setflags(write=False)
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching numpy's FFT ordering."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        k.setflags(write=False)
        return k

    def coordinate_of(self, index):
        return self.x_min + self.dx * np.asarray(index)

    def index_of(self, x):
        return np.rint((np.asarray(x) - self.x_min) / self.dx).astype(int) % self.n_points

    def wrap(self, x):
        """Map positions periodically into [x_min, x_max)."""
        return self.x_min + np.mod(np.asarray(x) - self.x_min, self.length)


def make_grid(x_min: float, x_max: float, n_points: int) -> SpatialGrid:
    """Build a periodic grid; n_points must be a power of two >= 16."""
    if not x_max > x_min:
        raise ConfigurationError(f"x_max must exceed x_min, got [{x_min}, {x_max}]")
    if n_points < 16 or not _is_power_of_two(int(n_points)):
        raise ConfigurationError(
            f"n_points must be a power of two >= 16, got {n_points}"
        )
    return SpatialGrid(float(x_min), float(x_max), int(n_points))


@dataclass(frozen=True)
class PhysicalParams:
    """Constants for the dynamics: hbar, particle mass, Boltzmann constant.

    Defaults are natural units for hbar and mass; k_B defaults to its SI
    value and is only consumed by the decoherence calculators.
    """

    hbar: float = 1.0
    mass: float = 1.0
    k_B: float = BOLTZMANN_SI

    def __post_init__(self):
        for name in ("hbar", "mass", "k_B"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class PotentialSpec:
    """External potential: free, harmonic(omega, center), or a square barrier."""

    kind: str
    omega: float = 0.0
    center: float = 0.0
    height: float = 0.0
    width: float = 0.0

    _KINDS = ("free", "harmonic", "barrier")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ConfigurationError(f"unknown potential kind {self.kind!r}")
        if self.kind == "harmonic" and not self.omega > 0:
            raise ConfigurationError("harmonic potential needs omega > 0")
        if self.kind == "barrier" and not self.width > 0:
            raise ConfigurationError("barrier potential needs width > 0")

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls(kind="free")

    @classmethod
    def harmonic(cls, omega: float, center: float = 0.0) -> "PotentialSpec":
        return cls(kind="harmonic", omega=float(omega), center=float(center))

    @classmethod
    def barrier(cls, height: float, width: float, center: float = 0.0) -> "PotentialSpec":
        return cls(kind="barrier", height=float(height), width=float(width), center=float(center))

    def evaluate(self, grid: SpatialGrid, params: PhysicalParams | None = None) -> np.ndarray:
        x = grid.points
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            m = params.mass if params is not None else 1.0
            return 0.5 * m * self.omega**2 * (x - self.center) ** 2
        # barrier
        inside = np.abs(x - self.center) < 0.5 * self.width
        return np.where(inside, self.height, 0.0)


@dataclass
class WaveState:
    """Complex wavefunction samples at time t.

    One-particle states hold a length-n vector on `grid`; two-particle
    states hold an (n1, n2) tensor on `grid` x `grid2`.
    """

    grid: SpatialGrid
    values: np.ndarray
    t: float = 0.0
    grid2: SpatialGrid | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim == 1:
            if self.values.shape[0] != self.grid.n_points:
                raise ShapeError(
                    f"values length {self.values.shape[0]} != grid size {self.grid.n_points}"
                )
            self.grid2 = None
        elif self.values.ndim == 2:
            if self.grid2 is None:
                self.grid2 = self.grid
            expect = (self.grid.n_points, self.grid2.n_points)
            if self.values.shape != expect:
                raise ShapeError(f"values shape {self.values.shape} != grids {expect}")
        else:
            raise ShapeError(f"values must be 1D or 2D, got ndim={self.values.ndim}")

    @property
    def is_two_particle(self) -> bool:
        return self.values.ndim == 2

    @property
    def cell_volume(self) -> float:
        if self.is_two_particle:
            return self.grid.dx * self.grid2.dx
        return self.grid.dx

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.cell_volume)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def with_values(self, values: np.ndarray, t: float | None = None) -> "WaveState":
        return replace(self, values=values, t=self.t if t is None else t)


def _normalize_state(state: WaveState) -> WaveState:
    n2 = state.norm_squared()
    if np.sqrt(n2) < 1e-12:
        raise DegenerateStateError("state amplitude vanishes; cannot normalize")
    state.values = state.values / np.sqrt(n2)
    return state


def gaussian_packet(
    grid: SpatialGrid,
    x0: float,
    sigma: float,
    p0: float,
    params: PhysicalParams,
    t: float = 0.0,
) -> WaveState:
    """Normalized Gaussian packet exp(-(x-x0)^2/4 sigma^2) * exp(i p0 x / hbar).

    The density has mean x0 and standard deviation sigma. Requires
    sigma >= 4 dx so the packet is resolvable, and the 5-sigma support of
    the packet to sit inside the domain (periodic wrap-around guard).
    """
    if sigma < 4.0 * grid.dx:
        raise ConfigurationError(
            f"sigma={sigma} under-resolved: need sigma >= 4 dx = {4.0 * grid.dx}"
        )
    if x0 - 5.0 * sigma < grid.x_min or x0 + 5.0 * sigma > grid.x_max:
        raise ConfigurationError(
            f"packet support [x0 +/- 5 sigma] = [{x0 - 5 * sigma}, {x0 + 5 * sigma}] "
            f"leaves the domain [{grid.x_min}, {grid.x_max}]"
        )
    x = grid.points
    values = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2)) * np.exp(1j * p0 * x / params.hbar)
    return _normalize_state(WaveState(grid=grid, values=values, t=t))


def harmonic_ground_state(
    grid: SpatialGrid, omega: float, params: PhysicalParams, center: float = 0.0
) -> WaveState:
    """Ground state of the harmonic well: a Gaussian with sigma = sqrt(hbar/2m omega)."""
    if not omega > 0:
        raise ConfigurationError("omega must be positive")
    sigma = np.sqrt(params.hbar / (2.0 * params.mass * omega))
    return gaussian_packet(grid, x0=center, sigma=sigma, p0=0.0, params=params)


def superpose(a: complex, psi1: WaveState, b: complex, psi2: WaveState) -> WaveState:
    """Normalized a*psi1 + b*psi2 on identical grids and time stamps."""
    if psi1.grid != psi2.grid or psi1.grid2 != psi2.grid2:
        raise ShapeError("superpose requires identical grids")
    if psi1.t != psi2.t:
        raise ShapeError(f"superpose requires equal time stamps, got {psi1.t} and {psi2.t}")
    combo = a * psi1.values + b * psi2.values
    state = WaveState(grid=psi1.grid, values=combo, t=psi1.t, grid2=psi1.grid2)
    if np.sqrt(state.norm_squared()) < 1e-12:
        raise DegenerateStateError("superposition cancels to zero norm")
    return _normalize_state(state)


def product_state(psi1: WaveState, psi2: WaveState) -> WaveState:
    """Two-particle product state Psi(x1, x2) = psi1(x1) psi2(x2)."""
    if psi1.is_two_particle or psi2.is_two_particle:
        raise ShapeError("product_state takes two one-particle states")
    if psi1.t != psi2.t:
        raise ShapeError("product_state requires equal time stamps")
    values = np.outer(psi1.values, psi2.values)
    return _normalize_state(
        WaveState(grid=psi1.grid, values=values, t=psi1.t, grid2=psi2.grid)
    )


def boundary_leakage(state: WaveState) -> float:
    """Peak probability density within 5% of the domain edges.

    Experiments must keep this below 1e-6; growth signals periodic
    wrap-around contaminating the run.
    """
    rho = state.density()
    x1 = state.grid.points
    band1 = (x1 < state.grid.x_min + EDGE_FRACTION * state.grid.length) | (
        x1 >= state.grid.x_max - EDGE_FRACTION * state.grid.length
    )
    if not state.is_two_particle:
        return float(rho[band1].max())
    g2 = state.grid2
    x2 = g2.points
    band2 = (x2 < g2.x_min + EDGE_FRACTION * g2.length) | (
        x2 >= g2.x_max - EDGE_FRACTION * g2.length
    )
    mask = band1[:, None] | band2[None, :]
    return float(rho[mask].max())
