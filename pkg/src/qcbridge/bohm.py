"""Trajectory ensembles guided by the flow velocity of the wave.

Initial positions are drawn from the probability density R^2 by inverse-CDF
sampling; trajectories follow dx/dt = v(x, t) with a midpoint (RK2) update
between consecutive field snapshots. If the ensemble starts distributed as
R^2 it stays so (equivariance), which the Kolmogorov-Smirnov statistic
checks against the evolving density.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, ShapeError
from .fields import SpatialGrid, WaveState
from .polar import PolarFields

_TIME_TOL = 1e-9


@dataclass
class TrajectoryEnsemble:
    """Particle positions at time t plus bookkeeping counters."""

    grid: SpatialGrid
    positions: np.ndarray
    t: float
    rng_seed: int
    wrap_count: int = 0
    frozen_steps: int = 0

    @property
    def n_traj(self) -> int:
        return self.positions.shape[0]


def _density_cdf_edges(psi: WaveState) -> tuple[np.ndarray, np.ndarray]:
    """Cell-edge coordinates and the cumulative mass of R^2 at those edges."""
    rho = psi.density()
    grid = psi.grid
    masses = rho * grid.dx
    edges = grid.x_min + grid.dx * np.arange(grid.n_points + 1)
    cdf = np.concatenate(([0.0], np.cumsum(masses)))
    cdf /= cdf[-1]
    return edges, cdf


def sample_initial(psi: WaveState, n_traj: int, seed: int) -> TrajectoryEnsemble:
    """Draw n_traj positions i.i.d. from R^2 (linear interpolation in cells)."""
    if psi.is_two_particle:
        raise ShapeError("trajectory sampling handles one-particle states only")
    if n_traj < 1:
        raise ConfigurationError(f"n_traj must be >= 1, got {n_traj}")
    edges, cdf = _density_cdf_edges(psi)
    rng = np.random.default_rng(seed)
    u = rng.random(n_traj)
    # cells with zero mass are never selected: searchsorted skips flat spans
    cell = np.searchsorted(cdf, u, side="right") - 1
    cell = np.clip(cell, 0, psi.grid.n_points - 1)
    span = cdf[cell + 1] - cdf[cell]
    frac = np.where(span > 0, (u - cdf[cell]) / np.where(span > 0, span, 1.0), 0.0)
    positions = edges[cell] + frac * psi.grid.dx
    return TrajectoryEnsemble(grid=psi.grid, positions=positions, t=psi.t, rng_seed=seed)


def _interp_periodic(grid: SpatialGrid, field: np.ndarray, pos: np.ndarray) -> np.ndarray:
    xp = np.concatenate((grid.points, [grid.x_min + grid.length]))
    fp = np.concatenate((field, [field[0]]))
    return np.interp(grid.wrap(pos), xp, fp)


def advance(
    ens: TrajectoryEnsemble,
    fields_t: PolarFields,
    fields_t_next: PolarFields,
    dt: float,
) -> TrajectoryEnsemble:
    """Midpoint step: x += dt * v(x_mid, t + dt/2), fields averaged in time.

    Positions wrap periodically (wraps counted). A non-finite midpoint
    velocity freezes that trajectory for the step and is counted.
    """
    if fields_t.grid != ens.grid or fields_t_next.grid != ens.grid:
        raise ShapeError("field snapshots live on a different grid than the ensemble")
    if abs(fields_t.t - ens.t) > _TIME_TOL * max(1.0, abs(ens.t)):
        raise ShapeError(f"first snapshot at t={fields_t.t}, ensemble at t={ens.t}")
    if abs(fields_t_next.t - (ens.t + dt)) > _TIME_TOL * max(1.0, abs(ens.t + dt)):
        raise ShapeError(
            f"second snapshot at t={fields_t_next.t}, expected t={ens.t + dt}"
        )

    x = ens.positions
    v0 = _interp_periodic(ens.grid, fields_t.v, x)
    x_mid = x + 0.5 * dt * v0
    v_mid = 0.5 * (
        _interp_periodic(ens.grid, fields_t.v, x_mid)
        + _interp_periodic(ens.grid, fields_t_next.v, x_mid)
    )
    frozen = ~np.isfinite(v_mid)
    x_new = np.where(frozen, x, x + dt * np.where(frozen, 0.0, v_mid))
    wraps = int(np.sum((x_new < ens.grid.x_min) | (x_new >= ens.grid.x_max)))
    return replace(
        ens,
        positions=ens.grid.wrap(x_new),
        t=ens.t + dt,
        wrap_count=ens.wrap_count + wraps,
        frozen_steps=ens.frozen_steps + int(frozen.sum()),
    )


def equivariance_statistic(ens: TrajectoryEnsemble, psi: WaveState) -> float:
    """Kolmogorov-Smirnov distance between the ensemble and the R^2 law."""
    if psi.is_two_particle:
        raise ShapeError("equivariance statistic handles one-particle states only")
    if psi.grid != ens.grid:
        raise ShapeError("ensemble and state live on different grids")
    if abs(psi.t - ens.t) > _TIME_TOL * max(1.0, abs(ens.t)):
        raise ShapeError(f"state at t={psi.t}, ensemble at t={ens.t}")
    edges, cdf = _density_cdf_edges(psi)
    s = np.sort(ens.grid.wrap(ens.positions))
    model = np.interp(s, edges, cdf)
    n = s.size
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - model)
    d_minus = np.max(model - (i - 1) / n)
    return float(max(d_plus, d_minus))
