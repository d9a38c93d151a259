"""Expectation values and fringe-visibility measurement."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, ShapeError
from .fields import PhysicalParams, PotentialSpec, WaveState


def observables(
    psi: WaveState, params: PhysicalParams, potential: PotentialSpec
) -> dict[str, float]:
    """Row of {norm, x_mean, p_mean, sigma_x, energy} for a one-particle state.

    Position moments by grid quadrature on rho; momentum and kinetic energy
    by spectral quadrature; energy = kinetic + integral(rho V).
    """
    if psi.is_two_particle:
        raise ShapeError("observables handles one-particle states; see two_particle_observables")
    x = psi.grid.points
    dx = psi.grid.dx
    rho = psi.density()
    norm = float(np.sum(rho) * dx)

    x_mean = float(np.sum(x * rho) * dx / norm)
    var = float(np.sum((x - x_mean) ** 2 * rho) * dx / norm)
    sigma_x = float(np.sqrt(max(var, 0.0)))

    k = psi.grid.wavenumbers
    spec = np.abs(np.fft.fft(psi.values)) ** 2 * dx / psi.grid.n_points
    p_mean = float(params.hbar * np.sum(k * spec) / norm)
    kinetic = float(params.hbar**2 * np.sum(k**2 * spec) / (2.0 * params.mass) / norm)

    v_grid = potential.evaluate(psi.grid, params)
    energy = kinetic + float(np.sum(v_grid * rho) * dx / norm)
    return {
        "norm": norm,
        "x_mean": x_mean,
        "p_mean": p_mean,
        "sigma_x": sigma_x,
        "energy": energy,
    }


def two_particle_observables(
    psi: WaveState,
    params: PhysicalParams,
    potential: PotentialSpec,
    potential2: PotentialSpec,
    params2: PhysicalParams | None = None,
) -> dict[str, float]:
    """Marginal moments per coordinate plus total norm and energy."""
    if not psi.is_two_particle:
        raise ShapeError("two_particle_observables needs a two-particle state")
    p2 = params2 if params2 is not None else params
    rho = psi.density()
    dx1, dx2 = psi.grid.dx, psi.grid2.dx
    norm = float(np.sum(rho) * dx1 * dx2)

    out: dict[str, float] = {"norm": norm}
    marg1 = rho.sum(axis=1) * dx2
    marg2 = rho.sum(axis=0) * dx1
    for label, grid, marg in (("x1", psi.grid, marg1), ("x2", psi.grid2, marg2)):
        x = grid.points
        mean = float(np.sum(x * marg) * grid.dx / norm)
        var = float(np.sum((x - mean) ** 2 * marg) * grid.dx / norm)
        out[f"{label}_mean"] = mean
        out[f"sigma_{label}"] = float(np.sqrt(max(var, 0.0)))

    kinetic = 0.0
    fhat2 = np.abs(np.fft.fft2(psi.values)) ** 2 * dx1 * dx2 / (psi.grid.n_points * psi.grid2.n_points)
    k1 = psi.grid.wavenumbers[:, None]
    k2 = psi.grid2.wavenumbers[None, :]
    kinetic += float(params.hbar**2 * np.sum(k1**2 * fhat2) / (2.0 * params.mass) / norm)
    kinetic += float(p2.hbar**2 * np.sum(k2**2 * fhat2) / (2.0 * p2.mass) / norm)

    v_grid = potential.evaluate(psi.grid, params)[:, None] + potential2.evaluate(
        psi.grid2, p2
    )[None, :]
    out["energy"] = kinetic + float(np.sum(v_grid * rho) * dx1 * dx2 / norm)
    return out


def fringe_visibility(psi: WaveState, window: tuple[float, float]) -> float | None:
    """(rho_max - rho_min) / (rho_max + rho_min) over interior density extrema.

    Extrema are found by 3-point comparison inside the window. Returns None
    (not applicable) when fewer than two interior minima exist, i.e. the
    density carries no fringe structure there.
    """
    if psi.is_two_particle:
        raise ShapeError("fringe_visibility handles one-particle states only")
    lo, hi = window
    if not (psi.grid.x_min <= lo < hi <= psi.grid.x_max):
        raise ConfigurationError(
            f"window [{lo}, {hi}] must sit inside the domain "
            f"[{psi.grid.x_min}, {psi.grid.x_max}]"
        )
    x = psi.grid.points
    rho = psi.density()
    sel = np.where((x >= lo) & (x <= hi))[0]
    if sel.size < 3:
        return None
    r = rho[sel]
    interior = slice(1, -1)
    is_max = (r[1:-1] > r[:-2]) & (r[1:-1] > r[2:])
    is_min = (r[1:-1] < r[:-2]) & (r[1:-1] < r[2:])
    maxima = r[interior][is_max]
    minima = r[interior][is_min]
    if minima.size < 2 or maxima.size < 1:
        return None
    top = float(maxima.max())
    bottom = float(minima.min())
    if top + bottom == 0.0:
        return None
    return (top - bottom) / (top + bottom)
