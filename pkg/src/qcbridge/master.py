"""High-temperature master equation for the position-basis density matrix.

The generator has two terms in rho(x, x'):

    d(rho)/dt = -gamma (x - x') (d_x - d_x') rho
                - (2 m gamma k_B T / hbar^2) (x - x')^2 rho

The second (coherence-suppressing) term is diagonal in (x, x') and is
applied exactly as an elementwise exponential; the first (drift) term is
optional and uses an upwind difference along the (x - x') direction. Both
terms vanish on the diagonal, so the position distribution and the trace
are preserved. Coherence at separation dx decays on the timescale
(1/gamma) (lambda_T / dx)^2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalBlowupError, ResourceError, ShapeError, StabilityWarning
from .fields import PhysicalParams, SpatialGrid, WaveState

GRID_CAP = 256


@dataclass
class DensityMatrixState:
    """Discretized rho(x_j, x_k) at time t."""

    grid: SpatialGrid
    rho: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=np.complex128)
        n = self.grid.n_points
        if self.rho.shape != (n, n):
            raise ShapeError(f"rho shape {self.rho.shape} != ({n}, {n})")

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)) * self.grid.dx)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))


def from_pure(psi: WaveState) -> DensityMatrixState:
    """Rank-1 density matrix psi(x) psi*(x') of a normalized pure state."""
    if psi.is_two_particle:
        raise ShapeError("from_pure takes a one-particle state")
    if psi.grid.n_points > GRID_CAP:
        raise ResourceError(
            f"density-matrix grid {psi.grid.n_points} exceeds the {GRID_CAP}-point cap"
        )
    rho = np.outer(psi.values, np.conj(psi.values))
    return DensityMatrixState(grid=psi.grid, rho=rho, t=psi.t)


def decoherence_rate_coefficient(params: PhysicalParams, gamma: float, temperature: float) -> float:
    """Coefficient D = 2 m gamma k_B T / hbar^2 of the (x - x')^2 term."""
    return 2.0 * params.mass * gamma * params.k_B * temperature / params.hbar**2


def _separation_matrix(grid: SpatialGrid) -> np.ndarray:
    x = grid.points
    return x[:, None] - x[None, :]


def master_step(
    state: DensityMatrixState,
    params: PhysicalParams,
    gamma: float,
    temperature: float,
    dt: float,
    include_drift: bool = False,
) -> DensityMatrixState:
    """Advance rho by dt.

    The decoherence factor exp(-D (x-x')^2 dt) is exact, so composing n
    steps of dt equals one step of n dt to rounding. The drift term is a
    first-order upwind update along the (x - x') diagonal direction, with
    periodic wrap matching the grid topology. Warns when the largest decay
    exponent per step exceeds 1.
    """
    u = _separation_matrix(state.grid)
    d_coeff = decoherence_rate_coefficient(params, gamma, temperature)
    max_exponent = d_coeff * float(np.max(u**2)) * dt
    if max_exponent > 1.0:
        warnings.warn(
            f"largest decay exponent per step is {max_exponent:.2f} > 1; "
            "reduce dt to resolve the fastest-decaying separations",
            StabilityWarning,
            stacklevel=2,
        )
    rho = state.rho
    if include_drift:
        rho = rho + dt * _drift_term(rho, u, state.grid.dx, gamma)
    rho = rho * np.exp(-d_coeff * u**2 * dt)
    if not np.all(np.isfinite(rho)):
        raise NumericalBlowupError(f"non-finite density matrix after step at t={state.t}")
    return DensityMatrixState(grid=state.grid, rho=rho, t=state.t + dt)


def _drift_term(rho: np.ndarray, u: np.ndarray, dx: float, gamma: float) -> np.ndarray:
    """-gamma (x - x') (d_x - d_x') rho with upwind diagonal differences."""
    toward = np.roll(np.roll(rho, 1, axis=0), -1, axis=1)  # separation u - 2 dx
    away = np.roll(np.roll(rho, -1, axis=0), 1, axis=1)  # separation u + 2 dx
    deriv = np.where(u > 0, rho - toward, away - rho) / dx
    return -gamma * u * deriv


# ---------- coherence decay measurement ----------

@dataclass
class MasterHistory:
    """Per-separation mean coherence at the recorded times."""

    times: list[float]
    separations: np.ndarray  # l * dx for l = 0 .. n-1
    coherence: np.ndarray  # (n_times, n_separations) mean |rho|
    trace_error: list[float]
    hermiticity_error: list[float]


def separation_means(state: DensityMatrixState) -> np.ndarray:
    """Mean |rho| over every off-diagonal separation l*dx (Hermitian: upper half)."""
    a = np.abs(state.rho)
    n = state.grid.n_points
    return np.array([np.mean(np.diagonal(a, offset=l)) for l in range(n)])


def evolve_master(
    state: DensityMatrixState,
    params: PhysicalParams,
    gamma: float,
    temperature: float,
    dt: float,
    n_steps: int,
    snapshot_every: int = 1,
    include_drift: bool = False,
) -> tuple[DensityMatrixState, MasterHistory]:
    """Step the master equation, recording binned coherence snapshots."""
    n = state.grid.n_points
    separations = state.grid.dx * np.arange(n)
    times = [state.t]
    coherence = [separation_means(state)]
    trace0 = state.trace()
    trace_err = [abs(state.trace() - trace0)]
    herm_err = [state.hermiticity_error()]

    u = _separation_matrix(state.grid)
    d_coeff = decoherence_rate_coefficient(params, gamma, temperature)
    max_exponent = d_coeff * float(np.max(u**2)) * dt
    if max_exponent > 1.0:
        warnings.warn(
            f"largest decay exponent per step is {max_exponent:.2f} > 1",
            StabilityWarning,
            stacklevel=2,
        )
    decay = np.exp(-d_coeff * u**2 * dt)

    current = state
    rho = state.rho
    for i in range(1, n_steps + 1):
        if include_drift:
            rho = rho + dt * _drift_term(rho, u, state.grid.dx, gamma)
        rho = rho * decay
        if not np.all(np.isfinite(rho)):
            raise NumericalBlowupError(
                f"non-finite density matrix at step {i}", step_index=i
            )
        current = DensityMatrixState(grid=state.grid, rho=rho, t=state.t + i * dt)
        if i % snapshot_every == 0 or i == n_steps:
            times.append(current.t)
            coherence.append(separation_means(current))
            trace_err.append(abs(current.trace() - trace0))
            herm_err.append(current.hermiticity_error())

    history = MasterHistory(
        times=times,
        separations=separations,
        coherence=np.array(coherence),
        trace_error=trace_err,
        hermiticity_error=herm_err,
    )
    return current, history


@dataclass
class CoherenceDecay:
    """1/e times per separation and the fitted power law tau = C * dx^p."""

    separations: np.ndarray
    tau: np.ndarray  # nan where unresolved
    resolved: np.ndarray  # bool mask
    fit_exponent: float
    fit_coefficient: float


def coherence_halftime(history) -> CoherenceDecay:
    """Extract 1/e decay times per separation from a decoherence-only run.

    Accepts a MasterHistory or a list of >= 3 DensityMatrixState snapshots.
    The 1/e crossing is located by interpolating log-coherence in time,
    which is exact for the elementwise-exponential decay. Separations whose
    coherence never falls to 1/e within the run are marked unresolved. The
    power law is fitted over resolved nonzero separations.
    """
    if not isinstance(history, MasterHistory):
        snapshots = list(history)
        if len(snapshots) < 3:
            raise ShapeError(f"need >= 3 snapshots, got {len(snapshots)}")
        history = MasterHistory(
            times=[s.t for s in snapshots],
            separations=snapshots[0].grid.dx * np.arange(snapshots[0].grid.n_points),
            coherence=np.array([separation_means(s) for s in snapshots]),
            trace_error=[],
            hermiticity_error=[],
        )
    if len(history.times) < 3:
        raise ShapeError(f"need >= 3 snapshots, got {len(history.times)}")

    times = np.asarray(history.times)
    n_sep = history.separations.size
    tau = np.full(n_sep, np.nan)
    for j in range(n_sep):
        y = history.coherence[:, j]
        y0 = y[0]
        if not (np.isfinite(y0) and y0 > 0):
            continue
        target = y0 / np.e
        below = np.where(y <= target)[0]
        if below.size == 0 or below[0] == 0:
            continue
        b = below[0]
        a = b - 1
        la, lb, lt = np.log(y[a]), np.log(y[b]), np.log(target)
        tau[j] = times[a] + (la - lt) / (la - lb) * (times[b] - times[a])

    resolved = np.isfinite(tau) & (history.separations > 0)
    if resolved.sum() >= 2:
        coeffs = np.polyfit(np.log(history.separations[resolved]), np.log(tau[resolved]), 1)
        fit_exponent = float(coeffs[0])
        fit_coefficient = float(np.exp(coeffs[1]))
    else:
        fit_exponent = float("nan")
        fit_coefficient = float("nan")
    return CoherenceDecay(
        separations=history.separations,
        tau=tau,
        resolved=resolved,
        fit_exponent=fit_exponent,
        fit_coefficient=fit_coefficient,
    )
