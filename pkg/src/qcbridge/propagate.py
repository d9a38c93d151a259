"""Split-step time evolution of the coupling-interpolated wave equation.

The equation evolved is

    i hbar d(psi)/dt = [ -(hbar^2/2m) lap + V(x) - lambda(t) Q[|psi|] ] psi

with Q[R] = -(hbar^2/2m) lap(R)/R recomputed self-consistently from the
current amplitude. lambda = 0 is ordinary unitary wave mechanics; lambda = 1
cancels the amplitude-curvature term exactly and the density follows the
classical Hamilton-Jacobi flow. Strang splitting: half potential step, full
spectral kinetic step, half potential step, with Q rebuilt from the
amplitude before each potential factor and lambda sampled at the step
midpoint. The effective potential is real, so the norm is conserved to
rounding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bohm import TrajectoryEnsemble, advance, equivariance_statistic
from .coupling import EffectiveLambda, LambdaSchedule, effective_lambda
from .errors import (
    CausticWarning,
    ConfigurationError,
    DegenerateWeightsError,
    NumericalBlowupError,
    ResourceError,
    ShapeError,
    StabilityWarning,
)
from .fields import PhysicalParams, PotentialSpec, WaveState, boundary_leakage
from .observables import observables, two_particle_observables
from .polar import continuity_residual, decompose, quantum_potential
from .records import RunRecord, TrajectoryHistory

TWO_PARTICLE_GRID_CAP = 256
# A caustic is flagged when the floored-point coverage grows this much above
# its value for the initial state. Localized packets legitimately keep large
# exponential tails below the relative node floor, so absolute coverage is
# not a usable signal; growth is.
CAUSTIC_GROWTH_FRACTION = 0.05


def _floored_fraction(values: np.ndarray, epsilon: float) -> float:
    R = np.abs(values)
    r_max = R.max()
    if r_max == 0.0:
        return 1.0
    return float((R < epsilon * r_max).mean())

RUN_COLUMNS = [
    "t",
    "lambda",
    "norm",
    "x_mean",
    "p_mean",
    "sigma_x",
    "energy",
    "continuity_residual",
    "boundary_leakage",
    "node_fraction",
]

RUN_COLUMNS_2P = [
    "t",
    "lambda_1",
    "lambda_2",
    "lambda_eff",
    "norm",
    "x1_mean",
    "x2_mean",
    "sigma_x1",
    "sigma_x2",
    "energy",
    "continuity_residual",
    "boundary_leakage",
    "node_fraction",
]


@dataclass
class EvolutionConfig:
    """Time-stepping parameters shared by one- and two-particle runs.

    schedule=None disables the coupling term entirely (plain linear
    evolution); schedule2 defaults to schedule for two-particle runs.
    """

    dt: float
    n_steps: int
    schedule: LambdaSchedule | None = None
    schedule2: LambdaSchedule | None = None
    potential: PotentialSpec = None
    potential2: PotentialSpec | None = None
    record_every: int = 1
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.potential is None:
            self.potential = PotentialSpec.free()
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.record_every < 1:
            raise ConfigurationError(f"record_every must be >= 1, got {self.record_every}")
        if not 0.0 < self.epsilon <= 1e-3:
            raise ConfigurationError(f"epsilon must lie in (0, 1e-3], got {self.epsilon}")

    def stability_bound(self, grid, params: PhysicalParams) -> float:
        return grid.dx**2 * params.mass / (params.hbar * np.pi)


def _warn_if_unstable(config: EvolutionConfig, state: WaveState, params: PhysicalParams) -> None:
    bound = config.stability_bound(state.grid, params)
    if state.is_two_particle:
        bound = min(bound, config.stability_bound(state.grid2, params))
    if config.dt > bound:
        warnings.warn(
            f"dt={config.dt} exceeds the resolution bound dx^2 m/(hbar pi)={bound:.3e}; "
            "the coupling-term recomputation degrades beyond this scale",
            StabilityWarning,
            stacklevel=3,
        )


# ---------- one-particle stepping ----------

class _Stepper:
    """Caches grid-dependent arrays for repeated one-particle steps."""

    def __init__(self, state: WaveState, config: EvolutionConfig, params: PhysicalParams):
        if state.is_two_particle:
            raise ShapeError("use _TwoParticleStepper for tensor-grid states")
        self.grid = state.grid
        self.config = config
        self.params = params
        self.v_grid = config.potential.evaluate(state.grid, params)
        k = state.grid.wavenumbers
        self.kinetic_phase = np.exp(
            -1j * params.hbar * k**2 * config.dt / (2.0 * params.mass)
        )
        self.half_dt_over_hbar = config.dt / (2.0 * params.hbar)

    def _half_potential(self, values: np.ndarray, lam: float | None):
        if lam is None:
            u_eff = self.v_grid
            node_fraction = 0.0
        else:
            q, node_mask = quantum_potential(
                np.abs(values), self.grid, self.params, self.config.epsilon
            )
            u_eff = self.v_grid - lam * q
            node_fraction = float(node_mask.mean())
        return values * np.exp(-1j * u_eff * self.half_dt_over_hbar), node_fraction

    def step(self, values: np.ndarray, t: float) -> tuple[np.ndarray, float, float]:
        """One Strang step from t; returns (values, lambda_mid, node_fraction)."""
        cfg = self.config
        lam = cfg.schedule(t + 0.5 * cfg.dt) if cfg.schedule is not None else None
        values, _ = self._half_potential(values, lam)
        values = np.fft.ifft(self.kinetic_phase * np.fft.fft(values))
        values, node_fraction = self._half_potential(values, lam)
        if not np.all(np.isfinite(values)):
            raise NumericalBlowupError(f"non-finite amplitudes after step at t={t}", t=t)
        return values, (0.0 if lam is None else lam), node_fraction


def step(state: WaveState, config: EvolutionConfig, params: PhysicalParams,
         t: float | None = None) -> WaveState:
    """Advance a one-particle state by one Strang-split step of dt."""
    stepper = _Stepper(state, config, params)
    t0 = state.t if t is None else t
    base = _floored_fraction(state.values, config.epsilon)
    values, _, node_fraction = stepper.step(state.values, t0)
    if node_fraction - base > CAUSTIC_GROWTH_FRACTION:
        warnings.warn(
            f"node floor grew from {base:.1%} to {node_fraction:.1%} of grid points "
            f"in one step at t={t0 + config.dt}",
            CausticWarning,
            stacklevel=2,
        )
    return state.with_values(values, t=t0 + config.dt)


def _record_indices(n_steps: int, record_every: int) -> set[int]:
    idx = set(range(0, n_steps + 1, record_every))
    idx.add(n_steps)
    return idx


def evolve(
    state: WaveState,
    config: EvolutionConfig,
    params: PhysicalParams,
    ensemble: TrajectoryEnsemble | None = None,
) -> RunRecord:
    """Run n_steps steps, recording observables every record_every steps.

    If a trajectory ensemble is supplied it is co-advanced with the field
    and its equivariance statistic is recorded alongside the positions.
    On numerical blowup, or caustic collapse while the coupling term is
    active, the run terminates early and the partial record is returned
    with `error` set.
    """
    _warn_if_unstable(config, state, params)
    stepper = _Stepper(state, config, params)
    record_at = _record_indices(config.n_steps, config.record_every)

    rows: list[list[float]] = []
    error: str | None = None
    lam0 = config.schedule(0.0 + 0.5 * config.dt) if config.schedule else 0.0

    traj_times: list[float] = []
    traj_positions: list[np.ndarray] = []
    traj_ks: list[float] = []
    fields_prev = None
    if ensemble is not None:
        if ensemble.grid != state.grid:
            raise ShapeError("ensemble and state live on different grids")
        fields_prev = decompose(state, params, config.epsilon)

    def record(st: WaveState, prev: WaveState | None, lam: float, node_fraction: float):
        obs = observables(st, params, config.potential)
        resid = continuity_residual(prev, st, params) if prev is not None else float("nan")
        rows.append(
            [
                st.t,
                lam,
                obs["norm"],
                obs["x_mean"],
                obs["p_mean"],
                obs["sigma_x"],
                obs["energy"],
                resid,
                boundary_leakage(st),
                node_fraction,
            ]
        )
        if ensemble is not None:
            traj_times.append(st.t)
            traj_positions.append(ens.positions.copy())
            traj_ks.append(equivariance_statistic(ens, st))

    ens = ensemble
    current = state
    base_coverage = _floored_fraction(state.values, config.epsilon)
    record(current, None, lam0, base_coverage if config.schedule is not None else 0.0)
    prev = None
    for i in range(1, config.n_steps + 1):
        prev = current
        try:
            values, lam, node_fraction = stepper.step(current.values, current.t)
        except NumericalBlowupError as exc:
            exc.step_index = i
            error = f"numerical blowup at step {i} (t={current.t + config.dt})"
            break
        current = current.with_values(values, t=state.t + i * config.dt)
        if ens is not None:
            fields_now = decompose(current, params, config.epsilon)
            ens = advance(ens, fields_prev, fields_now, config.dt)
            fields_prev = fields_now
        if node_fraction - base_coverage > CAUSTIC_GROWTH_FRACTION and lam > 0.0:
            warnings.warn(
                f"caustic collapse: node floor grew from {base_coverage:.1%} to "
                f"{node_fraction:.1%} of points at t={current.t}",
                CausticWarning,
                stacklevel=2,
            )
            record(current, prev, lam, node_fraction)
            error = f"caustic collapse at step {i} (t={current.t})"
            break
        if i in record_at:
            record(current, prev, lam, node_fraction)

    trajectories = None
    if ens is not None:
        steps_taken = max(1, round((ens.t - state.t) / config.dt))
        trajectories = TrajectoryHistory(
            times=traj_times,
            positions=np.array(traj_positions),
            ks_distance=traj_ks,
            seed=ens.rng_seed,
            frozen_fraction=ens.frozen_steps / (ens.positions.size * steps_taken),
            wrap_count=ens.wrap_count,
        )

    return RunRecord(
        config={"evolution": _config_echo(config)},
        columns=list(RUN_COLUMNS),
        rows=rows,
        seed=ensemble.rng_seed if ensemble is not None else None,
        rng_name="pcg64" if ensemble is not None else None,
        error=error,
        final_state=current,
        trajectories=trajectories,
    )


# ---------- two-particle stepping ----------

class _TwoParticleStepper:
    def __init__(self, state: WaveState, config: EvolutionConfig,
                 params: PhysicalParams, params2: PhysicalParams):
        n1, n2 = state.values.shape
        if n1 > TWO_PARTICLE_GRID_CAP or n2 > TWO_PARTICLE_GRID_CAP:
            raise ResourceError(
                f"two-particle grid {n1}x{n2} exceeds the {TWO_PARTICLE_GRID_CAP}^2 cap"
            )
        self.config = config
        self.params = params
        self.params2 = params2
        self.grid, self.grid2 = state.grid, state.grid2
        pot2 = config.potential2 if config.potential2 is not None else config.potential
        self.v_grid = (
            config.potential.evaluate(state.grid, params)[:, None]
            + pot2.evaluate(state.grid2, params2)[None, :]
        )
        k1 = state.grid.wavenumbers[:, None]
        k2 = state.grid2.wavenumbers[None, :]
        self.kinetic_phase = np.exp(
            -1j
            * config.dt
            * (
                params.hbar * k1**2 / (2.0 * params.mass)
                + params2.hbar * k2**2 / (2.0 * params2.mass)
            )
        )
        self.half_dt_over_hbar = config.dt / (2.0 * params.hbar)
        self.cell = state.grid.dx * state.grid2.dx

    def _potentials(self, values: np.ndarray):
        R = np.abs(values)
        q1, mask1 = quantum_potential(R, self.grid, self.params, self.config.epsilon, axis=0)
        q2, mask2 = quantum_potential(R, self.grid2, self.params2, self.config.epsilon, axis=1)
        return q1, q2, mask1 | mask2

    def step(self, values: np.ndarray, t: float):
        """Returns (values, lam1, lam2, eff_lambda or None, node_fraction)."""
        cfg = self.config
        t_mid = t + 0.5 * cfg.dt
        lam1 = cfg.schedule(t_mid) if cfg.schedule is not None else None
        sched2 = cfg.schedule2 if cfg.schedule2 is not None else cfg.schedule
        lam2 = sched2(t_mid) if sched2 is not None else None

        if lam1 is None and lam2 is None:
            values = values * np.exp(-1j * self.v_grid * self.half_dt_over_hbar)
            values = np.fft.ifft2(self.kinetic_phase * np.fft.fft2(values))
            values = values * np.exp(-1j * self.v_grid * self.half_dt_over_hbar)
            node_fraction = 0.0
            eff = None
        else:
            l1 = 0.0 if lam1 is None else lam1
            l2 = 0.0 if lam2 is None else lam2
            q1, q2, _ = self._potentials(values)
            u = self.v_grid - l1 * q1 - l2 * q2
            values = values * np.exp(-1j * u * self.half_dt_over_hbar)
            values = np.fft.ifft2(self.kinetic_phase * np.fft.fft2(values))
            q1, q2, mask = self._potentials(values)
            u = self.v_grid - l1 * q1 - l2 * q2
            values = values * np.exp(-1j * u * self.half_dt_over_hbar)
            node_fraction = float(mask.mean())
            # density-weighted scalar weights from the post-step state
            rho = np.abs(values) ** 2
            norm = rho.sum() * self.cell
            q1_mean = float((rho * q1).sum() * self.cell / norm)
            q2_mean = float((rho * q2).sum() * self.cell / norm)
            try:
                eff = effective_lambda([l1, l2], [q1_mean, q2_mean])
            except DegenerateWeightsError:
                eff = EffectiveLambda(value=float("nan"), in_unit_interval=False)

        if not np.all(np.isfinite(values)):
            raise NumericalBlowupError(f"non-finite amplitudes after step at t={t}", t=t)
        lam1_out = 0.0 if lam1 is None else lam1
        lam2_out = 0.0 if lam2 is None else lam2
        return values, lam1_out, lam2_out, eff, node_fraction


def step_two_particle(
    state: WaveState,
    config: EvolutionConfig,
    params: PhysicalParams,
    params2: PhysicalParams | None = None,
    t: float | None = None,
) -> tuple[WaveState, EffectiveLambda | None]:
    """One Strang step of the two-particle equation with per-particle couplings.

    Each particle carries its own curvature potential Q_i built from the
    joint amplitude, scaled by its own schedule. Returns the advanced state
    and the density-weighted effective coupling (None when both schedules
    are disabled).
    """
    if not state.is_two_particle:
        raise ShapeError("step_two_particle needs a two-particle state")
    p2 = params2 if params2 is not None else params
    stepper = _TwoParticleStepper(state, config, params, p2)
    t0 = state.t if t is None else t
    base = _floored_fraction(state.values, config.epsilon)
    values, _, _, eff, node_fraction = stepper.step(state.values, t0)
    if node_fraction - base > CAUSTIC_GROWTH_FRACTION:
        warnings.warn(
            f"node floor grew from {base:.1%} to {node_fraction:.1%} of grid points "
            f"in one step at t={t0 + config.dt}",
            CausticWarning,
            stacklevel=2,
        )
    return state.with_values(values, t=t0 + config.dt), eff


def evolve_two_particle(
    state: WaveState,
    config: EvolutionConfig,
    params: PhysicalParams,
    params2: PhysicalParams | None = None,
) -> RunRecord:
    """Two-particle analogue of `evolve`."""
    if not state.is_two_particle:
        raise ShapeError("evolve_two_particle needs a two-particle state")
    p2 = params2 if params2 is not None else params
    _warn_if_unstable(config, state, params)
    stepper = _TwoParticleStepper(state, config, params, p2)
    record_at = _record_indices(config.n_steps, config.record_every)
    pot2 = config.potential2 if config.potential2 is not None else config.potential

    rows: list[list[float]] = []
    error: str | None = None

    def record(st: WaveState, prev: WaveState | None, lam1, lam2, eff, node_fraction):
        obs = two_particle_observables(st, params, config.potential, pot2, p2)
        resid = continuity_residual(prev, st, params) if prev is not None else float("nan")
        rows.append(
            [
                st.t,
                lam1,
                lam2,
                float("nan") if eff is None else eff.value,
                obs["norm"],
                obs["x1_mean"],
                obs["x2_mean"],
                obs["sigma_x1"],
                obs["sigma_x2"],
                obs["energy"],
                resid,
                boundary_leakage(st),
                node_fraction,
            ]
        )

    current = state
    base_coverage = _floored_fraction(state.values, config.epsilon)
    has_coupling = config.schedule is not None or config.schedule2 is not None
    record(current, None, 0.0, 0.0, None, base_coverage if has_coupling else 0.0)
    for i in range(1, config.n_steps + 1):
        prev = current
        try:
            values, lam1, lam2, eff, node_fraction = stepper.step(current.values, current.t)
        except NumericalBlowupError as exc:
            exc.step_index = i
            error = f"numerical blowup at step {i} (t={current.t + config.dt})"
            break
        current = current.with_values(values, t=state.t + i * config.dt)
        if node_fraction - base_coverage > CAUSTIC_GROWTH_FRACTION and max(lam1, lam2) > 0.0:
            warnings.warn(
                f"caustic collapse: node floor grew from {base_coverage:.1%} to "
                f"{node_fraction:.1%} of points at t={current.t}",
                CausticWarning,
                stacklevel=2,
            )
            record(current, prev, lam1, lam2, eff, node_fraction)
            error = f"caustic collapse at step {i} (t={current.t})"
            break
        if i in record_at:
            record(current, prev, lam1, lam2, eff, node_fraction)

    return RunRecord(
        config={"evolution": _config_echo(config)},
        columns=list(RUN_COLUMNS_2P),
        rows=rows,
        error=error,
        final_state=current,
    )


def _config_echo(config: EvolutionConfig) -> dict:
    def sched(s: LambdaSchedule | None):
        if s is None:
            return None
        out = {"kind": s.kind}
        if s.kind == "constant":
            out["value"] = s.value
        elif s.kind == "exponential":
            out["tau_d"] = s.tau_d
        else:
            out.update({"t_start": s.t_start, "t_end": s.t_end})
        return out

    def pot(p: PotentialSpec | None):
        if p is None:
            return None
        out = {"kind": p.kind}
        if p.kind == "harmonic":
            out.update({"omega": p.omega, "center": p.center})
        elif p.kind == "barrier":
            out.update({"height": p.height, "width": p.width, "center": p.center})
        return out

    return {
        "dt": config.dt,
        "n_steps": config.n_steps,
        "record_every": config.record_every,
        "epsilon": config.epsilon,
        "schedule": sched(config.schedule),
        "schedule2": sched(config.schedule2),
        "potential": pot(config.potential),
        "potential2": pot(config.potential2),
    }
