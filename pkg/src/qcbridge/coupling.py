"""Environment-coupling schedules lambda(t) and decoherence timescales.

lambda(t) in [0, 1] interpolates between isolated-system dynamics
(lambda = 0) and fully environment-locked classical dynamics (lambda = 1).
The SI calculator converts (mass, temperature, relaxation rate, separation)
into the thermal coherence length and the decoherence time
tau_D = (1/gamma) (lambda_T / dx)^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.constants import hbar as HBAR_SI, k as K_B_SI

from .errors import ConfigurationError, DegenerateWeightsError, DomainError


@dataclass(frozen=True)
class LambdaSchedule:
    """Coupling schedule lambda(t), clamped to [0, 1].

    Kinds: constant(value); exponential(tau_d) = 1 - exp(-t/tau_d), which
    starts at 0 and approaches 1 monotonically; linear_ramp(t_start, t_end)
    rising 0 -> 1 across the ramp window.
    """

    kind: str
    value: float = 0.0
    tau_d: float = 0.0
    t_start: float = 0.0
    t_end: float = 0.0

    _KINDS = ("constant", "exponential", "linear_ramp")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ConfigurationError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "constant" and not 0.0 <= self.value <= 1.0:
            raise ConfigurationError(f"constant lambda must lie in [0,1], got {self.value}")
        if self.kind == "exponential" and not self.tau_d > 0:
            raise ConfigurationError("exponential schedule needs tau_d > 0")
        if self.kind == "linear_ramp" and not (0.0 <= self.t_start < self.t_end):
            raise ConfigurationError("linear_ramp needs 0 <= t_start < t_end")

    @classmethod
    def constant(cls, value: float) -> "LambdaSchedule":
        return cls(kind="constant", value=float(value))

    @classmethod
    def exponential(cls, tau_d: float) -> "LambdaSchedule":
        return cls(kind="exponential", tau_d=float(tau_d))

    @classmethod
    def linear_ramp(cls, t_start: float, t_end: float) -> "LambdaSchedule":
        return cls(kind="linear_ramp", t_start=float(t_start), t_end=float(t_end))

    def __call__(self, t: float) -> float:
        return lambda_at(self, t)


def lambda_at(schedule: LambdaSchedule, t: float) -> float:
    """Evaluate a schedule at t >= 0; result is clamped to [0, 1]."""
    if t < 0:
        raise DomainError(f"schedule time must be nonnegative, got {t}")
    if schedule.kind == "constant":
        raw = schedule.value
    elif schedule.kind == "exponential":
        raw = 1.0 - np.exp(-t / schedule.tau_d)
    else:  # linear_ramp
        raw = (t - schedule.t_start) / (schedule.t_end - schedule.t_start)
    return float(min(1.0, max(0.0, raw)))


# ---------- SI decoherence calculator ----------

def thermal_wavelength(mass: float, temperature: float) -> float:
    """Thermal coherence length hbar / sqrt(2 m k_B T), SI units."""
    if not mass > 0 or not temperature > 0:
        raise DomainError(f"mass and temperature must be positive, got m={mass}, T={temperature}")
    return HBAR_SI / np.sqrt(2.0 * mass * K_B_SI * temperature)


@dataclass(frozen=True)
class DecoherenceParams:
    """SI inputs: mass [kg], temperature [K], relaxation rate gamma [1/s],
    and the coherence separation of interest [m]."""

    mass: float
    temperature: float
    gamma: float
    separation: float

    def __post_init__(self):
        for name in ("mass", "temperature", "gamma", "separation"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class DecoherenceTimescales:
    thermal_wavelength: float
    tau_relaxation: float
    tau_decoherence: float
    ratio: float  # tau_decoherence / tau_relaxation = (lambda_T / dx)^2

    def as_dict(self) -> dict:
        return {
            "thermal_wavelength_m": self.thermal_wavelength,
            "tau_relaxation_s": self.tau_relaxation,
            "tau_decoherence_s": self.tau_decoherence,
            "ratio": self.ratio,
        }


def decoherence_time(params: DecoherenceParams) -> DecoherenceTimescales:
    """Decoherence time tau_D = (1/gamma) (lambda_T / separation)^2."""
    lam_t = thermal_wavelength(params.mass, params.temperature)
    tau_r = 1.0 / params.gamma
    ratio = (lam_t / params.separation) ** 2
    return DecoherenceTimescales(
        thermal_wavelength=lam_t,
        tau_relaxation=tau_r,
        tau_decoherence=tau_r * ratio,
        ratio=ratio,
    )


# ---------- multi-particle effective coupling ----------

class EffectiveLambda(NamedTuple):
    """Weighted-mean coupling sum(lambda_i Q_i) / sum(Q_i).

    Q weights are sign-indefinite, so the raw value can leave [0, 1];
    in_unit_interval flags that, and `clamped` is what propagation uses.
    """

    value: float
    in_unit_interval: bool

    @property
    def clamped(self) -> float:
        return min(1.0, max(0.0, self.value))


def effective_lambda(lambdas, weights) -> EffectiveLambda:
    """Combine per-particle couplings with curvature-potential weights."""
    lam = np.asarray(lambdas, dtype=float)
    q = np.asarray(weights, dtype=float)
    if lam.shape != q.shape or lam.ndim != 1 or lam.size < 1:
        raise ConfigurationError(
            f"lambdas and weights must be equal-length 1D arrays, got {lam.shape} and {q.shape}"
        )
    total = q.sum()
    scale = np.abs(q).sum()
    if scale == 0.0 or np.abs(total) < 1e-12 * scale:
        raise DegenerateWeightsError(f"weights sum to zero (sum={total})")
    value = float(np.dot(lam, q) / total)
    return EffectiveLambda(value=value, in_unit_interval=0.0 <= value <= 1.0)
