"""Numerical laboratory for the coupling-interpolated quantum-classical transition.

A split-step spectral solver for the nonlinear wave equation whose
environment-coupling lambda(t) bridges isolated quantum dynamics
(lambda = 0) and classical Hamilton-Jacobi flow (lambda = 1), plus guided
trajectory ensembles, a position-basis decoherence master equation, and a
decoherence-timescale calculator.
"""

from .bohm import TrajectoryEnsemble, advance, equivariance_statistic, sample_initial
from .coupling import (
    DecoherenceParams,
    DecoherenceTimescales,
    EffectiveLambda,
    LambdaSchedule,
    decoherence_time,
    effective_lambda,
    lambda_at,
    thermal_wavelength,
)
from .errors import (
    CausticWarning,
    ConfigurationError,
    DegenerateStateError,
    DegenerateWeightsError,
    DomainError,
    InvariantViolation,
    NumericalBlowupError,
    QCBridgeError,
    ResourceError,
    SchemaError,
    ShapeError,
    StabilityWarning,
)
from .fields import (
    PhysicalParams,
    PotentialSpec,
    SpatialGrid,
    WaveState,
    boundary_leakage,
    gaussian_packet,
    harmonic_ground_state,
    make_grid,
    product_state,
    superpose,
)
from .master import (
    CoherenceDecay,
    DensityMatrixState,
    MasterHistory,
    coherence_halftime,
    evolve_master,
    from_pure,
    master_step,
    separation_means,
)
from .observables import fringe_visibility, observables, two_particle_observables
from .polar import PolarFields, continuity_residual, decompose
from .propagate import (
    EvolutionConfig,
    evolve,
    evolve_two_particle,
    step,
    step_two_particle,
)
from .records import RunRecord, TrajectoryHistory, load_run_record, save_run_record

__version__ = "0.1.0"

__all__ = [
    "CausticWarning",
    "CoherenceDecay",
    "ConfigurationError",
    "DecoherenceParams",
    "DecoherenceTimescales",
    "DegenerateStateError",
    "DegenerateWeightsError",
    "DensityMatrixState",
    "DomainError",
    "EffectiveLambda",
    "EvolutionConfig",
    "InvariantViolation",
    "LambdaSchedule",
    "MasterHistory",
    "NumericalBlowupError",
    "PhysicalParams",
    "PolarFields",
    "PotentialSpec",
    "QCBridgeError",
    "ResourceError",
    "RunRecord",
    "SchemaError",
    "ShapeError",
    "SpatialGrid",
    "StabilityWarning",
    "TrajectoryEnsemble",
    "TrajectoryHistory",
    "WaveState",
    "advance",
    "boundary_leakage",
    "coherence_halftime",
    "continuity_residual",
    "decoherence_time",
    "decompose",
    "effective_lambda",
    "equivariance_statistic",
    "evolve",
    "evolve_master",
    "evolve_two_particle",
    "fringe_visibility",
    "from_pure",
    "gaussian_packet",
    "harmonic_ground_state",
    "lambda_at",
    "load_run_record",
    "make_grid",
    "master_step",
    "observables",
    "product_state",
    "sample_initial",
    "save_run_record",
    "separation_means",
    "step",
    "step_two_particle",
    "superpose",
    "thermal_wavelength",
    "two_particle_observables",
]
