"""Kinetic equilibria, entropy functionals, and monitored relaxation runs.

Layering: specfun (series/special values) -> equilibria (normalization
solver, closed-form state functions) -> functionals (gridded fields,
entropy/energy/distance) -> kinetics (collision quadrature, slab
transport, monitored runs) -> oracle (brute-force variational checks)
-> cli (batch front end).
"""

from .specfun import LEvalResult, eta_identity_residual, polylog_L, zeta
from .equilibria import (
    MaxwellianSpec,
    NoSolutionError,
    NonContractionError,
    QuantumDeltas,
    QuantumEquilibrium,
    SolveReport,
    classical_reference,
    equilibrium_state,
    eval_classical,
    eval_quantum,
    extremal_from_moments,
    iterate_z,
    m_hat,
    quantum_deltas,
    quantum_energy,
    quantum_entropy_closed,
    quantum_free_energy,
    solve_normalization,
)
from .functionals import (
    DistributionField,
    FunctionalReport,
    MomentSummary,
    distance,
    entropy_classical,
    entropy_quantum,
    f_closed_maxwellian,
    field_from_callable,
    field_from_maxwellian,
    field_from_quantum,
    free_functional,
    lyapunov,
    moment_matched_maxwellian,
    moments,
    velocity_axis,
)
from .kinetics import (
    BoundarySpec,
    CollisionKernelSpec,
    FluxReport,
    MonitorRecord,
    classical_collision,
    classify,
    collision_invariant_residuals,
    conservative_projection,
    default_dt,
    quantum_collision,
    run_monitored,
    step,
)
from .oracle import (
    AscentDiagnostics,
    ConvergenceError,
    RootPair,
    limit_roots,
    maximize_F_fixed_rho,
    minimize_dist_constrained,
)

__version__ = "0.1.0"

__all__ = [
    "LEvalResult", "eta_identity_residual", "polylog_L", "zeta",
    "MaxwellianSpec", "NoSolutionError", "NonContractionError", "QuantumDeltas",
    "QuantumEquilibrium", "SolveReport", "classical_reference", "equilibrium_state",
    "eval_classical", "eval_quantum", "extremal_from_moments", "iterate_z", "m_hat",
    "quantum_deltas", "quantum_energy", "quantum_entropy_closed", "quantum_free_energy",
    "solve_normalization",
    "DistributionField", "FunctionalReport", "MomentSummary", "distance",
    "entropy_classical", "entropy_quantum", "f_closed_maxwellian", "field_from_callable",
    "field_from_maxwellian", "field_from_quantum", "free_functional", "lyapunov",
    "moment_matched_maxwellian", "moments", "velocity_axis",
    "BoundarySpec", "CollisionKernelSpec", "FluxReport", "MonitorRecord",
    "classical_collision", "classify", "collision_invariant_residuals",
    "conservative_projection", "default_dt", "quantum_collision", "run_monitored", "step",
    "AscentDiagnostics", "ConvergenceError", "RootPair", "limit_roots",
    "maximize_F_fixed_rho", "minimize_dist_constrained",
    "__version__",
]
