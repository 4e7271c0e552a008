"""Simulation and slow-dynamics reduction for the driven two-photon dissipative oscillator."""

from .fock import (
    DegenerateAmplitude,
    DensityMatrix,
    FockOperator,
    FockSpace,
    Ket,
    TruncationError,
    annihilation,
    cat_norms,
    cat_state,
    coherent_state,
    creation,
    fock_ket,
    identity_op,
    number_op,
    parity_op,
    two_photon_jump,
    vacuum,
)
from .lindblad import (
    LindbladModel,
    adjoint_dissipator,
    cat_model,
    dissipator,
    drive_amplitude,
    drive_form_model,
    rhs,
)
from .integrator import IntegratorConfig, Trajectory, evolve, step_kraus, step_rk4
from .cat_qubit import (
    BlochRates,
    BlochVector,
    CatPaulis,
    QubitDensity,
    SlowBasis,
    bloch_from_qubit,
    bloch_rates,
    cat_kets,
    cat_paulis,
    embed_to_fock,
    project_to_qubit,
    projector_pc,
    qubit_from_bloch,
    slow_basis,
    slow_generator,
    solve_bloch,
)
from .analysis import (
    FitRejected,
    FitResult,
    MetricReport,
    decay_rate_fit,
    fidelity,
    lyapunov_v,
    metric_report,
    moment,
    trace_distance,
)
from .reduction import (
    BlockSystem,
    ConservedFunctional,
    IllConditionedFunctionals,
    KernelDimensionMismatch,
    QuantumBlockSystem,
    SingularFastBlock,
    SlowModel,
    VectorizedLiouvillian,
    conserved_functionals,
    quantum_block_system,
    reduce_direct,
    reduce_dual,
    vectorize_generator,
)

__version__ = "0.1.0"
