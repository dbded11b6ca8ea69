"""Scattering on two-terminal quantum graphs by the vertex-amplitude method."""
from .core import (
    HBAR2_OVER_2M,
    UNITS,
    ComplexMat2,
    CompositeRing,
    EdgeSpec,
    Free,
    NegativeEnergy,
    ScatteringPreset,
    ScatteringResult,
    SingularMatrix,
    SquareBarrier,
    SquareWell,
    Tabulated,
    TwoTerminalGraph,
    Units,
    VertexAmplitudeError,
    ev_to_k,
    k_to_ev,
    mat2_inv,
    mat2_mul,
)
from .models import (
    NonConvergent,
    ResonanceKind,
    ResonanceReport,
    RingSpec,
    ab_ftr_condition,
    find_resonances,
    limit_probe,
    omega_beta,
    ring_amplitudes_asymmetric,
    ring_r_symmetric,
    ring_t_symmetric,
    ring_transfer_matrix,
)
from .solver import (
    EdgeResonanceSingularity,
    GammaPair,
    GammaSystem,
    SingularGamma,
    VertexAmplitudes,
    amplitudes_from_gamma,
    assemble_gamma,
    edge_current,
    edge_wavefunction,
    gamma_pair_for_edge,
    scatter,
    solve_vertex_amplitudes,
    sweep_k,
)
from .spectrum import (
    BoundState,
    DegenerateBasis,
    SolutionPair,
    StepTooCoarse,
    amplitudes_from_solutions,
    find_bound_states,
    integrate_solutions,
    parallel_wells_amplitude,
    parallel_wells_bound_state,
    parallel_wells_bound_states,
)
from .transfer import (
    MixedWaveNumber,
    TransferMatrix,
    ZeroTransmission,
    cascade,
    m_compose,
    m_free_segment,
    m_from_amplitudes,
    m_square_well,
)

__version__ = "0.1.0"
