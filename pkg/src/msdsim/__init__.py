"""msdsim: three-level STIRAP and counterdiabatic (MSD) driving simulator.

Builds physically feasible corrected driving Hamiltonians for three-level
systems via iterated superadiabatic frames, verifies them against a fully
numerical engine, and propagates closed (Schroedinger) and open (Lindblad)
dynamics for the named benchmark scenarios.
"""
from .backend import backend_name
from .dynamics import (
    DissipationSpec,
    HybridSystemSpec,
    PRODUCT_BASIS,
    TimeGrid,
    Trajectory,
    cavity_lowering,
    emitter_dephasing,
    emitter_lowering,
    excitation_number,
    fidelity,
    hybrid_hamiltonian,
    mean_photon_number,
    population,
    propagate_lindblad,
    propagate_schrodinger,
)
from .errors import (
    ConfigError,
    DegenerateControlError,
    DegenerateSpectrumError,
    NonHermitianError,
    PropagationError,
    SimulationError,
    StepTooLargeError,
)
from .hamiltonians import (
    FrameEigensystem,
    HamiltonianSampler,
    StirapEigensystem,
    THREE_LEVEL_BASIS,
    dark_state,
    eigenbasis_unitary,
    frame_eigenbasis_unitary,
    frame_eigensystem,
    frame_hamiltonian,
    msd_couplings,
    msd_hamiltonian,
    stirap_eigensystem,
    stirap_hamiltonian,
)
from .linalg import EighResult, adjoint, eigh, is_unitary, tensor
from .pulses import (
    ControlWaveform,
    DerivedAngles,
    GaussianPulse,
    angular,
    derived_angles,
    gaussian,
    superposition_waveform,
    transfer_waveform,
)
from .scenarios import (
    RunSummary,
    SCENARIOS,
    ScenarioConfig,
    emit_table,
    load_config,
    run_scenario,
    run_sweep,
)
from .superadiabatic import (
    EigenbasisWalk,
    counterdiabatic_term,
    msd_hamiltonian_numeric,
    superadiabatic_frame,
    superadiabatic_iteration,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
