"""Pulse-level simulator for parallel gates on dipole-coupled flip-flop qubits."""

__version__ = "0.1.0"

from .calibration import (
    CalibrationError,
    calibrate_hold,
    calibrate_rx_drive,
    calibrate_sqrt_iswap,
)
from .coupling import (
    ArrayGeometry,
    QubitArray,
    build_four_qubit,
    build_two_qubit,
    dipole_coupling_ghz,
    dipole_dipole,
    dipole_operator,
    position_operator,
)
from .device import (
    DeviceParams,
    build_hamiltonian,
    hyperfine,
    orbital_splitting,
    transition_frequency,
)
from .fidelity import (
    FidelityResult,
    averaged_infidelity,
    entanglement_fidelity,
    ideal_gate,
)
from .noise import NoiseSpec, NoiseTrace, apply_noise, generate_trace
from .operators import expm_unitary, kron, pauli, spin_half_ops
from .propagation import (
    ConvergenceError,
    PropagationSettings,
    SubspacePropagator,
    computational_projector,
    evolve,
)
from .pulses import (
    ACDrive,
    DCSegment,
    GateSchedule,
    SiteProgram,
    estimate_adiabaticity,
    idle_schedule,
    rx_schedule,
    rz_schedule,
    sqrt_iswap_schedule,
)
from .sweep import (
    SweepConfig,
    SweepResultRow,
    emit,
    run_noninteracting_baseline,
    run_parallel_single_qubit,
    run_parallel_two_qubit,
)
